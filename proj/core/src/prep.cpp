#include "qtally/prep.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace qtally::prep {

namespace {

constexpr double kTargetNormTol = 1e-10;
// Rotations below this angle are dropped; the induced amplitude error is far
// below the 1e-10 fidelity budget.
constexpr double kAngleTol = 1e-12;

int log2_exact(Eigen::Index n) {
  int bits = 0;
  while ((Eigen::Index{1} << bits) < n) ++bits;
  if ((Eigen::Index{1} << bits) != n) {
    throw std::invalid_argument("target length must be a power of two");
  }
  return bits;
}

}  // namespace

std::string scheme_name(PrepScheme scheme) {
  switch (scheme) {
    case PrepScheme::kDirectManipulation:
      return "direct-manipulation";
    case PrepScheme::kConventionalQRAM:
      return "conventional-qram";
    case PrepScheme::kBucketBrigadeQRAM:
      return "bucket-brigade-qram";
    case PrepScheme::kFlipFlopQRAM:
      return "flip-flop-qram";
  }
  return "?";
}

TargetState::TargetState(Eigen::VectorXcd amps) : amplitudes(std::move(amps)) {
  if (amplitudes.size() < 2) {
    throw std::invalid_argument("target needs at least one qubit");
  }
  log2_exact(amplitudes.size());
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("target is the zero vector");
  if (std::abs(n - 1.0) > kTargetNormTol) {
    throw std::invalid_argument("target is not normalized (norm " +
                                std::to_string(n) + ")");
  }
}

TargetState TargetState::normalized(Eigen::VectorXcd amps) {
  const double n = amps.norm();
  if (n == 0.0) throw std::invalid_argument("target is the zero vector");
  return TargetState(amps / n);
}

int TargetState::qubits() const { return log2_exact(amplitudes.size()); }

Circuit synthesize_prep(const TargetState& target) {
  const int n = target.qubits();
  const Eigen::Index dim = target.amplitudes.size();
  Circuit circuit(RegisterLayout({{"q", n}}));

  // Magnitude stage: split probability mass prefix by prefix, most
  // significant qubit first. Prefix p of length j means index >> (n-j) == p.
  std::vector<double> mass(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) mass[i] = std::norm(target.amplitudes[i]);
  // masses[j][p], built by summing pairs bottom-up
  std::vector<std::vector<double>> level(n + 1);
  level[n] = mass;
  for (int j = n - 1; j >= 0; --j) {
    level[j].resize(std::size_t{1} << j);
    for (std::size_t p = 0; p < level[j].size(); ++p) {
      level[j][p] = level[j + 1][2 * p] + level[j + 1][2 * p + 1];
    }
  }

  for (int j = 0; j < n; ++j) {
    const int target_qubit = n - 1 - j;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << j); ++p) {
      if (level[j][p] <= 0.0) continue;
      const double a0 = std::sqrt(level[j + 1][2 * p]);
      const double a1 = std::sqrt(level[j + 1][2 * p + 1]);
      const double angle = std::atan2(a1, a0);
      if (std::abs(angle) < kAngleTol) continue;
      if (j == 0) {
        circuit.push(GateOp::single(target_qubit, gates::rotation_y(angle), "prep:ry"));
      } else {
        std::vector<int> controls;
        std::vector<bool> values;
        for (int b = 0; b < j; ++b) {
          controls.push_back(n - 1 - b);
          values.push_back((p >> (j - 1 - b)) & 1u);
        }
        circuit.push(GateOp::controlled_single(controls, values, target_qubit,
                                               gates::rotation_y(angle), "prep:ry"));
      }
    }
  }

  // Phase stage: imprint arg(c_i) with multiplexed Rz, low qubit first;
  // the leftover global phase is dropped.
  std::vector<double> phases(static_cast<std::size_t>(dim), 0.0);
  bool any_phase = false;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::abs(target.amplitudes[i]) > 0.0) {
      phases[static_cast<std::size_t>(i)] = std::arg(target.amplitudes[i]);
      if (std::abs(phases[static_cast<std::size_t>(i)]) > kAngleTol) any_phase = true;
    }
  }
  if (any_phase) {
    for (int q = 0; q < n; ++q) {
      const int rest_bits = n - 1 - q;
      std::vector<double> next(std::size_t{1} << rest_bits);
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << rest_bits); ++v) {
        const double p0 = phases[2 * v];
        const double p1 = phases[2 * v + 1];
        const double angle = p0 - p1;  // rotation_z adds -a/2 / +a/2
        next[v] = 0.5 * (p0 + p1);
        if (std::abs(angle) < kAngleTol) continue;
        if (rest_bits == 0) {
          circuit.push(GateOp::single(q, gates::rotation_z(angle), "prep:rz"));
        } else {
          std::vector<int> controls;
          std::vector<bool> values;
          for (int b = 0; b < rest_bits; ++b) {
            controls.push_back(q + 1 + b);
            values.push_back((v >> b) & 1u);
          }
          circuit.push(GateOp::controlled_single(controls, values, q,
                                                 gates::rotation_z(angle), "prep:rz"));
        }
      }
      phases = std::move(next);
    }
  }

  return circuit;
}

TargetState random_target(int qubits, std::uint64_t seed) {
  if (qubits < 1) throw std::invalid_argument("random_target needs qubits >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  Eigen::VectorXcd amps(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mag = 0.25 + uniform();
    const double ph = 2.0 * std::numbers::pi * (0.05 + 0.9 * uniform());
    amps[i] = mag * std::exp(cxd(0, ph));
  }
  return TargetState::normalized(std::move(amps));
}

PrepCost prep_cost(PrepScheme scheme, int N, bool measure, std::uint64_t seed) {
  if (N < 2 || (N & (N - 1)) != 0) {
    throw std::invalid_argument("N must be a power of two >= 2");
  }
  using complexity::Atom;
  using complexity::Term;
  PrepCost cost;
  switch (scheme) {
    case PrepScheme::kDirectManipulation:
      cost.term = Term::atom(Atom::kN) * Term::atom(Atom::kLogN, 2);
      break;
    case PrepScheme::kConventionalQRAM:
      cost.term = Term::atom(Atom::kN);
      break;
    case PrepScheme::kBucketBrigadeQRAM:
      cost.term = Term::atom(Atom::kLogN, 2);
      break;
    case PrepScheme::kFlipFlopQRAM:
      cost.term = Term::atom(Atom::kLogN);
      break;
  }
  complexity::Params params;
  params.N = N;
  cost.numeric = cost.term.evaluate(params);
  if (measure && scheme == PrepScheme::kDirectManipulation) {
    int n = 0;
    while ((1 << n) < N) ++n;
    const Circuit c = synthesize_prep(random_target(n, seed));
    cost.measured = c.elementary_total();
  }
  return cost;
}

std::optional<complexity::Term> prep_encode_cost(PrepScheme scheme) {
  using complexity::Atom;
  using complexity::Term;
  switch (scheme) {
    case PrepScheme::kDirectManipulation:
      return std::nullopt;
    case PrepScheme::kConventionalQRAM:
    case PrepScheme::kBucketBrigadeQRAM:
      return Term::atom(Atom::kSqrtN);
    case PrepScheme::kFlipFlopQRAM:
      return Term::atom(Atom::kN) * Term::atom(Atom::kLogN);
  }
  return std::nullopt;
}

TargetState load_target_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::vector<std::pair<std::size_t, cxd>> entries;
  std::size_t max_index = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f0, f1, f2;
    if (!std::getline(ls, f0, ',') || !std::getline(ls, f1, ',') ||
        !std::getline(ls, f2)) {
      throw std::invalid_argument("malformed CSV row: '" + line + "'");
    }
    try {
      const std::size_t idx = std::stoul(f0);
      entries.emplace_back(idx, cxd(std::stod(f1), std::stod(f2)));
      max_index = std::max(max_index, idx);
    } catch (const std::exception&) {
      if (entries.empty()) continue;  // header row
      throw std::invalid_argument("malformed CSV row: '" + line + "'");
    }
  }
  if (entries.empty()) throw std::invalid_argument("empty target file '" + path + "'");
  Eigen::Index dim = 2;
  while (static_cast<std::size_t>(dim) <= max_index) dim <<= 1;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  for (const auto& [idx, value] : entries) amps[static_cast<Eigen::Index>(idx)] = value;
  return TargetState::normalized(std::move(amps));
}

TargetState load_target_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  const nlohmann::json& arr = j.is_object() ? j.at("amplitudes") : j;
  if (!arr.is_array() || arr.empty()) {
    throw std::invalid_argument("expected a JSON array of [re, im] pairs");
  }
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (arr[i].is_array() && arr[i].size() == 2) {
      amps[static_cast<Eigen::Index>(i)] =
          cxd(arr[i][0].get<double>(), arr[i][1].get<double>());
    } else if (arr[i].is_number()) {
      amps[static_cast<Eigen::Index>(i)] = cxd(arr[i].get<double>(), 0.0);
    } else {
      throw std::invalid_argument("amplitude entries must be numbers or [re, im]");
    }
  }
  return TargetState::normalized(std::move(amps));
}

}  // namespace qtally::prep
