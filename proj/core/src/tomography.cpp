#include "qtally/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qtally::tomo {

namespace {

constexpr double kProbFloor = 1e-15;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string scheme_name(QstScheme scheme) {
  switch (scheme) {
    case QstScheme::kSqst:
      return "sqst";
    case QstScheme::kAaptJsm:
      return "aapt-jsm";
    case QstScheme::kAaptMubNonlocal:
      return "aapt-mub-nonlocal";
    case QstScheme::kAaptMubLocal:
      return "aapt-mub-local";
    case QstScheme::kAaptPovm:
      return "aapt-povm";
    case QstScheme::kCompressedSensing:
      return "compressed-sensing";
    case QstScheme::kQpca:
      return "qpca";
    case QstScheme::kLinearRegression:
      return "linear-regression";
  }
  return "?";
}

double chernoff_prefactor(double delta, double epsilon) {
  if (!(delta > 0 && delta <= 1)) throw std::invalid_argument("delta must be in (0,1]");
  if (!(epsilon > 0 && epsilon < 1)) {
    throw std::invalid_argument("epsilon must be in (0,1)");
  }
  return 3.0 / (delta * delta) * std::log(1.0 / epsilon);
}

TomographyPlan::TomographyPlan(double d, double e, std::vector<double> p)
    : delta(d), epsilon(e), probs(std::move(p)) {
  chernoff_prefactor(delta, epsilon);  // validates delta, epsilon
  if (probs.empty()) throw std::invalid_argument("plan needs at least one outcome");
  double total = 0;
  for (double pm : probs) {
    if (!(pm > 0)) {
      throw std::invalid_argument("every target probability must be positive");
    }
    total += pm;
  }
  if (total > 1.0 + 1e-12) {
    throw std::invalid_argument("target probabilities sum above 1");
  }
}

SampleBudget sample_bound(const TomographyPlan& plan) {
  const double c = chernoff_prefactor(plan.delta, plan.epsilon);
  SampleBudget out;
  out.budgets.reserve(plan.probs.size());
  out.raw.reserve(plan.probs.size());
  for (double pm : plan.probs) {
    const double raw = c / pm;
    const auto m = static_cast<std::int64_t>(std::ceil(raw));
    out.raw.push_back(raw);
    out.budgets.push_back(m);
    out.max_budget = std::max(out.max_budget, m);
  }
  return out;
}

Support state_support(const StateVector& state) {
  Support s;
  for (Eigen::Index i = 0; i < state.amplitudes().size(); ++i) {
    const double p = std::norm(state.amplitudes()[i]);
    if (p > kProbFloor) {
      s.indices.push_back(static_cast<std::uint64_t>(i));
      s.probs.push_back(p);
    }
  }
  return s;
}

CoverageReport verify_coverage(const StateVector& state,
                               const std::vector<std::int64_t>& budgets, int trials,
                               std::uint64_t seed, double delta, double epsilon) {
  if (trials < 100) throw std::invalid_argument("coverage needs trials >= 100");
  const Support support = state_support(state);
  const std::size_t n_outcomes = support.indices.size();
  if (budgets.size() != n_outcomes) {
    throw std::invalid_argument("budget count does not match state support");
  }

  std::vector<double> cdf(n_outcomes);
  double acc = 0;
  for (std::size_t i = 0; i < n_outcomes; ++i) {
    acc += support.probs[i];
    cdf[i] = acc;
  }

  std::int64_t max_budget = 0;
  for (std::int64_t b : budgets) {
    if (b < 1) throw std::invalid_argument("budgets must be >= 1");
    max_budget = std::max(max_budget, b);
  }
  // Snapshot points: after which shot each outcome's estimate is frozen.
  std::vector<std::pair<std::int64_t, std::size_t>> snapshots;
  for (std::size_t i = 0; i < n_outcomes; ++i) snapshots.emplace_back(budgets[i], i);
  std::sort(snapshots.begin(), snapshots.end());

  std::vector<std::int64_t> hits(n_outcomes, 0);
  std::vector<std::int64_t> counts(n_outcomes);
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(splitmix64(seed + 0x51ed270b * static_cast<std::uint64_t>(trial)));
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t next_snapshot = 0;
    for (std::int64_t shot = 1; shot <= max_budget; ++shot) {
      const double u = next_uniform(rng) * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto outcome = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(n_outcomes) - 1));
      counts[outcome] += 1;
      while (next_snapshot < snapshots.size() && snapshots[next_snapshot].first == shot) {
        const std::size_t m = snapshots[next_snapshot].second;
        const double est = static_cast<double>(counts[m]) / static_cast<double>(budgets[m]);
        if (std::abs(est - support.probs[m]) <= delta * support.probs[m]) hits[m] += 1;
        ++next_snapshot;
      }
    }
  }

  CoverageReport report;
  report.threshold =
      1.0 - epsilon - 3.0 * std::sqrt(epsilon * (1.0 - epsilon) / trials);
  report.all_pass = true;
  for (std::size_t i = 0; i < n_outcomes; ++i) {
    CoverageOutcome oc;
    oc.index = support.indices[i];
    oc.prob = support.probs[i];
    oc.budget = budgets[i];
    oc.coverage = static_cast<double>(hits[i]) / trials;
    oc.pass = oc.coverage >= report.threshold;
    report.all_pass = report.all_pass && oc.pass;
    report.outcomes.push_back(oc);
  }
  return report;
}

QstCost qst_cost(QstScheme scheme) {
  using complexity::Atom;
  using complexity::Term;
  QstCost c;
  switch (scheme) {
    case QstScheme::kSqst:
    case QstScheme::kAaptJsm:
      c.copies = Term::atom(Atom::kN, 4);
      c.gates_per_measurement = Term::atom(Atom::kLogN);
      break;
    case QstScheme::kAaptMubNonlocal:
      c.copies = Term::atom(Atom::kN, 2);
      c.gates_per_measurement = Term::atom(Atom::kLogN, 2);
      break;
    case QstScheme::kAaptMubLocal:
      c.copies = Term::atom(Atom::kN, 2);
      c.gates_per_measurement = Term::atom(Atom::kLogN, 3);
      break;
    case QstScheme::kAaptPovm:
      c.copies = Term::constant(1);
      c.gates_per_measurement = Term::atom(Atom::kN, 4);
      break;
    case QstScheme::kCompressedSensing:
      // R*N sampled expectation values at log^2(N) gates each.
      c.copies = Term::atom(Atom::kR) * Term::atom(Atom::kN);
      c.gates_per_measurement = Term::atom(Atom::kLogN, 2);
      break;
    case QstScheme::kQpca:
      c.copies = Term::atom(Atom::kN);
      c.gates_per_measurement = Term::atom(Atom::kR) * Term::atom(Atom::kLogN);
      break;
    case QstScheme::kLinearRegression:
      c.copies = Term::atom(Atom::kN, 4);
      c.gates_per_measurement = Term::constant(1);
      break;
  }
  c.overall = c.copies * c.gates_per_measurement;
  return c;
}

}  // namespace qtally::tomo
