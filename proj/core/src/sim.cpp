#include "qtally/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace qtally {

namespace {

constexpr double kPi = std::numbers::pi;

void check_unitary(const Eigen::MatrixXcd& u, const std::string& label) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw std::invalid_argument("gate '" + label + "': matrix not square");
  }
  if ((u.rows() & (u.rows() - 1)) != 0) {
    throw std::invalid_argument("gate '" + label +
                                "': dimension is not a power of two");
  }
  const double defect = unitarity_defect(u);
  if (!(defect <= kUnitarityTol)) {
    throw std::invalid_argument("gate '" + label + "': matrix is not unitary (defect " +
                                std::to_string(defect) + ")");
  }
}

// Uniform double in [0,1) from the top 53 bits of the engine output; keeps
// the sampling stream independent of library distribution internals.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// RegisterLayout

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
  std::set<std::string> names;
  for (const auto& r : regs_) {
    if (r.width < 1) {
      throw std::invalid_argument("register '" + r.name + "' has width < 1");
    }
    if (!names.insert(r.name).second) {
      throw std::invalid_argument("duplicate register name '" + r.name + "'");
    }
    total_ += r.width;
  }
  if (total_ < 1) throw std::invalid_argument("layout needs at least one qubit");
  if (total_ > 30) throw std::invalid_argument("layout too wide for dense simulation");
}

const Register& RegisterLayout::find(std::string_view name) const {
  for (const auto& r : regs_) {
    if (r.name == name) return r;
  }
  throw std::invalid_argument("unknown register '" + std::string(name) + "'");
}

bool RegisterLayout::has(std::string_view name) const {
  return std::any_of(regs_.begin(), regs_.end(),
                     [&](const Register& r) { return r.name == name; });
}

int RegisterLayout::offset(std::string_view name) const {
  int off = 0;
  for (const auto& r : regs_) {
    if (r.name == name) return off;
    off += r.width;
  }
  throw std::invalid_argument("unknown register '" + std::string(name) + "'");
}

int RegisterLayout::width(std::string_view name) const { return find(name).width; }

RegisterLayout RegisterLayout::without(std::string_view name) const {
  find(name);  // throws if absent
  std::vector<Register> rest;
  for (const auto& r : regs_) {
    if (r.name != name) rest.push_back(r);
  }
  if (rest.empty()) {
    throw std::invalid_argument("cannot remove the only register");
  }
  return RegisterLayout(rest);
}

std::string format_bitstring(const RegisterLayout& layout, std::uint64_t index) {
  std::string out;
  int off = 0;
  for (const auto& r : layout.registers()) {
    if (!out.empty()) out += '|';
    std::string bits(r.width, '0');
    for (int b = 0; b < r.width; ++b) {
      if ((index >> (off + b)) & 1u) bits[r.width - 1 - b] = '1';
    }
    out += bits;
    off += r.width;
  }
  return out;
}

// ---------------------------------------------------------------------------
// GateOp

GateOp GateOp::single(int target, const Eigen::Matrix2cd& u, std::string label) {
  GateOp op;
  op.kind = Kind::kSingle;
  op.matrix = u;
  op.target = target;
  op.label = std::move(label);
  check_unitary(op.matrix, op.label);
  return op;
}

GateOp GateOp::controlled_single(std::vector<int> controls, int target,
                                 const Eigen::Matrix2cd& u, std::string label) {
  return controlled_single(std::move(controls), {}, target, u, std::move(label));
}

GateOp GateOp::controlled_single(std::vector<int> controls, std::vector<bool> values,
                                 int target, const Eigen::Matrix2cd& u,
                                 std::string label) {
  GateOp op;
  op.kind = Kind::kControlledSingle;
  op.matrix = u;
  op.target = target;
  op.controls = std::move(controls);
  op.control_values = std::move(values);
  op.label = std::move(label);
  if (op.controls.empty()) {
    throw std::invalid_argument("controlled gate '" + op.label + "' has no controls");
  }
  if (op.control_values.empty()) {
    op.control_values.assign(op.controls.size(), true);
  }
  if (op.control_values.size() != op.controls.size()) {
    throw std::invalid_argument("gate '" + op.label + "': control pattern size mismatch");
  }
  check_unitary(op.matrix, op.label);
  return op;
}

GateOp GateOp::block(std::string reg, Eigen::MatrixXcd u, std::string label) {
  GateOp op;
  op.kind = Kind::kBlock;
  op.matrix = std::move(u);
  op.reg = std::move(reg);
  op.label = std::move(label);
  check_unitary(op.matrix, op.label);
  return op;
}

GateOp GateOp::controlled_block(std::vector<int> controls, std::string reg,
                                Eigen::MatrixXcd u, std::string label) {
  return controlled_block(std::move(controls), {}, std::move(reg), std::move(u),
                          std::move(label));
}

GateOp GateOp::controlled_block(std::vector<int> controls, std::vector<bool> values,
                                std::string reg, Eigen::MatrixXcd u, std::string label) {
  GateOp op;
  op.kind = Kind::kControlledBlock;
  op.matrix = std::move(u);
  op.reg = std::move(reg);
  op.controls = std::move(controls);
  op.control_values = std::move(values);
  op.label = std::move(label);
  if (op.controls.empty()) {
    throw std::invalid_argument("controlled gate '" + op.label + "' has no controls");
  }
  if (op.control_values.empty()) {
    op.control_values.assign(op.controls.size(), true);
  }
  if (op.control_values.size() != op.controls.size()) {
    throw std::invalid_argument("gate '" + op.label + "': control pattern size mismatch");
  }
  check_unitary(op.matrix, op.label);
  return op;
}

int GateOp::block_width() const {
  int w = 0;
  while ((Eigen::Index{1} << w) < matrix.rows()) ++w;
  return w;
}

std::int64_t elementary_cost(const GateOp& op) {
  if (op.cost_override) return *op.cost_override;
  switch (op.kind) {
    case GateOp::Kind::kSingle:
      return 1;
    case GateOp::Kind::kControlledSingle: {
      const std::int64_t k = static_cast<std::int64_t>(op.controls.size());
      return k * k;
    }
    case GateOp::Kind::kBlock: {
      const int w = op.block_width();
      return std::int64_t{1} << (w + 1);
    }
    case GateOp::Kind::kControlledBlock: {
      const std::int64_t k = static_cast<std::int64_t>(op.controls.size());
      const int w = op.block_width();
      return (k + w - 1) * (k + w - 1) * (std::int64_t{1} << (w + 1));
    }
  }
  return 1;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// GateCountLedger

void GateCountLedger::record(const std::string& label, std::int64_t elementary) {
  raw_ops += 1;
  elementary_count += elementary;
  auto& lc = per_label[label];
  lc.raw += 1;
  lc.elementary += elementary;
}

GateCountLedger& GateCountLedger::operator+=(const GateCountLedger& other) {
  raw_ops += other.raw_ops;
  elementary_count += other.elementary_count;
  for (const auto& [label, lc] : other.per_label) {
    per_label[label].raw += lc.raw;
    per_label[label].elementary += lc.elementary;
  }
  return *this;
}

std::int64_t GateCountLedger::elementary_for_prefix(std::string_view prefix) const {
  std::int64_t total = 0;
  for (const auto& [label, lc] : per_label) {
    if (label.size() >= prefix.size() &&
        std::string_view(label).substr(0, prefix.size()) == prefix) {
      total += lc.elementary;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Circuit

namespace {

void validate_op(const RegisterLayout& layout, const GateOp& op) {
  const int n = layout.total_qubits();
  auto check_qubit = [&](int q) {
    if (q < 0 || q >= n) {
      throw std::invalid_argument("gate '" + op.label + "': qubit index " +
                                  std::to_string(q) + " out of range");
    }
  };

  std::set<int> touched;
  if (op.kind == GateOp::Kind::kSingle || op.kind == GateOp::Kind::kControlledSingle) {
    check_qubit(op.target);
    touched.insert(op.target);
    if (op.matrix.rows() != 2) {
      throw std::invalid_argument("gate '" + op.label + "': expected a 2x2 matrix");
    }
  } else {
    const int off = layout.offset(op.reg);
    const int w = layout.width(op.reg);
    if (op.matrix.rows() != (Eigen::Index{1} << w)) {
      throw std::invalid_argument("gate '" + op.label +
                                  "': block dimension does not match register width");
    }
    for (int b = 0; b < w; ++b) touched.insert(off + b);
  }
  std::set<int> ctrl_seen;
  for (int c : op.controls) {
    check_qubit(c);
    if (touched.count(c)) {
      throw std::invalid_argument("gate '" + op.label +
                                  "': control overlaps the target");
    }
    if (!ctrl_seen.insert(c).second) {
      throw std::invalid_argument("gate '" + op.label + "': duplicate control qubit");
    }
  }
}

}  // namespace

void Circuit::push(GateOp op) {
  validate_op(layout, op);
  ops.push_back(std::move(op));
}

std::int64_t Circuit::elementary_total() const {
  std::int64_t total = 0;
  for (const auto& op : ops) total += elementary_cost(op);
  return total;
}

GateOp qft_op(const RegisterLayout& layout, std::string_view reg) {
  const int w = layout.width(reg);
  GateOp op = GateOp::block(std::string(reg), gates::dft(w),
                            "qft(" + std::string(reg) + ")");
  op.cost_override = std::int64_t{w} * (w + 1) / 2 + w / 2;
  return op;
}

GateOp iqft_op(const RegisterLayout& layout, std::string_view reg) {
  const int w = layout.width(reg);
  GateOp op = GateOp::block(std::string(reg), gates::dft(w).adjoint(),
                            "iqft(" + std::string(reg) + ")");
  op.cost_override = std::int64_t{w} * (w + 1) / 2 + w / 2;
  return op;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(RegisterLayout layout) : layout_(std::move(layout)) {
  amps_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout_.dim()));
  amps_[0] = 1.0;
}

StateVector StateVector::basis(RegisterLayout layout, std::uint64_t index) {
  StateVector s(std::move(layout));
  if (index >= s.layout_.dim()) {
    throw std::invalid_argument("basis index out of range");
  }
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(RegisterLayout layout, Eigen::VectorXcd amps) {
  StateVector s(std::move(layout));
  if (amps.size() != static_cast<Eigen::Index>(s.layout_.dim())) {
    throw std::invalid_argument("amplitude vector length does not match layout");
  }
  s.amps_ = std::move(amps);
  return s;
}

// ---------------------------------------------------------------------------
// Gate application kernels

namespace {

bool controls_match(std::uint64_t idx, const std::vector<int>& controls,
                    const std::vector<bool>& values) {
  for (std::size_t i = 0; i < controls.size(); ++i) {
    const bool bit = (idx >> controls[i]) & 1u;
    if (bit != values[i]) return false;
  }
  return true;
}

void apply_single(Eigen::VectorXcd& amps, const Eigen::MatrixXcd& u, int target,
                  const std::vector<int>& controls, const std::vector<bool>& values) {
  const std::uint64_t dim = static_cast<std::uint64_t>(amps.size());
  const std::uint64_t tbit = std::uint64_t{1} << target;
  const cxd u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    if (idx & tbit) continue;
    if (!controls.empty() && !controls_match(idx, controls, values)) continue;
    const cxd a0 = amps[static_cast<Eigen::Index>(idx)];
    const cxd a1 = amps[static_cast<Eigen::Index>(idx | tbit)];
    amps[static_cast<Eigen::Index>(idx)] = u00 * a0 + u01 * a1;
    amps[static_cast<Eigen::Index>(idx | tbit)] = u10 * a0 + u11 * a1;
  }
}

void apply_block(Eigen::VectorXcd& amps, const Eigen::MatrixXcd& u, int offset, int width,
                 const std::vector<int>& controls, const std::vector<bool>& values) {
  const std::uint64_t dim = static_cast<std::uint64_t>(amps.size());
  const std::uint64_t wdim = std::uint64_t{1} << width;
  const std::uint64_t low_mask = (std::uint64_t{1} << offset) - 1;
  const std::uint64_t step = std::uint64_t{1} << offset;
  Eigen::VectorXcd scratch(static_cast<Eigen::Index>(wdim));
  // Enumerate all indices with the register bits zeroed.
  for (std::uint64_t hi = 0; hi < (dim >> (offset + width)); ++hi) {
    for (std::uint64_t lo = 0; lo <= low_mask; ++lo) {
      const std::uint64_t base = (hi << (offset + width)) | lo;
      if (!controls.empty() && !controls_match(base, controls, values)) continue;
      for (std::uint64_t r = 0; r < wdim; ++r) {
        scratch[static_cast<Eigen::Index>(r)] =
            amps[static_cast<Eigen::Index>(base | (r * step))];
      }
      for (std::uint64_t r = 0; r < wdim; ++r) {
        cxd acc = 0.0;
        for (std::uint64_t c = 0; c < wdim; ++c) {
          acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                 scratch[static_cast<Eigen::Index>(c)];
        }
        amps[static_cast<Eigen::Index>(base | (r * step))] = acc;
      }
    }
  }
}

}  // namespace

void apply(StateVector& state, const GateOp& op) {
  validate_op(state.layout(), op);
  Eigen::VectorXcd& amps = state.mutable_amplitudes();
  const double norm_before = amps.norm();

  switch (op.kind) {
    case GateOp::Kind::kSingle:
    case GateOp::Kind::kControlledSingle:
      apply_single(amps, op.matrix, op.target, op.controls, op.control_values);
      break;
    case GateOp::Kind::kBlock:
    case GateOp::Kind::kControlledBlock:
      apply_block(amps, op.matrix, state.layout().offset(op.reg),
                  state.layout().width(op.reg), op.controls, op.control_values);
      break;
  }

  const double drift = std::abs(amps.norm() - norm_before);
  if (!(drift <= kNormTol * std::max(1.0, norm_before))) {
    throw std::runtime_error("gate '" + op.label + "': norm drift " +
                             std::to_string(drift));
  }
  state.ledger().record(op.label, elementary_cost(op));
}

void apply(StateVector& state, const Circuit& circuit) {
  if (!(state.layout() == circuit.layout)) {
    throw std::invalid_argument("circuit layout does not match state layout");
  }
  for (const auto& op : circuit.ops) apply(state, op);
}

void qft(StateVector& state, std::string_view reg) {
  apply(state, qft_op(state.layout(), reg));
}

void iqft(StateVector& state, std::string_view reg) {
  apply(state, iqft_op(state.layout(), reg));
}

// ---------------------------------------------------------------------------
// Measurement

PostSelectResult post_select(const StateVector& state, std::string_view reg,
                             std::uint64_t outcome) {
  const RegisterLayout& layout = state.layout();
  const int off = layout.offset(reg);
  const int w = layout.width(reg);
  if (outcome >= (std::uint64_t{1} << w)) {
    throw std::invalid_argument("post_select outcome out of range for register '" +
                                std::string(reg) + "'");
  }

  const RegisterLayout rest = layout.without(reg);
  Eigen::VectorXcd kept(static_cast<Eigen::Index>(rest.dim()));
  const std::uint64_t low_mask = (std::uint64_t{1} << off) - 1;
  double prob = 0.0;
  for (std::uint64_t r = 0; r < rest.dim(); ++r) {
    const std::uint64_t lo = r & low_mask;
    const std::uint64_t hi = r >> off;
    const std::uint64_t full = (hi << (off + w)) | (outcome << off) | lo;
    const cxd a = state.amplitudes()[static_cast<Eigen::Index>(full)];
    kept[static_cast<Eigen::Index>(r)] = a;
    prob += std::norm(a);
  }
  if (!(prob > kHeraldFloor)) {
    throw HeraldingError("post-selection branch numerically empty (register '" +
                         std::string(reg) + "')");
  }
  kept /= std::sqrt(prob);
  StateVector out = StateVector::from_amplitudes(rest, std::move(kept));
  out.ledger() = state.ledger();
  return PostSelectResult{std::move(out), prob};
}

PostSelectResult post_select(const StateVector& state, std::string_view reg,
                             std::string_view outcome_bits) {
  const int w = state.layout().width(reg);
  if (static_cast<int>(outcome_bits.size()) != w) {
    throw std::invalid_argument("outcome bitstring width does not match register");
  }
  std::uint64_t outcome = 0;
  for (char c : outcome_bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("outcome bitstring must contain only 0/1");
    }
    outcome = (outcome << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return post_select(state, reg, outcome);
}

std::vector<double> register_probabilities(const StateVector& state,
                                           std::string_view reg) {
  const int off = state.layout().offset(reg);
  const int w = state.layout().width(reg);
  std::vector<double> probs(std::size_t{1} << w, 0.0);
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  for (std::uint64_t idx = 0; idx < state.layout().dim(); ++idx) {
    probs[(idx >> off) & mask] += std::norm(state.amplitudes()[static_cast<Eigen::Index>(idx)]);
  }
  return probs;
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state,
                                              std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const std::uint64_t dim = state.layout().dim();
  std::vector<double> cdf(dim);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < dim; ++i) {
    acc += std::norm(state.amplitudes()[static_cast<Eigen::Index>(i)]);
    cdf[i] = acc;
  }
  // Guard against rounding at the top of the CDF.
  cdf[dim - 1] = std::max(cdf[dim - 1], 1.0);

  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = next_uniform(rng) * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    hist[static_cast<std::uint64_t>(it - cdf.begin())] += 1;
  }
  return hist;
}

// ---------------------------------------------------------------------------
// Helpers

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("fidelity of a zero vector is undefined");
  }
  const cxd overlap = a.dot(b) / (na * nb);
  return std::norm(overlap);
}

Eigen::MatrixXcd net_unitary(const Circuit& circuit) {
  const std::uint64_t dim = circuit.layout.dim();
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t j = 0; j < dim; ++j) {
    StateVector s = StateVector::basis(circuit.layout, j);
    apply(s, circuit);
    u.col(static_cast<Eigen::Index>(j)) = s.amplitudes();
  }
  return u;
}

void embed(Circuit& dst, const Circuit& src, int offset,
           std::optional<std::pair<int, bool>> extra_control,
           const std::string& label_prefix) {
  for (const auto& op : src.ops) {
    if (op.kind != GateOp::Kind::kSingle && op.kind != GateOp::Kind::kControlledSingle) {
      throw std::invalid_argument("embed supports single-qubit ops only");
    }
    std::vector<int> controls;
    std::vector<bool> values;
    for (std::size_t i = 0; i < op.controls.size(); ++i) {
      controls.push_back(op.controls[i] + offset);
      values.push_back(op.control_values[i]);
    }
    if (extra_control) {
      controls.push_back(extra_control->first);
      values.push_back(extra_control->second);
    }
    const Eigen::Matrix2cd m = op.matrix;
    if (controls.empty()) {
      dst.push(GateOp::single(op.target + offset, m, label_prefix + op.label));
    } else {
      dst.push(GateOp::controlled_single(controls, values, op.target + offset, m,
                                         label_prefix + op.label));
    }
  }
}

namespace gates {

Eigen::Matrix2cd identity2() { return Eigen::Matrix2cd::Identity(); }

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, cxd(0, -1), cxd(0, 1), 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd m;
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Eigen::Matrix2cd rotation_y(double angle) {
  Eigen::Matrix2cd m;
  m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return m;
}

Eigen::Matrix2cd rotation_z(double angle) {
  Eigen::Matrix2cd m;
  m << std::exp(cxd(0, -angle / 2)), 0, 0, std::exp(cxd(0, angle / 2));
  return m;
}

Eigen::Matrix2cd phase(double angle) {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, std::exp(cxd(0, angle));
  return m;
}

Eigen::MatrixXcd dft(int width) {
  if (width < 1) throw std::invalid_argument("dft width must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << width;
  Eigen::MatrixXcd f(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double phase = 2.0 * kPi * static_cast<double>(j) *
                           static_cast<double>(k) / static_cast<double>(dim);
      f(j, k) = scale * std::exp(cxd(0, phase));
    }
  }
  return f;
}

}  // namespace gates

}  // namespace qtally
