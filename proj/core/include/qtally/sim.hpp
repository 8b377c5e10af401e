#pragma once

// Dense statevector simulator with an always-on gate-count ledger.
//
// Conventions (fixed project-wide):
//   * little-endian: qubit 0 is the least significant bit of a basis index;
//   * registers partition qubits in declaration order, first register at
//     the low end;
//   * states are compared by fidelity |<a|b>|^2, never componentwise.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qtally {

using cxd = std::complex<double>;

/// Unitarity check tolerance (max-norm of U^dag U - I).
inline constexpr double kUnitarityTol = 1e-10;
/// Allowed relative norm drift of a state across one gate application.
inline constexpr double kNormTol = 1e-12;
/// Below this branch probability post-selection counts as failed heralding.
inline constexpr double kHeraldFloor = 1e-300;

/// Thrown when a post-selection branch is numerically empty.
class HeraldingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Register layout

struct Register {
  std::string name;
  int width = 0;

  bool operator==(const Register&) const = default;
};

class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> regs);

  int total_qubits() const { return total_; }
  std::size_t dim() const { return std::size_t{1} << total_; }
  const std::vector<Register>& registers() const { return regs_; }

  bool has(std::string_view name) const;
  /// Index of the register's first (least significant) qubit.
  int offset(std::string_view name) const;
  int width(std::string_view name) const;

  /// Layout with one register removed; relative order of the rest is kept.
  RegisterLayout without(std::string_view name) const;

  bool operator==(const RegisterLayout&) const = default;

 private:
  const Register& find(std::string_view name) const;

  std::vector<Register> regs_;
  int total_ = 0;
};

/// Renders a basis index as per-register bitstrings, most significant bit
/// first within each register, registers in declaration order.
std::string format_bitstring(const RegisterLayout& layout, std::uint64_t index);

// ---------------------------------------------------------------------------
// Gate operations

struct GateOp {
  enum class Kind {
    kSingle,           // 2x2 unitary on one qubit
    kControlledSingle, // 2x2 unitary, conditioned on a control pattern
    kBlock,            // 2^w x 2^w unitary on a whole register
    kControlledBlock,  // block unitary conditioned on a control pattern
  };

  Kind kind = Kind::kSingle;
  Eigen::MatrixXcd matrix;
  int target = -1;             // kSingle / kControlledSingle
  std::string reg;             // kBlock / kControlledBlock
  std::vector<int> controls;   // absolute qubit indices
  std::vector<bool> control_values;  // parallel to controls; default all-ones
  std::string label;
  // Pinned decomposition count for ops whose standard circuit realization is
  // known (QFT, conditioned evolution powers); overrides the generic rule.
  std::optional<std::int64_t> cost_override;

  static GateOp single(int target, const Eigen::Matrix2cd& u, std::string label);
  static GateOp controlled_single(std::vector<int> controls, int target,
                                  const Eigen::Matrix2cd& u, std::string label);
  static GateOp controlled_single(std::vector<int> controls,
                                  std::vector<bool> values, int target,
                                  const Eigen::Matrix2cd& u, std::string label);
  static GateOp block(std::string reg, Eigen::MatrixXcd u, std::string label);
  static GateOp controlled_block(std::vector<int> controls, std::string reg,
                                 Eigen::MatrixXcd u, std::string label);
  static GateOp controlled_block(std::vector<int> controls,
                                 std::vector<bool> values, std::string reg,
                                 Eigen::MatrixXcd u, std::string label);

  /// Width of the block register in qubits (kBlock / kControlledBlock).
  int block_width() const;
};

/// Elementary-gate cost of one op under the project cost rule:
///   single-qubit            -> 1
///   controlled^k single     -> k^2            (k >= 1)
///   block on w qubits       -> 2^(w+1)
///   controlled^k block on w -> (k+w-1)^2 * 2^(w+1)
/// An explicit cost_override (pinned decomposition count) wins over the rule.
std::int64_t elementary_cost(const GateOp& op);

/// Max-norm deviation of U from unitarity, ||U^dag U - I||_max.
double unitarity_defect(const Eigen::MatrixXcd& u);

// ---------------------------------------------------------------------------
// Gate-count ledger

struct LabelCount {
  std::int64_t raw = 0;
  std::int64_t elementary = 0;
};

struct GateCountLedger {
  std::int64_t raw_ops = 0;
  std::int64_t elementary_count = 0;
  std::map<std::string, LabelCount> per_label;

  void record(const std::string& label, std::int64_t elementary);
  GateCountLedger& operator+=(const GateCountLedger& other);

  /// Sum of elementary counts over labels starting with `prefix`.
  std::int64_t elementary_for_prefix(std::string_view prefix) const;
};

// ---------------------------------------------------------------------------
// Circuit

struct Circuit {
  RegisterLayout layout;
  std::vector<GateOp> ops;

  explicit Circuit(RegisterLayout l) : layout(std::move(l)) {}

  /// Validates the op against the layout (bounds, overlap, unitarity)
  /// and appends it.
  void push(GateOp op);

  /// Total elementary cost of all ops.
  std::int64_t elementary_total() const;
};

/// QFT on one register as a single op. Applies the 2^w-point DFT,
/// QFT|j> = 2^(-w/2) sum_k exp(2*pi*i*j*k/2^w) |k>, and carries the pinned
/// ledger count of the standard decomposition, w(w+1)/2 + floor(w/2).
GateOp qft_op(const RegisterLayout& layout, std::string_view reg);
GateOp iqft_op(const RegisterLayout& layout, std::string_view reg);

// ---------------------------------------------------------------------------
// State vector

class StateVector {
 public:
  /// |0...0> on the given layout.
  explicit StateVector(RegisterLayout layout);
  /// Basis state |index>.
  static StateVector basis(RegisterLayout layout, std::uint64_t index);
  /// State with explicit amplitudes (must have length layout.dim()).
  static StateVector from_amplitudes(RegisterLayout layout, Eigen::VectorXcd amps);

  const RegisterLayout& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& mutable_amplitudes() { return amps_; }
  double norm() const { return amps_.norm(); }

  const GateCountLedger& ledger() const { return ledger_; }
  GateCountLedger& ledger() { return ledger_; }

 private:
  RegisterLayout layout_;
  Eigen::VectorXcd amps_;
  GateCountLedger ledger_;
};

/// Applies one op; increments the state's ledger; checks norm preservation.
void apply(StateVector& state, const GateOp& op);
/// Applies all ops of a circuit in order.
void apply(StateVector& state, const Circuit& circuit);

void qft(StateVector& state, std::string_view reg);
void iqft(StateVector& state, std::string_view reg);

struct PostSelectResult {
  StateVector state;   // renormalized, measured register removed
  double probability;  // exact branch probability
};

/// Projects `reg` onto basis value `outcome` and renormalizes. The returned
/// state lives on the layout with `reg` removed; the ledger carries over.
PostSelectResult post_select(const StateVector& state, std::string_view reg,
                             std::uint64_t outcome);
/// Bitstring overload; most significant bit first ("01" = 1 on a 2-qubit reg).
PostSelectResult post_select(const StateVector& state, std::string_view reg,
                             std::string_view outcome_bits);

/// Probability of each basis outcome of `reg` (marginal over the rest).
std::vector<double> register_probabilities(const StateVector& state,
                                           std::string_view reg);

/// Deterministic measurement sampling: i.i.d. draws from |amplitude|^2.
/// The same (state, shots, seed) triple always yields the same histogram.
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state,
                                              std::int64_t shots,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Small helpers shared across modules

/// |<a|b>|^2 for arbitrary nonzero vectors (normalizes internally).
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// The full-space matrix a circuit applies to |0...0>-spanned basis states.
/// Intended for desk-scale layouts only.
Eigen::MatrixXcd net_unitary(const Circuit& circuit);

/// Copies single-qubit ops of `src` (a standalone prep circuit) into `dst`
/// with all qubit indices shifted by `offset`. When `extra_control` is given,
/// every op additionally becomes conditioned on that (qubit, value) pair.
void embed(Circuit& dst, const Circuit& src, int offset,
           std::optional<std::pair<int, bool>> extra_control,
           const std::string& label_prefix);

namespace gates {

Eigen::Matrix2cd identity2();
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd hadamard();
/// [[cos a, -sin a], [sin a, cos a]]; a is the full rotation angle.
Eigen::Matrix2cd rotation_y(double angle);
/// diag(exp(-i a/2), exp(i a/2)).
Eigen::Matrix2cd rotation_z(double angle);
/// diag(1, exp(i a)).
Eigen::Matrix2cd phase(double angle);
/// 2^w-point DFT matrix, F[j][k] = 2^(-w/2) exp(2 pi i j k / 2^w).
Eigen::MatrixXcd dft(int width);

}  // namespace gates

}  // namespace qtally
