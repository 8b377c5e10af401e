#include "qtally/hhl.hpp"

#include <cmath>
#include <numbers>

#include "qtally/prep.hpp"

namespace qtally::hhl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHermTol = 1e-10;

int log2_exact(Eigen::Index n) {
  int bits = 0;
  while ((Eigen::Index{1} << bits) < n) ++bits;
  if ((Eigen::Index{1} << bits) != n) {
    throw std::invalid_argument("system dimension must be a power of two");
  }
  return bits;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigensolve(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("A must be square");
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
    throw std::invalid_argument("A is not Hermitian");
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a);
}

void validate(const HhlProblem& p) {
  log2_exact(p.A.rows());
  if (p.b.size() != p.A.rows()) throw std::invalid_argument("b does not match A");
  if (std::abs(p.b.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("b must be normalized");
  }
  if (p.m < 1) throw std::invalid_argument("eigenvalue register needs m >= 1");
  if (!(p.t0 > 0)) throw std::invalid_argument("t0 must be positive");

  const Eigen::VectorXd lam = scaled_eigenvalues(p);
  const double grid = static_cast<double>(std::int64_t{1} << p.m);
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    if (!(lam[j] > 0.0) || !(lam[j] < grid)) {
      throw std::invalid_argument("scaled eigenvalue " + std::to_string(lam[j]) +
                                  " outside (0, 2^m)");
    }
  }
  if (!(p.Cconst > 0) || p.Cconst > lam.minCoeff() + 1e-12) {
    if (!(p.Cconst > 0) || p.Cconst > lam.minCoeff()) {
      throw std::invalid_argument("Cconst must lie in (0, min scaled eigenvalue]");
    }
  }
}

// exp(i A tau) for Hermitian A.
Eigen::MatrixXcd hermitian_exp(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& es,
                               double tau) {
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases[j] = std::exp(cxd(0, es.eigenvalues()[j] * tau));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double default_t0(const Eigen::MatrixXcd& a, int m) {
  const auto es = eigensolve(a);
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0)) {
    throw std::invalid_argument("spectrum must be positive to pick a default t0");
  }
  const double top = static_cast<double>((std::int64_t{1} << m) - 1);
  return 2.0 * kPi * top / lmax;
}

HhlProblem resolved(const HhlProblem& p) {
  HhlProblem r = p;
  if (!(r.t0 > 0)) r.t0 = default_t0(r.A, r.m);
  if (!(r.Cconst > 0)) r.Cconst = scaled_eigenvalues(r).minCoeff();
  validate(r);
  return r;
}

Eigen::VectorXd scaled_eigenvalues(const HhlProblem& p) {
  const auto es = eigensolve(p.A);
  return es.eigenvalues() * (p.t0 / (2.0 * kPi));
}

HhlProblem snap_spectrum(const HhlProblem& p) {
  HhlProblem r = p;
  if (!(r.t0 > 0)) r.t0 = default_t0(r.A, r.m);
  const auto es = eigensolve(r.A);
  const double top = static_cast<double>((std::int64_t{1} << r.m) - 1);
  Eigen::VectorXd snapped(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < snapped.size(); ++j) {
    const double scaled = es.eigenvalues()[j] * r.t0 / (2.0 * kPi);
    snapped[j] = std::clamp(std::round(scaled), 1.0, top);
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(r.A.rows(), r.A.cols());
  for (Eigen::Index j = 0; j < snapped.size(); ++j) {
    a += (snapped[j] * 2.0 * kPi / r.t0) * es.eigenvectors().col(j) *
         es.eigenvectors().col(j).adjoint();
  }
  r.A = a;
  return r;
}

Circuit build_hhl_circuit(const HhlProblem& p) {
  validate(p);
  const int n = log2_exact(p.A.rows());
  const int m = p.m;
  const std::int64_t grid = std::int64_t{1} << m;
  const auto es = eigensolve(p.A);

  Circuit circuit(RegisterLayout({{"flag", 1}, {"clock", m}, {"work", n}}));
  const int work_offset = 1 + m;
  std::vector<int> clock_qubits;
  for (int b = 0; b < m; ++b) clock_qubits.push_back(1 + b);

  // Stage 1: prepare |b>, spread the clock, conditioned evolution, inverse QFT.
  const Circuit bprep = prep::synthesize_prep(prep::TargetState::normalized(p.b));
  embed(circuit, bprep, work_offset, std::nullopt, "stage1:B:");
  for (int q : clock_qubits) {
    circuit.push(GateOp::single(q, gates::hadamard(), "stage1:H"));
  }
  for (int b = 0; b < m; ++b) {
    const double tau = p.t0 * static_cast<double>(std::int64_t{1} << b) /
                       static_cast<double>(grid);
    circuit.push(GateOp::controlled_block({clock_qubits[b]}, "work",
                                          hermitian_exp(es, tau), "stage1:cUA"));
  }
  circuit.push(iqft_op(circuit.layout, "clock"));

  // Stage 2: rotation of the flag conditioned on each representable
  // eigenvalue pattern; values below Cconst have no valid angle and are not
  // inverted.
  for (std::int64_t v = 1; v < grid; ++v) {
    const double ratio = p.Cconst / static_cast<double>(v);
    if (ratio > 1.0) continue;
    const double sin_t = ratio;
    const double cos_t = std::sqrt(1.0 - sin_t * sin_t);
    Eigen::Matrix2cd rot;
    rot << cos_t, -sin_t, sin_t, cos_t;
    std::vector<bool> pattern;
    for (int b = 0; b < m; ++b) pattern.push_back((v >> b) & 1);
    circuit.push(GateOp::controlled_single(clock_qubits, pattern, 0, rot,
                                           "stage2:cry"));
  }

  // Stage 3: undo phase estimation.
  circuit.push(qft_op(circuit.layout, "clock"));
  for (int b = 0; b < m; ++b) {
    const double tau = p.t0 * static_cast<double>(std::int64_t{1} << b) /
                       static_cast<double>(grid);
    circuit.push(GateOp::controlled_block({clock_qubits[b]}, "work",
                                          hermitian_exp(es, -tau), "stage3:cUA+"));
  }
  for (int q : clock_qubits) {
    circuit.push(GateOp::single(q, gates::hadamard(), "stage3:H"));
  }
  return circuit;
}

HhlResult run_hhl(const HhlProblem& p) {
  const Circuit circuit = build_hhl_circuit(p);
  StateVector s(circuit.layout);
  apply(s, circuit);

  HhlResult result;
  const std::vector<double> clock_probs = register_probabilities(s, "clock");
  double residual = 0;
  for (std::size_t v = 1; v < clock_probs.size(); ++v) residual += clock_probs[v];
  result.clock_residual = residual;

  const PostSelectResult flag_one = post_select(s, "flag", std::uint64_t{1});
  result.herald_prob = flag_one.probability;
  const PostSelectResult clock_zero =
      post_select(flag_one.state, "clock", std::uint64_t{0});
  result.state = clock_zero.state.amplitudes();
  result.ledger = clock_zero.state.ledger();
  result.fidelity_vs_oracle = fidelity(result.state, solve_oracle(p));
  return result;
}

double herald_probability(const HhlProblem& p) {
  validate(p);
  const auto es = eigensolve(p.A);
  const Eigen::VectorXd lam = scaled_eigenvalues(p);
  const Eigen::VectorXcd beta = es.eigenvectors().adjoint() * p.b;
  double prob = 0;
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    prob += std::norm(beta[j]) * (p.Cconst / lam[j]) * (p.Cconst / lam[j]);
  }
  return prob;
}

Eigen::VectorXcd solve_oracle(const HhlProblem& p) {
  const Eigen::VectorXcd x = p.A.fullPivLu().solve(p.b);
  const double n = x.norm();
  if (!(n > 0)) throw std::invalid_argument("A^-1 b vanished; A singular?");
  return x / n;
}

}  // namespace qtally::hhl
