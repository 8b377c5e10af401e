#pragma once

// Taylor-series solver for dx/dt = M x + b with unitary A = M/||M||:
// ancilla-controlled encoding of the truncated series, evolution by powers
// of A, decoding, and post-selection on the all-zero ancillas. Classical
// oracles (truncated series and exact solution) back every circuit check.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qtally/complexity.hpp"
#include "qtally/sim.hpp"

namespace qtally::lde {

struct LdeProblem {
  Eigen::MatrixXcd M;   // N x N, N a power of two
  Eigen::VectorXcd b;   // may be zero
  Eigen::VectorXcd x0;  // initial condition
  double t = 0;         // evolution time, > 0
  int k = 1;            // Taylor truncation order, >= 1
};

/// Largest singular value of M.
double spectral_norm(const Eigen::MatrixXcd& m);

/// Checks dimensions, t > 0, k >= 1, ||M|| > 0; throws std::invalid_argument.
void validate(const LdeProblem& p);

struct TaylorCoefficients {
  std::vector<double> C;  // C_0 .. C_k, C_m = ||x0|| (||M|| t)^m / m!
  std::vector<double> D;  // D_1 .. D_k, D_n = ||b|| (||M|| t)^(n-1) t / n!
  double Cbar = 0;        // sqrt(sum C_m)
  double Dbar = 0;        // sqrt(sum D_n)
  double Nnorm = 0;       // Nnorm^2 = Cbar^2 + Dbar^2

  double nnorm4() const { return Nnorm * Nnorm * Nnorm * Nnorm; }
};

TaylorCoefficients taylor_coeffs(const LdeProblem& p);
/// Raw overload; accepts k = 0 (then D is empty).
TaylorCoefficients taylor_coeffs(double norm_x0, double norm_b, double norm_m,
                                 double t, int k);

struct EncodingGates {
  Eigen::Matrix2cd V;    // branch-selector gate, V|0> = (Cbar|0> + Dbar|1>)/Nnorm
  Eigen::MatrixXcd VS1;  // first column sqrt(C_m)/Cbar, seeded completion
  Eigen::MatrixXcd VS2;  // first column sqrt(D_n)/Dbar (shifted), completion
  int taylor_qubits = 1; // T = ceil(log2(k+1))
};

/// Builds the encoding gates; completion columns are deterministic in `seed`.
EncodingGates build_encoding(const TaylorCoefficients& tc, std::uint64_t seed);

/// Circuit on layout (branch: 1, taylor: T, work: log2 N). Requires A unitary.
/// The conditioned evolution ops carry the pinned per-op decomposition count
/// T * log2(N), so the evolution-stage ledger totals k*log2(k+1)*log2(N).
Circuit build_circuit(const LdeProblem& p, const EncodingGates& g);

struct LdeResult {
  Eigen::VectorXcd state;       // heralded work-register state, normalized
  double success_prob = 0;      // joint probability of all-zero ancillas
  double fidelity_vs_taylor = 0;
  GateCountLedger ledger;
};

/// Full pipeline: encode, evolve, decode, post-select both ancilla registers.
LdeResult run(const LdeProblem& p, std::uint64_t seed);

/// Truncated series sum_{m<=k} (Mt)^m/m! x0 + sum_{1<=n<=k} M^(n-1) t^n/n! b.
Eigen::VectorXcd classical_taylor(const LdeProblem& p);
/// Exact solution e^(Mt) x0 + (e^(Mt)-I) M^-1 b; the b part is evaluated via
/// the always-defined series, so singular M is fine at moderate ||M||t.
Eigen::VectorXcd classical_exact(const LdeProblem& p);

/// Analytic truncation bound on ||classical_taylor - classical_exact||.
double truncation_bound(const LdeProblem& p);

/// Finite-difference 1-d diffusion operator N^2 * tridiag(1, -2, 1).
Eigen::MatrixXcd diffusion_matrix(int N);
/// Its spectral norm, N^2 * 2 (1 - cos(N pi / (N+1))).
double diffusion_norm(int N);

struct ScalingPoint {
  int N = 0;
  double success_prob = 0;
  double copies_bound = 0;  // p^-1 * N * C(delta, eps)
};

struct ScalingStudy {
  std::vector<ScalingPoint> points;
  double slope = 0;            // least-squares slope of log p vs log N
  double copies_exponent = 0;  // slope of log copies_bound vs log N
};

/// Success-probability scaling of the diffusion example: x0 = all-ones,
/// b = 0, fixed t. p(N) = ||x(t)||^2 / Nnorm^4 with the exact solution norm
/// and the order-k series normalization.
ScalingStudy success_scaling(int k, double t, const std::vector<int>& Ns,
                             double delta = 0.1, double epsilon = 0.05);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// k^2 + log(N) + k log(k) log(N), evaluated with unit constants.
inline complexity::EvaluatedTerm lde_gate_complexity(int k, int N) {
  return complexity::lde_algo_term(k, N);
}

}  // namespace qtally::lde
