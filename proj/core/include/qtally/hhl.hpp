#pragma once

// Three-stage HHL linear-system solver: conditioned Hamiltonian evolution
// with inverse QFT (phase estimation), eigenvalue-conditioned rotation of the
// flag qubit, uncomputation, heralding on flag = 1. Hamiltonian simulation is
// exact (eigendecomposition); the s-sparse figure enters cost reports only.

#include <cstdint>

#include <Eigen/Dense>

#include "qtally/complexity.hpp"
#include "qtally/sim.hpp"

namespace qtally::hhl {

struct HhlProblem {
  Eigen::MatrixXcd A;   // Hermitian, nonsingular, N x N
  Eigen::VectorXcd b;   // right-hand side, normalized
  int m = 2;            // eigenvalue register width
  double t0 = 0;        // evolution time scale; <= 0 requests the default
  double Cconst = 0;    // rotation constant; <= 0 requests min lambda~
};

/// t0 making the largest scaled eigenvalue land on 2^m - 1.
double default_t0(const Eigen::MatrixXcd& a, int m);

/// Problem with defaults resolved: t0 (if <= 0) and Cconst = min lambda~
/// (if <= 0). Throws if the scaled spectrum leaves (0, 2^m) or
/// Cconst > min lambda~.
HhlProblem resolved(const HhlProblem& p);

/// Eigenvalues scaled to the register encoding, lambda * t0 / (2 pi).
Eigen::VectorXd scaled_eigenvalues(const HhlProblem& p);

/// Problem with the spectrum snapped to the nearest integers of the m-bit
/// grid (clamped to [1, 2^m - 1]); eigenvectors are kept.
HhlProblem snap_spectrum(const HhlProblem& p);

/// Layout (flag: 1, clock: m, work: log2 N).
Circuit build_hhl_circuit(const HhlProblem& p);

struct HhlResult {
  Eigen::VectorXcd state;         // heralded work state, normalized
  double herald_prob = 0;         // probability of flag = 1
  double fidelity_vs_oracle = 0;  // against normalize(A^-1 b)
  double clock_residual = 0;      // population of clock off |0...0> after stage 3
  GateCountLedger ledger;
};

HhlResult run_hhl(const HhlProblem& p);

/// Analytic herald probability sum_j |Cconst beta_j / lambda~_j|^2
/// (exact-spectrum case).
double herald_probability(const HhlProblem& p);

/// normalize(A^-1 b).
Eigen::VectorXcd solve_oracle(const HhlProblem& p);

/// m^2 + s^2 t log(N) + log(N); the ledger formula, not a measured count.
inline complexity::EvaluatedTerm hhl_gate_complexity(int m, double s, double t,
                                                     int N) {
  return complexity::hhl_algo_term(m, s, t, N);
}

}  // namespace qtally::hhl
