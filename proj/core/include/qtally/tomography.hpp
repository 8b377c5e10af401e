#pragma once

// Pure-state tomography sample budgets: the Chernoff-style planner
// M_m = ceil(p_m^-1 * 3/delta^2 * ln(1/eps)), Monte Carlo verification of its
// coverage guarantee, and per-scheme readout cost models.

#include <cstdint>
#include <vector>

#include "qtally/complexity.hpp"
#include "qtally/sim.hpp"

namespace qtally::tomo {

enum class QstScheme : int {
  kSqst,
  kAaptJsm,
  kAaptMubNonlocal,
  kAaptMubLocal,
  kAaptPovm,
  kCompressedSensing,
  kQpca,
  kLinearRegression,
};

std::string scheme_name(QstScheme scheme);

/// C(delta, eps) = 3/delta^2 * ln(1/eps); natural log, size-independent.
double chernoff_prefactor(double delta, double epsilon);

struct TomographyPlan {
  double delta;
  double epsilon;
  std::vector<double> probs;  // target outcome probabilities, all > 0

  TomographyPlan(double delta, double epsilon, std::vector<double> probs);
};

struct SampleBudget {
  std::vector<std::int64_t> budgets;  // minimal integer M_m per outcome
  std::vector<double> raw;            // pre-ceiling values p_m^-1 C(delta,eps)
  std::int64_t max_budget = 0;        // M = max_m M_m
};

SampleBudget sample_bound(const TomographyPlan& plan);

/// Outcome support of a state: basis indices with nonzero probability.
struct Support {
  std::vector<std::uint64_t> indices;
  std::vector<double> probs;
};
Support state_support(const StateVector& state);

struct CoverageOutcome {
  std::uint64_t index = 0;
  double prob = 0;
  std::int64_t budget = 0;
  double coverage = 0;  // fraction of trials with relative error <= delta
  bool pass = false;
};

struct CoverageReport {
  std::vector<CoverageOutcome> outcomes;
  double threshold = 0;  // 1 - eps - 3*sqrt(eps*(1-eps)/trials)
  bool all_pass = false;
};

/// Runs `trials` independent estimation rounds. Each round draws max(M_m)
/// measurements with a per-trial derived seed and estimates every p_m from
/// its first M_m draws. `budgets` aligns with state_support(state).
/// Trials depend only on (seed, trial index), so any execution order
/// reproduces the serial result.
CoverageReport verify_coverage(const StateVector& state,
                               const std::vector<std::int64_t>& budgets,
                               int trials, std::uint64_t seed, double delta,
                               double epsilon);

struct QstCost {
  complexity::Term copies;
  complexity::Term gates_per_measurement;
  complexity::Term overall;  // copies x gates-per-measurement
};

/// Copies / gates-per-measurement / overall cost model of a readout scheme.
/// Rank-dependent schemes carry the rank symbolically (atom R).
QstCost qst_cost(QstScheme scheme);

}  // namespace qtally::tomo
