#pragma once

// Arbitrary-amplitude state preparation by direct manipulation (recursive
// amplitude bisection with multiplexed Ry / Rz rotations, no ancillas), plus
// analytical cost models for the qRAM-backed preparation schemes.

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qtally/complexity.hpp"
#include "qtally/sim.hpp"

namespace qtally::prep {

enum class PrepScheme : int {
  kDirectManipulation,
  kConventionalQRAM,
  kBucketBrigadeQRAM,
  kFlipFlopQRAM,
};

std::string scheme_name(PrepScheme scheme);

struct TargetState {
  Eigen::VectorXcd amplitudes;

  /// Validates: length a power of two, norm 1 within 1e-10, not the zero vector.
  explicit TargetState(Eigen::VectorXcd amps);
  /// Rescales an arbitrary nonzero vector to unit norm.
  static TargetState normalized(Eigen::VectorXcd amps);

  int qubits() const;
};

/// Synthesizes a circuit realizing |0...0> -> target on one register "q".
/// Uses only single-qubit rotations and pattern-controlled single-qubit
/// rotations; targets with all-real nonnegative amplitudes get no phase stage.
/// Guaranteed fidelity with the target >= 1 - 1e-10.
Circuit synthesize_prep(const TargetState& target);

/// Seeded dense random target (all magnitudes and phases nonzero); the
/// standard input for measured preparation-cost studies.
TargetState random_target(int qubits, std::uint64_t seed);

struct PrepCost {
  complexity::Term term;  // per-call asymptotic formula, unit constants
  double numeric = 0;     // term evaluated at N
  std::optional<std::int64_t> measured;  // DM only, when requested
};

/// Per-call preparation cost model of a scheme at size N. For
/// kDirectManipulation with measure=true the synthesized elementary count for
/// a seeded random target is reported alongside the formula.
PrepCost prep_cost(PrepScheme scheme, int N, bool measure = false,
                   std::uint64_t seed = 1);

/// Optional one-off data-encoding cost of memory-backed schemes:
/// FF-qRAM N*log(N) (storing unsorted data), conventional/BB sqrt(N) per cell.
/// Direct manipulation has none.
std::optional<complexity::Term> prep_encode_cost(PrepScheme scheme);

/// Loads "index,re,im" rows (optional header line).
TargetState load_target_csv(const std::string& path);
/// Loads a JSON array of [re, im] pairs, or {"amplitudes": [...]}.
TargetState load_target_json(const std::string& path);

}  // namespace qtally::prep
