#include "qtally/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qtally;

namespace {

constexpr double kTol = 1e-12;

Eigen::VectorXcd random_state_vec(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = cxd(gauss(rng), gauss(rng));
  return v / v.norm();
}

Eigen::MatrixXcd random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = cxd(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ();
}

void expect_state_eq(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want,
                     double tol = kTol) {
  ASSERT_EQ(got.size(), want.size());
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), tol);
}

}  // namespace

// ---------- layout ----------

TEST(RegisterLayout, PartitionsQubitsInDeclarationOrder) {
  const RegisterLayout layout({{"a", 2}, {"b", 3}});
  EXPECT_EQ(layout.total_qubits(), 5);
  EXPECT_EQ(layout.dim(), 32u);
  EXPECT_EQ(layout.offset("a"), 0);
  EXPECT_EQ(layout.offset("b"), 2);
  EXPECT_EQ(layout.width("b"), 3);
}

TEST(RegisterLayout, RejectsBadDefinitions) {
  EXPECT_THROW(RegisterLayout({{"a", 0}}), std::invalid_argument);
  EXPECT_THROW(RegisterLayout({{"a", 1}, {"a", 2}}), std::invalid_argument);
  EXPECT_THROW(RegisterLayout({{"a", 1}}).offset("z"), std::invalid_argument);
}

TEST(RegisterLayout, FormatBitstringIsMsbFirstPerRegister) {
  const RegisterLayout layout({{"lo", 2}, {"hi", 1}});
  // index 5 = 0b101: lo = 01 (q0=1, q1=0), hi = 1
  EXPECT_EQ(format_bitstring(layout, 5), "01|1");
}

// ---------- apply ----------

TEST(Apply, XOnQubitZeroPermutesBasis) {
  StateVector s(RegisterLayout({{"q", 2}}));
  apply(s, GateOp::single(0, gates::pauli_x(), "x"));
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(4);
  want[1] = 1.0;  // |01>, qubit 0 least significant
  expect_state_eq(s.amplitudes(), want);
}

TEST(Apply, HadamardMakesEqualSuperposition) {
  StateVector s(RegisterLayout({{"q", 1}}));
  apply(s, GateOp::single(0, gates::hadamard(), "h"));
  Eigen::VectorXcd want(2);
  want << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  expect_state_eq(s.amplitudes(), want);
}

TEST(Apply, ControlledXActsOnlyOnControlSetBranch) {
  // (|10> + |00>)/sqrt(2) -> (|11> + |00>)/sqrt(2), control q1, target q0
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps[0] = amps[2] = 1.0 / std::sqrt(2.0);
  StateVector s = StateVector::from_amplitudes(RegisterLayout({{"q", 2}}), amps);
  apply(s, GateOp::controlled_single({1}, 0, gates::pauli_x(), "cx"));
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(4);
  want[0] = want[3] = 1.0 / std::sqrt(2.0);
  expect_state_eq(s.amplitudes(), want);
}

TEST(Apply, PatternControlTriggersOnZero) {
  StateVector s(RegisterLayout({{"q", 2}}));  // |00>
  apply(s, GateOp::controlled_single({1}, {false}, 0, gates::pauli_x(), "cx0"));
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(4);
  want[1] = 1.0;
  expect_state_eq(s.amplitudes(), want);
}

TEST(Apply, RejectsInvalidOps) {
  StateVector s(RegisterLayout({{"q", 2}}));
  Eigen::Matrix2cd not_unitary;
  not_unitary << 1, 0, 0, 2;
  EXPECT_THROW(GateOp::single(0, not_unitary, "bad"), std::invalid_argument);
  EXPECT_THROW(apply(s, GateOp::single(5, gates::pauli_x(), "oob")),
               std::invalid_argument);
  EXPECT_THROW(apply(s, GateOp::controlled_single({0}, 0, gates::pauli_x(), "ct")),
               std::invalid_argument);
  EXPECT_THROW(
      apply(s, GateOp::controlled_single({1, 1}, 0, gates::pauli_x(), "dup")),
      std::invalid_argument);
}

TEST(Apply, BlockActsOnRegisterOnly) {
  // X x X block on a 2-qubit register embedded between two other qubits.
  const RegisterLayout layout({{"lo", 1}, {"mid", 2}, {"hi", 1}});
  Eigen::MatrixXcd xx = Eigen::MatrixXcd::Zero(4, 4);
  xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1.0;
  StateVector s = StateVector::basis(layout, 0b1001);  // hi=1, mid=00, lo=1
  apply(s, GateOp::block("mid", xx, "xx"));
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(16);
  want[0b1111] = 1.0;
  expect_state_eq(s.amplitudes(), want);
}

TEST(Apply, NormPreservedOnRandomCircuits) {
  std::mt19937_64 rng(11);
  const RegisterLayout layout({{"a", 2}, {"b", 2}});
  StateVector s = StateVector::from_amplitudes(layout, random_state_vec(16, rng));
  for (int i = 0; i < 60; ++i) {
    switch (i % 3) {
      case 0:
        apply(s, GateOp::single(static_cast<int>(rng() % 4), random_unitary(2, rng),
                                "u1"));
        break;
      case 1: {
        const int t = static_cast<int>(rng() % 4);
        const int c = (t + 1 + static_cast<int>(rng() % 3)) % 4;
        apply(s, GateOp::controlled_single({c}, t, random_unitary(2, rng), "cu"));
        break;
      }
      case 2:
        apply(s, GateOp::block("b", random_unitary(4, rng), "blk"));
        break;
    }
    EXPECT_NEAR(s.norm(), 1.0, kTol);
  }
}

TEST(Apply, LinearityOnRandomPairs) {
  std::mt19937_64 rng(17);
  const RegisterLayout layout({{"q", 3}});
  const GateOp op = GateOp::controlled_single({2}, 0, random_unitary(2, rng), "cu");
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXcd v1 = random_state_vec(8, rng);
    const Eigen::VectorXcd v2 = random_state_vec(8, rng);
    const cxd alpha(0.3, 0.4), beta(-0.7, 0.1);

    StateVector s1 = StateVector::from_amplitudes(layout, v1);
    StateVector s2 = StateVector::from_amplitudes(layout, v2);
    StateVector combo = StateVector::from_amplitudes(layout, alpha * v1 + beta * v2);
    apply(s1, op);
    apply(s2, op);
    apply(combo, op);
    expect_state_eq(combo.amplitudes(),
                    alpha * s1.amplitudes() + beta * s2.amplitudes());
  }
}

// ---------- qft ----------

TEST(Qft, SingleQubitQftIsHadamard) {
  StateVector s(RegisterLayout({{"q", 1}}));
  qft(s, "q");
  Eigen::VectorXcd want(2);
  want << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  expect_state_eq(s.amplitudes(), want);
}

TEST(Qft, TwoQubitMatrixMatchesDirectDft) {
  // independent construction: entries 2^-1 * i^(j*k)
  Eigen::MatrixXcd want(4, 4);
  const cxd iunit(0, 1);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) want(j, k) = 0.5 * std::pow(iunit, j * k);
  }
  EXPECT_LE((gates::dft(2) - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Qft, InverseComposesToIdentity) {
  std::mt19937_64 rng(3);
  for (int w = 1; w <= 4; ++w) {
    const RegisterLayout layout({{"r", w}});
    for (int rep = 0; rep < 25; ++rep) {
      const Eigen::VectorXcd v = random_state_vec(Eigen::Index{1} << w, rng);
      StateVector s = StateVector::from_amplitudes(layout, v);
      qft(s, "r");
      iqft(s, "r");
      expect_state_eq(s.amplitudes(), v);
    }
  }
}

TEST(Qft, UnitaryUpToWidthFive) {
  for (int w = 1; w <= 5; ++w) {
    EXPECT_LE(unitarity_defect(gates::dft(w)), 1e-12) << "w=" << w;
  }
}

TEST(Qft, LedgerUsesPinnedDecompositionCount) {
  for (int w = 1; w <= 5; ++w) {
    StateVector s(RegisterLayout({{"r", w}}));
    qft(s, "r");
    EXPECT_EQ(s.ledger().elementary_count, w * (w + 1) / 2 + w / 2) << "w=" << w;
    EXPECT_EQ(s.ledger().raw_ops, 1);
  }
}

TEST(Qft, UnknownRegisterThrows) {
  StateVector s(RegisterLayout({{"r", 2}}));
  EXPECT_THROW(qft(s, "nope"), std::invalid_argument);
}

// ---------- post_select ----------

TEST(PostSelect, EqualBranches) {
  std::mt19937_64 rng(5);
  const Eigen::VectorXcd a = random_state_vec(4, rng);
  const Eigen::VectorXcd b = random_state_vec(4, rng);
  const RegisterLayout layout({{"flag", 1}, {"data", 2}});
  Eigen::VectorXcd amps(8);
  for (int d = 0; d < 4; ++d) {
    amps[2 * d] = a[d] / std::sqrt(2.0);      // flag = 0
    amps[2 * d + 1] = b[d] / std::sqrt(2.0);  // flag = 1
  }
  StateVector s = StateVector::from_amplitudes(layout, amps);

  const PostSelectResult r = post_select(s, "flag", std::uint64_t{0});
  EXPECT_NEAR(r.probability, 0.5, kTol);
  EXPECT_NEAR(fidelity(r.state.amplitudes(), a), 1.0, kTol);
  EXPECT_EQ(r.state.layout().total_qubits(), 2);
}

TEST(PostSelect, BasisRegisterAtZeroIsIdentity) {
  std::mt19937_64 rng(6);
  const RegisterLayout layout({{"anc", 2}, {"data", 2}});
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  const Eigen::VectorXcd d = random_state_vec(4, rng);
  for (int i = 0; i < 4; ++i) amps[i << 2] = d[i];  // anc = 00
  StateVector s = StateVector::from_amplitudes(layout, amps);

  const PostSelectResult r = post_select(s, "anc", std::uint64_t{0});
  EXPECT_NEAR(r.probability, 1.0, kTol);
  expect_state_eq(r.state.amplitudes(), d);
}

TEST(PostSelect, OutcomeProbabilitiesSumToOne) {
  std::mt19937_64 rng(7);
  const RegisterLayout layout({{"a", 2}, {"b", 2}});
  StateVector s = StateVector::from_amplitudes(layout, random_state_vec(16, rng));
  double total = 0;
  for (std::uint64_t o = 0; o < 4; ++o) total += post_select(s, "a", o).probability;
  EXPECT_NEAR(total, 1.0, kTol);

  const std::vector<double> probs = register_probabilities(s, "a");
  double total2 = 0;
  for (double p : probs) total2 += p;
  EXPECT_NEAR(total2, 1.0, kTol);
}

TEST(PostSelect, EmptyBranchSignalsFailedHeralding) {
  const RegisterLayout layout({{"flag", 1}, {"data", 1}});
  StateVector s(layout);  // |00>: flag=1 branch is empty
  EXPECT_THROW(post_select(s, "flag", std::uint64_t{1}), HeraldingError);
}

TEST(PostSelect, BitstringOverloadIsMsbFirst) {
  const RegisterLayout layout({{"r", 2}, {"rest", 1}});
  StateVector s = StateVector::basis(layout, 0b010);  // r = 2, rest = 0
  const PostSelectResult r = post_select(s, "r", "10");
  EXPECT_NEAR(r.probability, 1.0, kTol);
  EXPECT_THROW(post_select(s, "r", "1"), std::invalid_argument);
}

// ---------- sample ----------

TEST(Sample, BasisStateIsDeterministic) {
  StateVector s = StateVector::basis(RegisterLayout({{"q", 3}}), 5);
  const auto hist = sample(s, 1000, 42);
  ASSERT_EQ(hist.size(), 1u);
  EXPECT_EQ(hist.at(5), 1000u);
}

TEST(Sample, UniformFrequenciesWithinFiveSigma) {
  StateVector s(RegisterLayout({{"q", 2}}));
  apply(s, GateOp::single(0, gates::hadamard(), "h"));
  apply(s, GateOp::single(1, gates::hadamard(), "h"));
  const std::int64_t shots = 100000;
  const auto hist = sample(s, shots, 2024);
  const double sigma = std::sqrt(0.25 * 0.75 / shots);
  for (std::uint64_t o = 0; o < 4; ++o) {
    const double freq = static_cast<double>(hist.at(o)) / shots;
    EXPECT_NEAR(freq, 0.25, 5 * sigma) << "outcome " << o;
  }
}

TEST(Sample, SameSeedSameHistogram) {
  std::mt19937_64 rng(9);
  StateVector s = StateVector::from_amplitudes(RegisterLayout({{"q", 3}}),
                                               random_state_vec(8, rng));
  EXPECT_EQ(sample(s, 5000, 7), sample(s, 5000, 7));
  EXPECT_THROW(sample(s, 0, 7), std::invalid_argument);
}

// ---------- elementary cost & ledger ----------

TEST(ElementaryCost, RuleValues) {
  EXPECT_EQ(elementary_cost(GateOp::single(0, gates::hadamard(), "h")), 1);
  // Toffoli: two controls on a single-qubit X
  EXPECT_EQ(elementary_cost(GateOp::controlled_single({1, 2}, 0, gates::pauli_x(),
                                                      "ccx")),
            4);
  // one control on a 1-qubit block costs the same as the bare block
  Eigen::MatrixXcd x = gates::pauli_x();
  EXPECT_EQ(elementary_cost(GateOp::block("r", x, "bx")), 4);
  EXPECT_EQ(elementary_cost(GateOp::controlled_block({3}, "r", x, "cbx")), 4);
  // block on two qubits
  EXPECT_EQ(elementary_cost(GateOp::block("r", Eigen::MatrixXcd::Identity(4, 4), "b2")),
            8);
}

TEST(Ledger, AdditivityAndMonotonicity) {
  const RegisterLayout layout({{"q", 3}});
  Circuit c1(layout), c2(layout);
  c1.push(GateOp::single(0, gates::hadamard(), "h"));
  c1.push(GateOp::controlled_single({1, 2}, 0, gates::pauli_x(), "ccx"));
  c2.push(GateOp::single(1, gates::pauli_x(), "x"));
  c2.push(c1.ops[1]);

  StateVector s1(layout), s2(layout), s12(layout);
  apply(s1, c1);
  apply(s2, c2);
  apply(s12, c1);
  apply(s12, c2);

  GateCountLedger summed = s1.ledger();
  summed += s2.ledger();
  EXPECT_EQ(summed.raw_ops, s12.ledger().raw_ops);
  EXPECT_EQ(summed.elementary_count, s12.ledger().elementary_count);
  for (const auto& [label, lc] : s12.ledger().per_label) {
    EXPECT_EQ(summed.per_label.at(label).raw, lc.raw);
    EXPECT_EQ(summed.per_label.at(label).elementary, lc.elementary);
  }
  EXPECT_GE(s12.ledger().elementary_count, s12.ledger().raw_ops);
  EXPECT_EQ(s12.ledger().per_label.at("ccx").raw, 2);
  EXPECT_EQ(s12.ledger().per_label.at("ccx").elementary, 8);
  EXPECT_EQ(s12.ledger().elementary_for_prefix("cc"), 8);
}

// ---------- helpers ----------

TEST(Fidelity, GlobalPhaseInsensitive) {
  std::mt19937_64 rng(21);
  const Eigen::VectorXcd v = random_state_vec(8, rng);
  const Eigen::VectorXcd w = std::exp(cxd(0, 1.234)) * v;
  EXPECT_NEAR(fidelity(v, w), 1.0, kTol);
}

TEST(NetUnitary, MatchesSingleOpMatrix) {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXcd u = random_unitary(4, rng);
  Circuit c(RegisterLayout({{"q", 2}}));
  c.push(GateOp::block("q", u, "u"));
  EXPECT_LE((net_unitary(c) - u).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embed, RetargetsAndAddsControl) {
  Circuit src(RegisterLayout({{"q", 1}}));
  src.push(GateOp::single(0, gates::pauli_x(), "x"));

  Circuit dst(RegisterLayout({{"c", 1}, {"w", 1}}));
  embed(dst, src, 1, std::pair<int, bool>{0, true}, "emb:");
  ASSERT_EQ(dst.ops.size(), 1u);
  EXPECT_EQ(dst.ops[0].target, 1);
  ASSERT_EQ(dst.ops[0].controls.size(), 1u);
  EXPECT_EQ(dst.ops[0].controls[0], 0);
  EXPECT_EQ(dst.ops[0].label, "emb:x");

  StateVector s = StateVector::basis(dst.layout, 0b01);  // c = 1
  apply(s, dst);
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(4);
  want[0b11] = 1.0;
  expect_state_eq(s.amplitudes(), want);
}
