#include "qtally/lde.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qtally/prep.hpp"
#include "qtally/tomography.hpp"

namespace qtally::lde {

namespace {

constexpr double kPi = std::numbers::pi;

int log2_exact(Eigen::Index n, const char* what) {
  int bits = 0;
  while ((Eigen::Index{1} << bits) < n) ++bits;
  if ((Eigen::Index{1} << bits) != n) {
    throw std::invalid_argument(std::string(what) + " must be a power of two");
  }
  return bits;
}

Eigen::VectorXcd gaussian_vector(Eigen::Index dim, std::mt19937_64& rng) {
  auto uniform = [&rng]() {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;  // (0,1]
  };
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    // Box-Muller; keeps the completion deterministic across platforms.
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * kPi * uniform();
    v[i] = cxd(r * std::cos(a), r * std::sin(a));
  }
  return v;
}

// Completes `first` (unit norm) to a unitary with seeded random columns,
// modified Gram-Schmidt with a second orthogonalization pass.
Eigen::MatrixXcd complete_unitary(const Eigen::VectorXcd& first, std::mt19937_64& rng) {
  const Eigen::Index dim = first.size();
  Eigen::MatrixXcd q(dim, dim);
  q.col(0) = first;
  for (Eigen::Index c = 1; c < dim; ++c) {
    double norm = 0;
    Eigen::VectorXcd v;
    do {
      v = gaussian_vector(dim, rng);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < c; ++j) {
          v -= q.col(j) * q.col(j).dot(v);
        }
      }
      norm = v.norm();
    } while (norm < 1e-6);
    q.col(c) = v / norm;
  }
  return q;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

void validate(const LdeProblem& p) {
  const Eigen::Index n = p.M.rows();
  if (p.M.cols() != n) throw std::invalid_argument("M must be square");
  log2_exact(n, "problem dimension");
  if (p.b.size() != n || p.x0.size() != n) {
    throw std::invalid_argument("b and x0 must match the dimension of M");
  }
  if (!(p.t > 0)) throw std::invalid_argument("t must be positive");
  if (p.k < 1) throw std::invalid_argument("Taylor order k must be >= 1");
  if (!(spectral_norm(p.M) > 0)) throw std::invalid_argument("M must be nonzero");
}

TaylorCoefficients taylor_coeffs(const LdeProblem& p) {
  validate(p);
  return taylor_coeffs(p.x0.norm(), p.b.norm(), spectral_norm(p.M), p.t, p.k);
}

TaylorCoefficients taylor_coeffs(double norm_x0, double norm_b, double norm_m,
                                 double t, int k) {
  if (k < 0) throw std::invalid_argument("Taylor order must be >= 0");
  const double mt = norm_m * t;
  TaylorCoefficients tc;
  tc.C.resize(k + 1);
  tc.D.resize(k);
  double cm = norm_x0;  // C_0
  for (int m = 0; m <= k; ++m) {
    tc.C[m] = cm;
    cm *= mt / (m + 1);
  }
  double dn = norm_b * t;  // D_1
  for (int n = 1; n <= k; ++n) {
    tc.D[n - 1] = dn;
    dn *= mt / (n + 1);
  }
  double csum = 0, dsum = 0;
  for (double c : tc.C) csum += c;
  for (double d : tc.D) dsum += d;
  if (!std::isfinite(csum) || !std::isfinite(dsum)) {
    throw std::overflow_error("Taylor coefficients overflow for this ||M|| t");
  }
  tc.Cbar = std::sqrt(csum);
  tc.Dbar = std::sqrt(dsum);
  tc.Nnorm = std::sqrt(csum + dsum);
  if (!(tc.Nnorm > 0)) {
    throw std::invalid_argument("degenerate problem: x0 = 0 and b = 0");
  }
  return tc;
}

EncodingGates build_encoding(const TaylorCoefficients& tc, std::uint64_t seed) {
  const int k = static_cast<int>(tc.C.size()) - 1;
  int taylor_qubits = 1;
  while ((1 << taylor_qubits) < k + 1) ++taylor_qubits;
  const Eigen::Index dim = Eigen::Index{1} << taylor_qubits;

  EncodingGates g;
  g.taylor_qubits = taylor_qubits;

  if (tc.Dbar == 0.0) {
    g.V << 1, 0, 0, -1;  // degenerate branch selector, V|0> = |0>
  } else if (tc.Cbar == 0.0) {
    g.V << 0, 1, 1, 0;
  } else {
    g.V << tc.Cbar, tc.Dbar, tc.Dbar, -tc.Cbar;
    g.V /= tc.Nnorm;
  }

  std::mt19937_64 rng(seed);
  if (tc.Cbar > 0.0) {
    Eigen::VectorXcd first = Eigen::VectorXcd::Zero(dim);
    for (int m = 0; m <= k; ++m) first[m] = std::sqrt(tc.C[m]) / tc.Cbar;
    g.VS1 = complete_unitary(first, rng);
  } else {
    g.VS1 = Eigen::MatrixXcd::Identity(dim, dim);
  }
  if (tc.Dbar > 0.0) {
    Eigen::VectorXcd first = Eigen::VectorXcd::Zero(dim);
    for (int n = 1; n <= k; ++n) first[n - 1] = std::sqrt(tc.D[n - 1]) / tc.Dbar;
    g.VS2 = complete_unitary(first, rng);
  } else {
    g.VS2 = Eigen::MatrixXcd::Identity(dim, dim);
  }
  return g;
}

Circuit build_circuit(const LdeProblem& p, const EncodingGates& g) {
  validate(p);
  const Eigen::Index dim = p.M.rows();
  const int n = log2_exact(dim, "problem dimension");
  const int T = g.taylor_qubits;

  const double norm_m = spectral_norm(p.M);
  const Eigen::MatrixXcd a = p.M / norm_m;
  const double defect = unitarity_defect(a);
  if (!(defect <= kUnitarityTol)) {
    throw std::invalid_argument("A = M/||M|| is not unitary (defect " +
                                std::to_string(defect) + ")");
  }

  Circuit circuit(RegisterLayout({{"branch", 1}, {"taylor", T}, {"work", n}}));
  const int work_offset = 1 + T;
  std::vector<int> taylor_qubits;
  for (int b = 0; b < T; ++b) taylor_qubits.push_back(1 + b);

  // Encoding
  circuit.push(GateOp::single(0, g.V, "encode:V"));
  circuit.push(GateOp::controlled_block({0}, {false}, "taylor", g.VS1, "encode:VS1"));
  if (p.b.norm() > 0.0) {
    circuit.push(GateOp::controlled_block({0}, {true}, "taylor", g.VS2, "encode:VS2"));
  }
  const Circuit ux = prep::synthesize_prep(prep::TargetState::normalized(p.x0));
  embed(circuit, ux, work_offset, std::pair<int, bool>{0, false}, "encode:Ux:");
  if (p.b.norm() > 0.0) {
    const Circuit ub = prep::synthesize_prep(prep::TargetState::normalized(p.b));
    embed(circuit, ub, work_offset, std::pair<int, bool>{0, true}, "encode:Ub:");
  }

  // Evolution: U_m = A^m conditioned on the taylor register reading m.
  // U_0 is the identity and needs no gates.
  Eigen::MatrixXcd am = Eigen::MatrixXcd::Identity(dim, dim);
  for (int m = 1; m <= p.k; ++m) {
    am = am * a;
    std::vector<bool> pattern;
    for (int b = 0; b < T; ++b) pattern.push_back((m >> b) & 1);
    GateOp op = GateOp::controlled_block(taylor_qubits, pattern, "work", am,
                                         "evolve:U^" + std::to_string(m));
    op.cost_override = static_cast<std::int64_t>(T) * n;
    circuit.push(std::move(op));
  }

  // Decoding
  if (p.b.norm() > 0.0) {
    circuit.push(GateOp::controlled_block({0}, {true}, "taylor",
                                          g.VS2.adjoint(), "decode:VS2+"));
  }
  circuit.push(GateOp::controlled_block({0}, {false}, "taylor", g.VS1.adjoint(),
                                        "decode:VS1+"));
  circuit.push(GateOp::single(0, g.V.adjoint(), "decode:V+"));
  return circuit;
}

LdeResult run(const LdeProblem& p, std::uint64_t seed) {
  const TaylorCoefficients tc = taylor_coeffs(p);
  const EncodingGates g = build_encoding(tc, seed);
  const Circuit circuit = build_circuit(p, g);

  StateVector s(circuit.layout);
  apply(s, circuit);

  const PostSelectResult taylor_zero = post_select(s, "taylor", std::uint64_t{0});
  const PostSelectResult branch_zero =
      post_select(taylor_zero.state, "branch", std::uint64_t{0});

  LdeResult result;
  result.state = branch_zero.state.amplitudes();
  result.success_prob = taylor_zero.probability * branch_zero.probability;
  result.ledger = branch_zero.state.ledger();
  result.fidelity_vs_taylor = fidelity(result.state, classical_taylor(p));
  return result;
}

Eigen::VectorXcd classical_taylor(const LdeProblem& p) {
  validate(p);
  Eigen::VectorXcd sum = p.x0;
  Eigen::VectorXcd term = p.x0;
  for (int m = 1; m <= p.k; ++m) {
    term = (p.M * term) * (p.t / m);
    sum += term;
  }
  if (p.b.norm() > 0.0) {
    Eigen::VectorXcd bterm = p.t * p.b;  // M^0 t^1 / 1! b
    sum += bterm;
    for (int n = 2; n <= p.k; ++n) {
      bterm = (p.M * bterm) * (p.t / n);
      sum += bterm;
    }
  }
  return sum;
}

Eigen::VectorXcd classical_exact(const LdeProblem& p) {
  validate(p);
  // Hermitian M: eigendecomposition is exact and cheap; otherwise fall back
  // to the scaling-and-squaring matrix exponential.
  Eigen::VectorXcd hom;
  if ((p.M - p.M.adjoint()).cwiseAbs().maxCoeff() <= 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.M);
    const Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXcd phases(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) phases[i] = std::exp(lam[i] * p.t);
    hom = es.eigenvectors() *
          (phases.asDiagonal() * (es.eigenvectors().adjoint() * p.x0));
  } else {
    const Eigen::MatrixXcd expm = (p.M * p.t).exp();
    hom = expm * p.x0;
  }
  if (p.b.norm() == 0.0) return hom;

  // (e^(Mt) - I) M^-1 b = sum_{n>=1} M^(n-1) t^n / n! b, defined for any M.
  Eigen::VectorXcd bterm = p.t * p.b;
  Eigen::VectorXcd bsum = bterm;
  for (int n = 2; n <= 512; ++n) {
    bterm = (p.M * bterm) * (p.t / n);
    bsum += bterm;
    if (bterm.norm() <= 1e-18 * bsum.norm()) break;
  }
  return hom + bsum;
}

double truncation_bound(const LdeProblem& p) {
  validate(p);
  const double a = spectral_norm(p.M) * p.t;
  double fact = 1.0;  // (k+1)!
  for (int i = 2; i <= p.k + 1; ++i) fact *= i;
  const double ea = std::exp(a);
  return p.x0.norm() * std::pow(a, p.k + 1) / fact * ea +
         p.b.norm() * p.t * std::pow(a, p.k) / fact * ea;
}

Eigen::MatrixXcd diffusion_matrix(int N) {
  if (N < 2) throw std::invalid_argument("diffusion matrix needs N >= 2");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
  const double scale = static_cast<double>(N) * N;
  for (int i = 0; i < N; ++i) {
    m(i, i) = -2.0 * scale;
    if (i > 0) m(i, i - 1) = scale;
    if (i + 1 < N) m(i, i + 1) = scale;
  }
  return m;
}

double diffusion_norm(int N) {
  return static_cast<double>(N) * N * 2.0 *
         (1.0 - std::cos(static_cast<double>(N) * kPi / (N + 1)));
}

ScalingStudy success_scaling(int k, double t, const std::vector<int>& Ns,
                             double delta, double epsilon) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(t > 0)) throw std::invalid_argument("t must be positive");
  const double c = tomo::chernoff_prefactor(delta, epsilon);

  ScalingStudy study;
  std::vector<double> xs, ps, copies;
  for (int N : Ns) {
    log2_exact(N, "N");
    const Eigen::MatrixXcd m = diffusion_matrix(N);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(N);

    const TaylorCoefficients tc =
        taylor_coeffs(ones.norm(), 0.0, diffusion_norm(N), t, k);

    // ||x(t)||^2 of the exact solution; M is symmetric, use its spectrum.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Eigen::VectorXcd coords = es.eigenvectors().adjoint() * ones;
    double norm2 = 0;
    for (Eigen::Index j = 0; j < coords.size(); ++j) {
      norm2 += std::norm(coords[j]) * std::exp(2.0 * es.eigenvalues()[j] * t);
    }

    ScalingPoint point;
    point.N = N;
    point.success_prob = norm2 / tc.nnorm4();
    point.copies_bound = static_cast<double>(N) * c / point.success_prob;
    study.points.push_back(point);
    xs.push_back(static_cast<double>(N));
    ps.push_back(point.success_prob);
    copies.push_back(point.copies_bound);
  }
  study.slope = fit_loglog_slope(xs, ps);
  study.copies_exponent = fit_loglog_slope(xs, copies);
  return study;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope fit needs at least two points");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qtally::lde
