#pragma once

// Symbolic asymptotic cost terms and the overall-complexity composer
// (preparation x algorithm-evolution x readout). All numeric evaluation
// uses unit constants and base-2 logarithms; results are order-only.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qtally::prep {
enum class PrepScheme : int;
}
namespace qtally::tomo {
enum class QstScheme : int;
}

namespace qtally::complexity {

/// Atomic factors a product may contain. Ceps is the opaque processing-stage
/// cost C(eps) used when composing table cells symbolically.
enum class Atom : int { kCeps, kN, kSqrtN, kLogN, kK, kLogK, kM, kS, kT, kR };

struct Params {
  double N = 2;
  double k = 1;
  double m = 1;
  double s = 1;
  double t = 1;
  double R = 1;
  double Ceps = 1;  // numeric stand-in for C(eps) when evaluating cells
};

/// One product of atom powers with a positive coefficient.
struct Product {
  double coeff = 1.0;
  std::map<Atom, int> powers;

  double evaluate(const Params& p) const;
  std::string str() const;
  bool same_powers(const Product& other) const { return powers == other.powers; }
};

/// Sum of products, kept in canonical form: like products collected,
/// products sorted by their printed string.
class Term {
 public:
  Term() = default;
  static Term constant(double c);
  static Term atom(Atom a, int power = 1);

  Term& operator+=(const Term& other);
  friend Term operator+(Term a, const Term& b) { return a += b; }
  friend Term operator*(const Term& a, const Term& b);
  friend Term operator*(double c, Term t);

  double evaluate(const Params& p) const;
  std::string str() const;
  bool is_constant_one() const;
  const std::vector<Product>& products() const { return products_; }

 private:
  void canonicalize();
  std::vector<Product> products_;
};

// Algorithm-evolution terms usable as C(eps) inputs to compose().
/// k^2 + log(N) + k*log(k)*log(N)
Term lde_algo_term();
/// m^2 + s^2*t*log(N) + log(N)
Term hhl_algo_term();

struct EvaluatedTerm {
  Term term;
  double value = 0.0;
};
EvaluatedTerm lde_algo_term(int k, int N);
EvaluatedTerm hhl_algo_term(int m, double s, double t, int N);

// ---------------------------------------------------------------------------
// Composition (Table 1)

struct ComplexityReport {
  prep::PrepScheme prep;
  tomo::QstScheme readout;
  Term algo;
  Term copies_factor;
  Term inner;    // prep term + algo + readout gates-per-measurement
  Term overall;  // copies_factor * inner, expanded
  /// Factored canonical cell string, e.g. "N^4*(C + log(N) + log^2(N))".
  std::string cell() const;
  double evaluate(const Params& p) const { return overall.evaluate(p); }
};

/// Composes the overall gate complexity for a (preparation, readout) pair
/// around an algorithm-evolution term. Preparation enters with its per-copy
/// table column term (DM/BB: log^2(N); FF: log(N); conventional qRAM: N).
ComplexityReport compose(prep::PrepScheme prep, tomo::QstScheme readout,
                         const Term& algo);

/// The six populated preparation x readout cells with symbolic C(eps),
/// rows {SQTP/JSM, MUB (local variant), POVM} x columns {DM/BB, FF}.
std::vector<ComplexityReport> table_cells();

/// Column-aligned text table of table_cells().
std::string table_text();

// ---------------------------------------------------------------------------
// Measured-vs-analytic crosscheck

struct CrosscheckRow {
  Params params;
  double measured = 0;
  double model = 0;
  double ratio = 0;  // measured / model
};

struct CrosscheckResult {
  std::vector<CrosscheckRow> rows;
  double ratio_spread = 0;  // max ratio / min ratio over the size range
  bool drift_alarm = false; // spread > 2x
};

/// Emits measured/analytic ratios per size; needs at least three sizes.
CrosscheckResult crosscheck_measured(const Term& model,
                                     const std::vector<std::pair<Params, double>>& measured);

}  // namespace qtally::complexity
