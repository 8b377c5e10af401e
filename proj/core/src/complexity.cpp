#include "qtally/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qtally/prep.hpp"
#include "qtally/tomography.hpp"

namespace qtally::complexity {

namespace {

double log2_checked(double x) {
  if (!(x > 0)) throw std::invalid_argument("log argument must be positive");
  return std::log2(x);
}

std::string coeff_str(double c) {
  if (c == std::floor(c) && std::abs(c) < 1e15) {
    return std::to_string(static_cast<long long>(c));
  }
  std::ostringstream os;
  os << c;
  return os.str();
}

// Fixed atom order inside a printed product.
constexpr Atom kAtomOrder[] = {Atom::kCeps, Atom::kN,    Atom::kSqrtN, Atom::kLogN,
                               Atom::kK,    Atom::kLogK, Atom::kM,     Atom::kS,
                               Atom::kT,    Atom::kR};

std::string atom_str(Atom a, int power) {
  auto pow_suffix = [&](const std::string& base) {
    return power == 1 ? base : base + "^" + std::to_string(power);
  };
  switch (a) {
    case Atom::kCeps:
      return pow_suffix("C");
    case Atom::kN:
      return pow_suffix("N");
    case Atom::kSqrtN:
      return pow_suffix("sqrt(N)");
    case Atom::kLogN:
      return power == 1 ? "log(N)" : "log^" + std::to_string(power) + "(N)";
    case Atom::kK:
      return pow_suffix("k");
    case Atom::kLogK:
      return power == 1 ? "log(k)" : "log^" + std::to_string(power) + "(k)";
    case Atom::kM:
      return pow_suffix("m");
    case Atom::kS:
      return pow_suffix("s");
    case Atom::kT:
      return pow_suffix("t");
    case Atom::kR:
      return pow_suffix("R");
  }
  return "?";
}

}  // namespace

double Product::evaluate(const Params& p) const {
  double v = coeff;
  for (const auto& [atom, power] : powers) {
    double base = 1.0;
    switch (atom) {
      case Atom::kCeps:
        base = p.Ceps;
        break;
      case Atom::kN:
        base = p.N;
        break;
      case Atom::kSqrtN:
        base = std::sqrt(p.N);
        break;
      case Atom::kLogN:
        base = log2_checked(p.N);
        break;
      case Atom::kK:
        base = p.k;
        break;
      case Atom::kLogK:
        base = log2_checked(p.k);
        break;
      case Atom::kM:
        base = p.m;
        break;
      case Atom::kS:
        base = p.s;
        break;
      case Atom::kT:
        base = p.t;
        break;
      case Atom::kR:
        base = p.R;
        break;
    }
    v *= std::pow(base, power);
  }
  return v;
}

std::string Product::str() const {
  std::string out;
  for (Atom a : kAtomOrder) {
    const auto it = powers.find(a);
    if (it == powers.end() || it->second == 0) continue;
    if (!out.empty()) out += "*";
    out += atom_str(a, it->second);
  }
  if (out.empty()) return coeff_str(coeff);
  if (coeff != 1.0) return coeff_str(coeff) + "*" + out;
  return out;
}

Term Term::constant(double c) {
  Term t;
  Product p;
  p.coeff = c;
  t.products_.push_back(p);
  t.canonicalize();
  return t;
}

Term Term::atom(Atom a, int power) {
  Term t;
  Product p;
  p.powers[a] = power;
  t.products_.push_back(p);
  return t;
}

Term& Term::operator+=(const Term& other) {
  for (const auto& p : other.products_) products_.push_back(p);
  canonicalize();
  return *this;
}

Term operator*(const Term& a, const Term& b) {
  Term out;
  for (const auto& pa : a.products_) {
    for (const auto& pb : b.products_) {
      Product p;
      p.coeff = pa.coeff * pb.coeff;
      p.powers = pa.powers;
      for (const auto& [atom, power] : pb.powers) p.powers[atom] += power;
      out.products_.push_back(p);
    }
  }
  out.canonicalize();
  return out;
}

Term operator*(double c, Term t) {
  for (auto& p : t.products_) p.coeff *= c;
  t.canonicalize();
  return t;
}

void Term::canonicalize() {
  // Drop zero powers, collect like products, sort by printed form.
  for (auto& p : products_) {
    for (auto it = p.powers.begin(); it != p.powers.end();) {
      it = (it->second == 0) ? p.powers.erase(it) : std::next(it);
    }
  }
  std::vector<Product> collected;
  for (const auto& p : products_) {
    if (p.coeff == 0.0) continue;
    auto it = std::find_if(collected.begin(), collected.end(),
                           [&](const Product& q) { return q.same_powers(p); });
    if (it == collected.end()) {
      collected.push_back(p);
    } else {
      it->coeff += p.coeff;
    }
  }
  std::erase_if(collected, [](const Product& p) { return p.coeff == 0.0; });
  std::sort(collected.begin(), collected.end(),
            [](const Product& a, const Product& b) { return a.str() < b.str(); });
  products_ = std::move(collected);
}

double Term::evaluate(const Params& p) const {
  double v = 0.0;
  for (const auto& prod : products_) v += prod.evaluate(p);
  return v;
}

std::string Term::str() const {
  if (products_.empty()) return "0";
  std::string out;
  for (const auto& p : products_) {
    if (!out.empty()) out += " + ";
    out += p.str();
  }
  return out;
}

bool Term::is_constant_one() const {
  return products_.size() == 1 && products_[0].powers.empty() &&
         products_[0].coeff == 1.0;
}

Term lde_algo_term() {
  return Term::atom(Atom::kK, 2) + Term::atom(Atom::kLogN) +
         Term::atom(Atom::kK) * Term::atom(Atom::kLogK) * Term::atom(Atom::kLogN);
}

Term hhl_algo_term() {
  return Term::atom(Atom::kM, 2) +
         Term::atom(Atom::kS, 2) * Term::atom(Atom::kT) * Term::atom(Atom::kLogN) +
         Term::atom(Atom::kLogN);
}

EvaluatedTerm lde_algo_term(int k, int N) {
  if (k < 1 || N < 2) throw std::invalid_argument("lde_algo_term: parameters positive");
  Params p;
  p.k = k;
  p.N = N;
  const Term t = lde_algo_term();
  return EvaluatedTerm{t, t.evaluate(p)};
}

EvaluatedTerm hhl_algo_term(int m, double s, double t, int N) {
  if (m < 1 || N < 2 || s < 0 || t < 0) {
    throw std::invalid_argument("hhl_algo_term: parameters positive");
  }
  Params p;
  p.m = m;
  p.s = s;
  p.t = t;
  p.N = N;
  const Term term = hhl_algo_term();
  return EvaluatedTerm{term, term.evaluate(p)};
}

namespace {

Term prep_column_term(prep::PrepScheme scheme) {
  using prep::PrepScheme;
  switch (scheme) {
    // Table column DM/BB-qRAM carries the per-copy log^2(N) figure for both.
    case PrepScheme::kDirectManipulation:
    case PrepScheme::kBucketBrigadeQRAM:
      return Term::atom(Atom::kLogN, 2);
    case PrepScheme::kFlipFlopQRAM:
      return Term::atom(Atom::kLogN);
    case PrepScheme::kConventionalQRAM:
      return Term::atom(Atom::kN);
  }
  throw std::invalid_argument("unknown preparation scheme");
}

}  // namespace

std::string ComplexityReport::cell() const {
  if (copies_factor.is_constant_one()) return inner.str();
  return copies_factor.str() + "*(" + inner.str() + ")";
}

ComplexityReport compose(prep::PrepScheme prep_scheme, tomo::QstScheme readout,
                         const Term& algo) {
  const tomo::QstCost qc = tomo::qst_cost(readout);
  ComplexityReport report;
  report.prep = prep_scheme;
  report.readout = readout;
  report.algo = algo;
  report.copies_factor = qc.copies;
  report.inner = prep_column_term(prep_scheme) + algo + qc.gates_per_measurement;
  report.overall = report.copies_factor * report.inner;
  return report;
}

std::vector<ComplexityReport> table_cells() {
  using prep::PrepScheme;
  using tomo::QstScheme;
  const Term c = Term::atom(Atom::kCeps);
  std::vector<ComplexityReport> cells;
  for (QstScheme row :
       {QstScheme::kSqst, QstScheme::kAaptMubLocal, QstScheme::kAaptPovm}) {
    for (PrepScheme col :
         {PrepScheme::kDirectManipulation, PrepScheme::kFlipFlopQRAM}) {
      cells.push_back(compose(col, row, c));
    }
  }
  return cells;
}

std::string table_text() {
  const auto cells = table_cells();
  const char* rows[] = {"SQTP/JSM", "MUB [local]", "POVM"};
  std::vector<std::string> col1, col2;
  for (std::size_t i = 0; i < cells.size(); i += 2) {
    col1.push_back(cells[i].cell());
    col2.push_back(cells[i + 1].cell());
  }
  std::size_t w0 = 15, w1 = 10, w2 = 7;
  for (const auto& s : col1) w1 = std::max(w1, s.size());
  for (const auto& s : col2) w2 = std::max(w2, s.size());

  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::ostringstream os;
  os << "Overall gate complexity (order-only; unit constants; log base 2)\n";
  os << pad("Measuring/Prep.", w0) << " | " << pad("DM/BB-qRAM", w1) << " | "
     << pad("FF-qRAM", w2) << "\n";
  os << std::string(w0, '-') << "-+-" << std::string(w1, '-') << "-+-"
     << std::string(w2, '-') << "\n";
  for (std::size_t r = 0; r < 3; ++r) {
    os << pad(rows[r], w0) << " | " << pad(col1[r], w1) << " | " << pad(col2[r], w2)
       << "\n";
  }
  return os.str();
}

CrosscheckResult crosscheck_measured(
    const Term& model, const std::vector<std::pair<Params, double>>& measured) {
  if (measured.size() < 3) {
    throw std::invalid_argument("crosscheck needs measured ledgers for >= 3 sizes");
  }
  CrosscheckResult result;
  double lo = 0, hi = 0;
  for (const auto& [params, value] : measured) {
    CrosscheckRow row;
    row.params = params;
    row.measured = value;
    row.model = model.evaluate(params);
    if (!(row.model > 0)) throw std::invalid_argument("model evaluates non-positive");
    row.ratio = value / row.model;
    if (result.rows.empty()) {
      lo = hi = row.ratio;
    } else {
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
    }
    result.rows.push_back(row);
  }
  result.ratio_spread = hi / lo;
  result.drift_alarm = result.ratio_spread > 2.0;
  return result;
}

}  // namespace qtally::complexity
