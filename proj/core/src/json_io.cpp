#include "qtally/json_io.hpp"

#include <filesystem>
#include <fstream>

namespace qtally::io {

namespace {

cxd complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return cxd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) {
    return cxd(j[0].get<double>(), j[1].get<double>());
  }
  throw std::invalid_argument("expected a number or an [re, im] pair");
}

const char* kind_name(GateOp::Kind kind) {
  switch (kind) {
    case GateOp::Kind::kSingle:
      return "single";
    case GateOp::Kind::kControlledSingle:
      return "controlled-single";
    case GateOp::Kind::kBlock:
      return "block";
    case GateOp::Kind::kControlledBlock:
      return "controlled-block";
  }
  return "?";
}

}  // namespace

nlohmann::json complex_to_json(const cxd& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json vector_to_json(const Eigen::VectorXcd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
  return arr;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::VectorXcd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  }
  return v;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
  }
  return m;
}

nlohmann::json ledger_to_json(const GateCountLedger& ledger) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [label, lc] : ledger.per_label) {
    labels[label] = {{"raw", lc.raw}, {"elementary", lc.elementary}};
  }
  return {{"raw_ops", ledger.raw_ops},
          {"elementary_count", ledger.elementary_count},
          {"per_label", labels}};
}

nlohmann::json circuit_to_json(const Circuit& circuit) {
  nlohmann::json regs = nlohmann::json::array();
  for (const auto& r : circuit.layout.registers()) {
    regs.push_back({{"name", r.name}, {"width", r.width}});
  }
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : circuit.ops) {
    nlohmann::json jop = {{"kind", kind_name(op.kind)},
                          {"label", op.label},
                          {"matrix", matrix_to_json(op.matrix)}};
    if (op.kind == GateOp::Kind::kSingle || op.kind == GateOp::Kind::kControlledSingle) {
      jop["target"] = op.target;
    } else {
      jop["register"] = op.reg;
    }
    if (!op.controls.empty()) {
      jop["controls"] = op.controls;
      nlohmann::json vals = nlohmann::json::array();
      for (bool v : op.control_values) vals.push_back(v ? 1 : 0);
      jop["control_values"] = vals;
    }
    if (op.cost_override) jop["elementary_cost"] = *op.cost_override;
    ops.push_back(jop);
  }
  return {{"layout", regs}, {"ops", ops}};
}

lde::LdeProblem lde_problem_from_json(const nlohmann::json& j) {
  lde::LdeProblem p;
  p.M = matrix_from_json(j.at("M"));
  p.b = j.contains("b") && !j.at("b").is_null()
            ? vector_from_json(j.at("b"))
            : Eigen::VectorXcd::Zero(p.M.rows()).eval();
  p.x0 = vector_from_json(j.at("x0"));
  p.t = j.at("t").get<double>();
  p.k = j.at("k").get<int>();
  lde::validate(p);
  return p;
}

lde::LdeProblem load_lde_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return lde_problem_from_json(j);
}

nlohmann::json lde_result_to_json(const lde::LdeResult& result) {
  return {{"state", vector_to_json(result.state)},
          {"success_prob", result.success_prob},
          {"fidelity_vs_oracle", result.fidelity_vs_taylor},
          {"ledger", ledger_to_json(result.ledger)}};
}

hhl::HhlProblem hhl_problem_from_json(const nlohmann::json& j) {
  hhl::HhlProblem p;
  p.A = matrix_from_json(j.at("A"));
  p.b = vector_from_json(j.at("b"));
  const double bn = p.b.norm();
  if (bn > 0) p.b /= bn;
  p.m = j.at("m").get<int>();
  p.t0 = j.contains("t0") && !j.at("t0").is_null() ? j.at("t0").get<double>() : 0.0;
  p.Cconst = j.contains("C") && !j.at("C").is_null() ? j.at("C").get<double>() : 0.0;
  return p;
}

hhl::HhlProblem load_hhl_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return hhl_problem_from_json(j);
}

nlohmann::json hhl_result_to_json(const hhl::HhlResult& result) {
  return {{"state", vector_to_json(result.state)},
          {"herald_prob", result.herald_prob},
          {"fidelity_vs_oracle", result.fidelity_vs_oracle},
          {"clock_residual", result.clock_residual},
          {"ledger", ledger_to_json(result.ledger)}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace qtally::io
