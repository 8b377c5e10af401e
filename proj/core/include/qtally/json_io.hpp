#pragma once

// JSON serialization of circuits, ledgers, problems and results.
// Complex scalars are encoded as [re, im]; matrices row-major.

#include <string>

#include <nlohmann/json.hpp>

#include "qtally/hhl.hpp"
#include "qtally/lde.hpp"
#include "qtally/sim.hpp"

namespace qtally::io {

nlohmann::json complex_to_json(const cxd& z);
nlohmann::json vector_to_json(const Eigen::VectorXcd& v);
nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::VectorXcd vector_from_json(const nlohmann::json& j);
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j);

nlohmann::json ledger_to_json(const GateCountLedger& ledger);
nlohmann::json circuit_to_json(const Circuit& circuit);

lde::LdeProblem lde_problem_from_json(const nlohmann::json& j);
lde::LdeProblem load_lde_problem(const std::string& path);
nlohmann::json lde_result_to_json(const lde::LdeResult& result);

hhl::HhlProblem hhl_problem_from_json(const nlohmann::json& j);
hhl::HhlProblem load_hhl_problem(const std::string& path);
nlohmann::json hhl_result_to_json(const hhl::HhlResult& result);

/// Writes pretty-printed JSON; creates parent directories as needed.
void write_json(const std::string& path, const nlohmann::json& j);
/// Writes a text file (CSV and friends); creates parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace qtally::io
