#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "jetvar/constraints.hpp"
#include "jetvar/dsl.hpp"
#include "jetvar/gravity_verify.hpp"

namespace jetvar {

inline constexpr const char* kReportSchema = "jetvar-report/1";
inline constexpr const char* kFixtureSchema = "jetvar-fixtures/1";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
    std::optional<int> max_generations;
    std::optional<int> points;
    std::optional<std::uint64_t> seed;
    std::optional<int> dim;
    std::string fixtures;
    bool timing = false;
    /// Expressions with a larger tree are reported by DAG size only.
    std::uint64_t print_limit = 4000;
};

struct ReportDocument {
    nlohmann::json body;
    /// 0 on success, 2 when a verification failed.
    int exit_code = 0;
};

/// Text of e, or {"dag_size", "tree_size"} when the tree exceeds `limit`.
nlohmann::json expr_json(const Expr& e, std::uint64_t limit);

/// {"status", "chain": [[expr, ...], ...], "constraints": [...provenance...], ...}
nlohmann::json chain_json(const ConstraintChain& chain, std::uint64_t limit);

/// Commands: analyze, constraints, gravity-verify, fixtures-check. The input
/// is ignored by fixtures-check, and by gravity-verify when options.dim is
/// set. Throws on input errors.
ReportDocument run(const std::string& command, const LagrangianSpec& spec, const RunOptions& options);

/// Compares the quantities in a fixture file (schema kFixtureSchema) with
/// the library's own values.
ReportDocument fixtures_check(const nlohmann::json& fixtures, const RunOptions& options);

/// Indented key: value rendering of a report.
std::string render_text(const nlohmann::json& report);

}  // namespace jetvar
