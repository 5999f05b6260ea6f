#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jetvar/expr.hpp"
#include "jetvar/normal_form.hpp"

namespace jetvar {

enum class ChainStatus { TerminatedIdentically, TerminatedWithResidual, MaxIterations };

std::string to_string(ChainStatus status);

/// One F-free constraint. Generation-1 constraints come from the
/// Euler-Lagrange residual of fiber `fiber`; later ones are D_direction of
/// constraint `parent` (index into the previous generation).
struct Constraint {
    Expr expr;
    int generation = 1;
    int parent = -1;
    int direction = -1;
    int fiber = -1;
    /// Generation-1 constraint that vanishes identically; kept for reporting
    /// and not propagated.
    bool identically_zero = false;

    /// "EL" or "D_<i> of parent" with one-based direction.
    std::string derivation() const;
};

/// An equation containing unknowns F. source_generation 0 means the
/// Euler-Lagrange residual of `fiber`; otherwise it is X_direction of
/// constraint `parent` in generation source_generation.
struct ResidualEquation {
    Expr expr;
    int source_generation = 0;
    int parent = -1;
    int direction = -1;
    int fiber = -1;
};

struct ConstraintChain {
    std::vector<std::vector<Constraint>> generations;
    std::vector<ResidualEquation> residual_equations;
    ChainStatus status = ChainStatus::TerminatedIdentically;
    /// Highest jet order of the multivector field (the F symbols sit above it).
    int top_order = 0;
    /// True when the residual equations fix every unknown they contain
    /// (the Jacobian with respect to the unknowns has full column rank).
    bool determines_unknowns = false;
    /// Explicit values of the unknowns when the residual system is small,
    /// square and solvable exactly.
    std::vector<std::pair<SymbolId, Expr>> solved_unknowns;
    /// Mechanics only: 2k - s - 1 for a projectable Lagrangian.
    std::optional<int> nominal_generations;

    /// Number of generations holding at least one nonvanishing constraint.
    int effective_generations() const;
};

struct ChainInput {
    int base_dim = 1;
    int top_order = 3;
    /// Euler-Lagrange residual per fiber: dL/du - sum_i X_i L^i.
    std::vector<Expr> residuals;
    /// L^0 per fiber; becomes the constraint when the residual has no F.
    std::vector<Expr> holonomic;
    NormalizePolicy policy = NormalizePolicy::Expand;
    int max_generations = 6;
};

/// The tangency iteration: a constraint projecting onto J^{top-1} is
/// differentiated totally into the next generation, any other yields the
/// F-containing equation X_i(phi) = 0 as a residual.
ConstraintChain run_constraint_algorithm(const ChainInput& input);

/// Unknown F symbols in the expressions, sorted by symbol order.
std::vector<SymbolId> unknowns_in(const std::vector<Expr>& exprs);

}  // namespace jetvar
