#pragma once

#include <optional>
#include <vector>

#include "jetvar/constraints.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/forms.hpp"
#include "jetvar/jet_space.hpp"
#include "jetvar/variational.hpp"

namespace jetvar {

/// Order-k Lagrangian in (t, q^a_0, ..., q^a_k); t is x1 and q^a_j the
/// fiber coordinate with one-dimensional multi-index (j).
struct MechLagrangian {
    int fiber_dim = 1;
    int order = 1;
    Expr lagrangian;
    NormalizePolicy policy = NormalizePolicy::Expand;

    JetSpace space(int jet_order) const { return JetSpace(1, fiber_dim, jet_order); }
};

/// Throws OrderViolation when L mentions q_j with j > k.
MechLagrangian make_mech_lagrangian(int fiber_dim, int order, const Expr& lagrangian,
                                    NormalizePolicy policy = NormalizePolicy::Expand);

SymbolId q(int alpha, int j);
inline Expr qe(int alpha, int j) { return Expr(q(alpha, j)); }

/// D_t.
Expr time_derivative(const Expr& e);

struct Momenta {
    /// L[a][r] for r = 0..k; L[a][k] = dL/dq_k, L[a][r] = dL/dq_r - D_t L[a][r+1].
    std::vector<std::vector<Expr>> L;
};

/// Backward recursion; throws VerificationFailed if L[a][1] disagrees with
/// the alternating sum over i of (-1)^i D_t^i dL/dq_{1+i}.
Momenta momenta(const MechLagrangian& lag);

/// sum_r L^r dq_{r-1} + (L - sum_r L^r q_r) dt on J^{2k-1}.
JetForm cartan_1form(const MechLagrangian& lag, const Momenta& p);
JetForm cartan_1form(const MechLagrangian& lag);

struct MechProjectability {
    /// Minimal s in [k-1, 2k-2] with every L^r (r >= 1) on J^s.
    std::optional<int> level;
    /// L itself does not depend on q_k.
    bool lower_order = false;
};

MechProjectability projectability_level_mech(const MechLagrangian& lag, const Momenta& p);
MechProjectability projectability_level_mech(const MechLagrangian& lag);

/// Residual per fiber: dL/dq_0 - X_t L^1 on J^{2k-1}, i.e.
/// L^0 - (F - q_{2k}) dL^1/dq_{2k-1}.
std::vector<Expr> el_residual_mech(const MechLagrangian& lag, const Momenta& p);

/// Same tangency iteration as the field case with top order 2k - 1; records
/// the nominal generation count 2k - s - 1 when projectable.
ConstraintChain constraint_chain_mech(const MechLagrangian& lag, int max_generations = 6);

/// For k == 2 the same Lagrangian read as a field theory with m = 1.
FieldLagrangian as_field_lagrangian(const MechLagrangian& lag);

/// Equality of Cartan 1-forms and of Lagrangians against a lower-order
/// Lagrangian; throws VerificationFailed when equal forms come with
/// different Lagrangians.
LowerOrderComparison compare_with_lower_order(const MechLagrangian& lag, const MechLagrangian& lower);

}  // namespace jetvar
