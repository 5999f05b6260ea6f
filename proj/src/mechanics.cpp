#include "jetvar/mechanics.hpp"

#include "jetvar/errors.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

namespace {

Expr clean(const Expr& e, NormalizePolicy policy) { return policy == NormalizePolicy::Expand ? normalize(e) : e; }

}  // namespace

SymbolId q(int alpha, int j) { return SymbolId::intern(Symbol::fiber_jet(alpha, MultiIndex{j})); }

Expr time_derivative(const Expr& e) { return total_derivative(e, 0); }

MechLagrangian make_mech_lagrangian(int fiber_dim, int order, const Expr& lagrangian, NormalizePolicy policy) {
    if (order < 1) throw std::invalid_argument("mechanics order must be at least 1");
    if (lagrangian.max_order() > order)
        throw OrderViolation("an order-" + std::to_string(order) + " Lagrangian may not depend on q_" +
                             std::to_string(lagrangian.max_order()));
    JetSpace(1, fiber_dim, order).check(lagrangian);
    if (lagrangian.has_unknown()) throw UnknownCoordinate("a Lagrangian may not contain unknowns");
    return MechLagrangian{fiber_dim, order, lagrangian, policy};
}

Momenta momenta(const MechLagrangian& lag) {
    const int k = lag.order;
    const Expr& L = lag.lagrangian;
    Momenta p;
    p.L.assign(static_cast<std::size_t>(lag.fiber_dim), std::vector<Expr>(static_cast<std::size_t>(k + 1)));
    for (int a = 0; a < lag.fiber_dim; ++a) {
        auto& row = p.L[static_cast<std::size_t>(a)];
        row[static_cast<std::size_t>(k)] = clean(diff(L, q(a, k)), lag.policy);
        for (int r = k - 1; r >= 0; --r)
            row[static_cast<std::size_t>(r)] =
                clean(diff(L, q(a, r)) - time_derivative(row[static_cast<std::size_t>(r + 1)]), lag.policy);

        Expr alternating(0);
        for (int i = 0; i <= k - 1; ++i) {
            Expr term = diff(L, q(a, 1 + i));
            for (int t = 0; t < i; ++t) term = time_derivative(term);
            alternating = i % 2 == 0 ? alternating + term : alternating - term;
        }
        if (!is_zero(alternating - row[1], lag.policy))
            throw VerificationFailed("momentum recursion disagrees with the alternating sum for L^1");
    }
    return p;
}

JetForm cartan_1form(const MechLagrangian& lag, const Momenta& p) {
    const JetSpace space = lag.space(2 * lag.order - 1);
    JetForm theta(space, 1, lag.policy);
    Expr h = lag.lagrangian;
    for (int a = 0; a < lag.fiber_dim; ++a) {
        for (int r = 1; r <= lag.order; ++r) {
            const Expr& lr = p.L[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)];
            theta.add({q(a, r - 1)}, lr);
            h = h - lr * qe(a, r);
        }
    }
    theta.add({space.x(0)}, h);
    return theta;
}

JetForm cartan_1form(const MechLagrangian& lag) { return cartan_1form(lag, momenta(lag)); }

MechProjectability projectability_level_mech(const MechLagrangian& lag, const Momenta& p) {
    const int k = lag.order;
    MechProjectability out;
    out.lower_order = projects_onto(lag.lagrangian, k - 1, lag.policy);
    for (int s = k - 1; s <= 2 * k - 2 && !out.level; ++s) {
        bool ok = true;
        for (const auto& row : p.L)
            for (int r = 1; r <= k && ok; ++r) ok = projects_onto(row[static_cast<std::size_t>(r)], s, lag.policy);
        if (ok) out.level = s;
    }
    return out;
}

MechProjectability projectability_level_mech(const MechLagrangian& lag) {
    return projectability_level_mech(lag, momenta(lag));
}

std::vector<Expr> el_residual_mech(const MechLagrangian& lag, const Momenta& p) {
    TangencyDerivation x(0, 2 * lag.order - 1);
    std::vector<Expr> out;
    for (int a = 0; a < lag.fiber_dim; ++a)
        out.push_back(clean(diff(lag.lagrangian, q(a, 0)) - apply(x, p.L[static_cast<std::size_t>(a)][1]), lag.policy));
    return out;
}

ConstraintChain constraint_chain_mech(const MechLagrangian& lag, int max_generations) {
    Momenta p = momenta(lag);
    ChainInput input;
    input.base_dim = 1;
    input.top_order = 2 * lag.order - 1;
    input.residuals = el_residual_mech(lag, p);
    for (const auto& row : p.L) input.holonomic.push_back(row[0]);
    input.policy = lag.policy;
    input.max_generations = max_generations;
    ConstraintChain chain = run_constraint_algorithm(input);
    if (auto s = projectability_level_mech(lag, p).level) chain.nominal_generations = 2 * lag.order - *s - 1;
    return chain;
}

FieldLagrangian as_field_lagrangian(const MechLagrangian& lag) {
    if (lag.order != 2) throw std::invalid_argument("only second-order mechanics is a second-order field theory");
    return FieldLagrangian{1, lag.fiber_dim, lag.lagrangian, lag.policy};
}

LowerOrderComparison compare_with_lower_order(const MechLagrangian& lag, const MechLagrangian& lower) {
    if (lower.order >= lag.order) throw OrderViolation("the comparison Lagrangian must be of lower order");
    if (lower.fiber_dim != lag.fiber_dim) throw std::invalid_argument("Lagrangians live on different bundles");
    LowerOrderComparison out;
    out.forms_equal = forms_equal(cartan_1form(lag), cartan_1form(lower));
    out.lagrangians_equal = is_zero(lag.lagrangian - lower.lagrangian, lag.policy);
    if (out.forms_equal && !out.lagrangians_equal)
        throw VerificationFailed("equal Cartan forms with different Lagrangians");
    return out;
}

}  // namespace jetvar
