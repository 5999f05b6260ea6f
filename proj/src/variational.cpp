#include "jetvar/variational.hpp"

#include "jetvar/errors.hpp"
#include "jetvar/text.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

namespace {

Expr clean(const Expr& e, NormalizePolicy policy) { return policy == NormalizePolicy::Expand ? normalize(e) : e; }

MultiIndex second(std::size_t m, std::size_t i, std::size_t j) {
    return MultiIndex::unit(m, i) + MultiIndex::unit(m, j);
}

}  // namespace

FieldLagrangian make_field_lagrangian(int base_dim, int fiber_dim, const Expr& lagrangian, NormalizePolicy policy) {
    if (lagrangian.max_order() > 2)
        throw OrderViolation("a second-order Lagrangian may not depend on jets of order " +
                             std::to_string(lagrangian.max_order()));
    JetSpace(base_dim, fiber_dim, 2).check(lagrangian);
    if (lagrangian.has_unknown()) throw UnknownCoordinate("a Lagrangian may not contain unknowns");
    return FieldLagrangian{base_dim, fiber_dim, lagrangian, policy};
}

CartanCoefficients cartan_coefficients(const FieldLagrangian& lag) {
    const JetSpace j2 = lag.space(2);
    const auto m = static_cast<std::size_t>(lag.base_dim);
    const auto n = static_cast<std::size_t>(lag.fiber_dim);
    const Expr& L = lag.lagrangian;
    CartanCoefficients c;
    c.L2.assign(n, std::vector<std::vector<Expr>>(m, std::vector<Expr>(m)));
    c.L1.assign(n, std::vector<Expr>(m));
    c.L0.assign(n, Expr(0));
    for (std::size_t a = 0; a < n; ++a) {
        const int alpha = static_cast<int>(a);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                Expr d = diff(L, j2.u(alpha, second(m, i, j)));
                Expr v = clean(i == j ? d : Expr(Rational(1, 2)) * d, lag.policy);
                c.L2[a][i][j] = v;
                c.L2[a][j][i] = v;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            Expr v = diff(L, j2.u(alpha, MultiIndex::unit(m, i)));
            for (std::size_t j = 0; j < m; ++j) v = v - total_derivative(c.L2[a][i][j], static_cast<int>(j));
            c.L1[a][i] = clean(v, lag.policy);
        }
        Expr v = diff(L, j2.u(alpha, MultiIndex(m)));
        for (std::size_t i = 0; i < m; ++i) v = v - total_derivative(c.L1[a][i], static_cast<int>(i));
        c.L0[a] = clean(v, lag.policy);
    }
    return c;
}

Expr euler_lagrange_operator(const FieldLagrangian& lag, int alpha) {
    const JetSpace j2 = lag.space(2);
    const auto m = static_cast<std::size_t>(lag.base_dim);
    const Expr& L = lag.lagrangian;
    Expr out = diff(L, j2.u(alpha, MultiIndex(m)));
    for (std::size_t i = 0; i < m; ++i)
        out = out - total_derivative(diff(L, j2.u(alpha, MultiIndex::unit(m, i))), static_cast<int>(i));
    for (const MultiIndex& I : multi_indices_of_length(m, 2))
        out = out + iterated_total_derivative(diff(L, j2.u(alpha, I)), I);
    return clean(out, lag.policy);
}

JetForm volume_contraction(const JetSpace& space, int direction, NormalizePolicy policy) {
    return interior_product(VectorField::coordinate(space.x(direction)), JetForm::volume(space, policy));
}

JetForm poincare_cartan(const FieldLagrangian& lag, const CartanCoefficients& c) {
    const JetSpace j3 = lag.space(3);
    const auto m = static_cast<std::size_t>(lag.base_dim);
    const NormalizePolicy p = lag.policy;
    std::vector<JetForm> contractions;
    for (std::size_t i = 0; i < m; ++i) contractions.push_back(volume_contraction(j3, static_cast<int>(i), p));

    JetForm theta(j3, static_cast<int>(m), p);
    Expr h = lag.lagrangian;
    for (std::size_t a = 0; a < c.L0.size(); ++a) {
        const int alpha = static_cast<int>(a);
        JetForm du = JetForm::monomial(j3, {j3.u(alpha, MultiIndex(m))}, Expr(1), p);
        for (std::size_t i = 0; i < m; ++i) {
            theta = theta + wedge(du, contractions[i]).scaled(c.L1[a][i]);
            h = h - c.L1[a][i] * j3.ue(alpha, MultiIndex::unit(m, i));
            JetForm dui = JetForm::monomial(j3, {j3.u(alpha, MultiIndex::unit(m, i))}, Expr(1), p);
            for (std::size_t j = 0; j < m; ++j) {
                theta = theta + wedge(dui, contractions[j]).scaled(c.L2[a][i][j]);
                h = h - c.L2[a][i][j] * j3.ue(alpha, second(m, i, j));
            }
        }
    }
    return theta + JetForm::volume(j3, p).scaled(h);
}

JetForm poincare_cartan(const FieldLagrangian& lag) { return poincare_cartan(lag, cartan_coefficients(lag)); }

std::optional<int> projectability_level(const FieldLagrangian& lag, const CartanCoefficients& c) {
    for (int s = 1; s <= 2; ++s) {
        bool ok = true;
        for (std::size_t a = 0; a < c.L1.size() && ok; ++a) {
            for (std::size_t i = 0; i < c.L1[a].size() && ok; ++i) {
                ok = projects_onto(c.L1[a][i], s, lag.policy);
                for (std::size_t j = 0; j < c.L2[a][i].size() && ok; ++j) ok = projects_onto(c.L2[a][i][j], s, lag.policy);
            }
        }
        if (ok) return s;
    }
    return std::nullopt;
}

std::optional<int> projectability_level(const FieldLagrangian& lag) {
    return projectability_level(lag, cartan_coefficients(lag));
}

std::vector<Expr> el_residual(const FieldLagrangian& lag, const CartanCoefficients& c) {
    const JetSpace j2 = lag.space(2);
    const auto m = static_cast<std::size_t>(lag.base_dim);
    std::vector<Expr> out;
    for (std::size_t a = 0; a < c.L1.size(); ++a) {
        Expr r = diff(lag.lagrangian, j2.u(static_cast<int>(a), MultiIndex(m)));
        for (std::size_t i = 0; i < m; ++i) r = r - apply(TangencyDerivation(static_cast<int>(i), 3), c.L1[a][i]);
        out.push_back(clean(r, lag.policy));
    }
    return out;
}

std::vector<Expr> el_residual(const FieldLagrangian& lag) { return el_residual(lag, cartan_coefficients(lag)); }

ConstraintChain constraint_algorithm(const FieldLagrangian& lag, const CartanCoefficients& c, int max_generations) {
    ChainInput input;
    input.base_dim = lag.base_dim;
    input.top_order = 3;
    input.residuals = el_residual(lag, c);
    input.holonomic = c.L0;
    input.policy = lag.policy;
    input.max_generations = max_generations;
    return run_constraint_algorithm(input);
}

ConstraintChain constraint_algorithm(const FieldLagrangian& lag, int max_generations) {
    return constraint_algorithm(lag, cartan_coefficients(lag), max_generations);
}

LowerOrderComparison compare_with_lower_order(const FieldLagrangian& lag, const FieldLagrangian& lower) {
    if (lower.lagrangian.max_order() > 1)
        throw OrderViolation("the comparison Lagrangian must be of first order");
    if (lower.base_dim != lag.base_dim || lower.fiber_dim != lag.fiber_dim)
        throw std::invalid_argument("Lagrangians live on different bundles");
    LowerOrderComparison out;
    out.forms_equal = forms_equal(poincare_cartan(lag), poincare_cartan(lower));
    out.lagrangians_equal = is_zero(lag.lagrangian - lower.lagrangian, lag.policy);
    if (out.forms_equal && !out.lagrangians_equal)
        throw VerificationFailed("equal Poincare-Cartan forms with different Lagrangians");
    return out;
}

}  // namespace jetvar
