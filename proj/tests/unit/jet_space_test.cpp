#include <gtest/gtest.h>

#include <random>

#include "jetvar/errors.hpp"
#include "jetvar/jet_space.hpp"
#include "jetvar/normal_form.hpp"
#include "jetvar/text.hpp"

using namespace jetvar;

namespace {

Expr P(const std::string& text) { return parse_expr(text); }

/// Random polynomial of degree <= 3 in the given coordinates.
Expr random_poly(std::mt19937_64& rng, const std::vector<SymbolId>& vars, int terms) {
    std::uniform_int_distribution<int> coeff(-3, 3), pick(0, static_cast<int>(vars.size()) - 1), deg(0, 3);
    Expr out(0);
    for (int t = 0; t < terms; ++t) {
        Expr term(coeff(rng));
        int d = deg(rng);
        for (int j = 0; j < d; ++j) term = term * Expr(vars[static_cast<std::size_t>(pick(rng))]);
        out = out + term;
    }
    return out;
}

}  // namespace

TEST(JetSpace, CoordinateCounts) {
    JetSpace j(2, 1, 2);
    EXPECT_EQ(j.coordinates().size(), 8u);
    EXPECT_EQ(j.fiber_coordinates(2).size(), 3u);
    EXPECT_EQ(j.vertical_basis(1).size(), 3u);
    EXPECT_EQ(j.vertical_basis(-1).size(), 6u);
    JetSpace g(4, 10, 2);
    EXPECT_EQ(g.coordinates().size(), 4u + 10u * (1 + 4 + 10));
}

TEST(JetSpace, AdmitsAndChecks) {
    JetSpace j(2, 1, 1);
    EXPECT_TRUE(j.admits(symbol_from_name("u1_[1,0]")));
    EXPECT_FALSE(j.admits(symbol_from_name("u1_[1,1]")));
    EXPECT_FALSE(j.admits(symbol_from_name("x3")));
    EXPECT_TRUE(j.admits(symbol_from_name("lambda")));
    EXPECT_THROW(j.check(P("u1_[2,0] + x1")), UnknownCoordinate);
    EXPECT_NO_THROW(j.check(P("u1_[0,1]*x2 + lambda")));
    EXPECT_THROW(j.u(1, MultiIndex{0, 0}), UnknownCoordinate);
    EXPECT_THROW(j.x(2), UnknownCoordinate);
}

TEST(TotalDerivative, Coordinates) {
    JetSpace j(2, 1, 2);
    EXPECT_EQ(total_derivative(j, j.xe(0), 0), Expr(1));
    EXPECT_EQ(total_derivative(j, j.xe(1), 0), Expr(0));
    EXPECT_EQ(total_derivative(j, j.ue(0, {1, 0}), 0), j.ue(0, {2, 0}));
    EXPECT_EQ(total_derivative(j, j.ue(0, {1, 0}), 1), j.ue(0, {1, 1}));
    EXPECT_EQ(iterated_total_derivative(j, j.ue(0, {0, 0}), MultiIndex{1, 1}), j.ue(0, {1, 1}));
}

TEST(TotalDerivative, ProductRuleInMechanics) {
    JetSpace j(1, 1, 2);
    EXPECT_EQ(normalize(total_derivative(j, P("q1_0*q1_1"), 0)), P("q1_1^2 + q1_0*q1_2"));
    EXPECT_EQ(normalize(total_derivative(j, P("x1*q1_1^2"), 0)), P("q1_1^2 + 2*x1*q1_1*q1_2"));
}

TEST(TotalDerivative, Errors) {
    JetSpace j(2, 1, 1);
    EXPECT_THROW(total_derivative(j, P("u1_[0,2]"), 0), UnknownCoordinate);
    EXPECT_THROW(total_derivative(j, P("u1_[0,1]"), 2), UnknownCoordinate);
    EXPECT_THROW(iterated_total_derivative(j, P("u1_[0,0]"), MultiIndex{1}), UnknownCoordinate);
}

TEST(TotalDerivative, CommuteAndLeibniz) {
    JetSpace j(2, 2, 2);
    std::mt19937_64 rng(11);
    auto vars = j.coordinates();
    for (int trial = 0; trial < 25; ++trial) {
        Expr f = random_poly(rng, vars, 4), g = random_poly(rng, vars, 3);
        Expr d12 = total_derivative(total_derivative(f, 0), 1);
        Expr d21 = total_derivative(total_derivative(f, 1), 0);
        EXPECT_EQ(normalize(d12 - d21), Expr(0));
        for (int i = 0; i < 2; ++i) {
            Expr lhs = total_derivative(f * g, i);
            Expr rhs = total_derivative(f, i) * g + f * total_derivative(g, i);
            EXPECT_EQ(normalize(lhs - rhs), Expr(0));
        }
    }
}

TEST(TotalDerivative, TangencyDefect) {
    // D_i f - X_i f = sum over top-order J of (u_{J+1_i} - F_{J,i}) df/du_J.
    JetSpace j(2, 1, 2);
    std::mt19937_64 rng(5);
    auto vars = j.coordinates();
    for (int trial = 0; trial < 20; ++trial) {
        Expr f = random_poly(rng, vars, 5);
        for (int i = 0; i < 2; ++i) {
            TangencyDerivation x(i, 2);
            Expr defect = total_derivative(f, i) - apply(x, f);
            Expr expected(0);
            for (SymbolId v : j.fiber_coordinates(2)) {
                Expr next = Expr(Symbol::fiber_jet(0, v->index.add_unit(static_cast<std::size_t>(i))));
                expected = expected + (next - Expr(unknown_symbol(0, v->index, i))) * diff(f, v);
            }
            EXPECT_EQ(normalize(defect - expected), Expr(0));
        }
    }
}

TEST(TotalDerivative, TangencyUnknownNames) {
    EXPECT_EQ(symbol_name(unknown_symbol(0, MultiIndex{1, 0}, 1)), "F1_[1,0]_2");
    EXPECT_EQ(symbol_name(unknown_symbol(0, MultiIndex{3}, 0)), "F1_3");
    TangencyDerivation x(0, 1);
    EXPECT_EQ(apply(x, P("q1_1")), P("F1_1"));
    EXPECT_EQ(apply(x, P("q1_0")), P("q1_1"));
    EXPECT_THROW(apply(x, P("q1_2")), UnknownCoordinate);
}

TEST(Projection, CancellingHigherOrder) {
    Expr e = P("(u1_[2,0] + u1_[0,0])^2 - u1_[2,0]^2 - 2*u1_[0,0]*u1_[2,0]");
    EXPECT_EQ(e.max_order(), 2);
    EXPECT_TRUE(projects_onto(e, 0));
    EXPECT_TRUE(projects_onto(e, 0, NormalizePolicy::NoExpand));
    EXPECT_EQ(normalize(drop_orders_above(e, 0)), P("u1_[0,0]^2"));
    Expr f = P("u1_[1,0]*u1_[0,1] + u1_[0,0]");
    EXPECT_FALSE(projects_onto(f, 0));
    EXPECT_FALSE(projects_onto(f, 0, NormalizePolicy::NoExpand));
    EXPECT_TRUE(projects_onto(f, 1, NormalizePolicy::NoExpand));
}
