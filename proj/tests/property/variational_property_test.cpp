#include <gtest/gtest.h>

#include <random>

#include "jetvar/forms.hpp"
#include "jetvar/mechanics.hpp"
#include "jetvar/text.hpp"
#include "jetvar/variational.hpp"
#include "support/random_lagrangian.hpp"

using namespace jetvar;
using namespace jetvar::testing;

TEST(ProjectabilityConditions, ThreeConditionsAgree) {
    int counts[3] = {0, 0, 0};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        FieldLagrangian lag = make_field_lagrangian(2, 1, sample_lagrangian(seed));
        CartanCoefficients c = cartan_coefficients(lag);
        JetForm theta = poincare_cartan(lag, c);
        JetForm dtheta = exterior_derivative(theta);
        for (int s = 1; s <= 2; ++s) {
            bool projects = is_basic(theta, s), closed = is_semibasic(dtheta, s), coeffs = coefficient_condition(c, s);
            EXPECT_EQ(projects, coeffs) << "seed " << seed << " s " << s << " L = " << lag.lagrangian;
            EXPECT_EQ(closed, coeffs) << "seed " << seed << " s " << s << " L = " << lag.lagrangian;
        }
        std::optional<int> level = projectability_level(lag, c);
        ++counts[level ? *level : 0];
        if (level) {
            EXPECT_TRUE(is_basic(theta, *level));
            // Order bound: the Euler-Lagrange expressions live on J^{s+1}.
            EXPECT_TRUE(projects_onto(c.L0[0], *level + 1)) << "seed " << seed;
        }
    }
    // The families must exercise every outcome.
    EXPECT_GE(counts[0], 5);
    EXPECT_GE(counts[1], 5);
    EXPECT_GE(counts[2], 5);
}

TEST(ProjectabilityConditions, NoExpandAgrees) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        FieldLagrangian lag = make_field_lagrangian(2, 1, sample_lagrangian(seed));
        FieldLagrangian lazy = lag;
        lazy.policy = NormalizePolicy::NoExpand;
        EXPECT_EQ(projectability_level(lag), projectability_level(lazy)) << "seed " << seed;
        JetForm a = poincare_cartan(lag), b = poincare_cartan(lazy);
        for (int s = 1; s <= 2; ++s) EXPECT_EQ(is_basic(a, s), is_basic(b, s)) << "seed " << seed;
    }
}

TEST(ProjectabilityConditions, ResidualProlongsToL0) {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        FieldLagrangian lag = make_field_lagrangian(2, 1, sample_lagrangian(seed));
        CartanCoefficients c = cartan_coefficients(lag);
        auto r = el_residual(lag, c);
        std::unordered_map<SymbolId, Expr> prolong;
        for (SymbolId f : unknowns_in(r))
            prolong.emplace(f, Expr(Symbol::fiber_jet(f->fiber, f->index.add_unit(static_cast<std::size_t>(f->direction)))));
        EXPECT_EQ(normalize(substitute(r[0], prolong) - c.L0[0]), Expr(0)) << "seed " << seed;
        EXPECT_EQ(normalize(euler_lagrange_operator(lag, 0) - c.L0[0]), Expr(0)) << "seed " << seed;
    }
}

TEST(ProjectabilityConditions, ChainProvenance) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        FieldLagrangian lag = make_field_lagrangian(2, 1, sample_lagrangian(seed));
        ConstraintChain chain = constraint_algorithm(lag, 4);
        for (std::size_t g = 1; g < chain.generations.size(); ++g) {
            for (const Constraint& c : chain.generations[g]) {
                const Expr& parent = chain.generations[g - 1][static_cast<std::size_t>(c.parent)].expr;
                EXPECT_EQ(c.expr, normalize(total_derivative(parent, c.direction)));
            }
        }
        for (const auto& gen : chain.generations)
            for (const Constraint& c : gen) EXPECT_FALSE(c.expr.has_unknown());
    }
}

TEST(MechanicsProjectability, MechanicsBasicIffMomentaProject) {
    int projectable = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        JetSpace j2(1, 1, 2);
        Expr L = seed % 2 ? random_poly(rng, j2.coordinates(), 3, 5)
                          : random_poly(rng, {j2.x(0), q(0, 0), q(0, 1)}, 2, 2) * qe(0, 2) +
                                random_poly(rng, {j2.x(0), q(0, 0), q(0, 1)}, 3, 3);
        MechLagrangian lag = make_mech_lagrangian(1, 2, L);
        Momenta p = momenta(lag);
        JetForm theta = cartan_1form(lag, p);
        for (int s = 1; s <= 2; ++s) {
            bool cond = projects_onto(p.L[0][1], s) && projects_onto(p.L[0][2], s);
            EXPECT_EQ(is_basic(theta, s), cond) << "seed " << seed << " L = " << L;
        }
        MechProjectability level = projectability_level_mech(lag, p);
        if (level.level) {
            ++projectable;
            EXPECT_TRUE(projects_onto(p.L[0][0], *level.level + 1)) << "seed " << seed;
            ConstraintChain chain = constraint_chain_mech(lag);
            EXPECT_EQ(chain.nominal_generations, std::optional<int>(3 - *level.level));
        }
    }
    EXPECT_GE(projectable, 10);
}
