#pragma once

#include <random>

#include "jetvar/jet_space.hpp"
#include "jetvar/variational.hpp"

namespace jetvar::testing {

inline Expr random_poly(std::mt19937_64& rng, const std::vector<SymbolId>& vars, int max_degree, int terms) {
    std::uniform_int_distribution<int> coeff(-3, 3), pick(0, static_cast<int>(vars.size()) - 1),
        deg(0, max_degree);
    Expr out(0);
    for (int t = 0; t < terms; ++t) {
        Expr term(coeff(rng));
        int d = deg(rng);
        for (int j = 0; j < d; ++j) term = term * Expr(vars[static_cast<std::size_t>(pick(rng))]);
        out = out + term;
    }
    return out;
}

/// Polynomial Lagrangians of degree <= 3 on J^2 (m = 2, n = 1) from three
/// families: unrestricted, f(x, u) times a second derivative plus a first-order
/// part, and a(u, u_i) times a second derivative plus a first-order part.
inline Expr sample_lagrangian(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    JetSpace j2(2, 1, 2);
    std::vector<SymbolId> base{j2.x(0), j2.x(1), j2.u(0, {0, 0})};
    std::vector<SymbolId> first = base;
    first.push_back(j2.u(0, {1, 0}));
    first.push_back(j2.u(0, {0, 1}));
    std::vector<SymbolId> seconds = j2.fiber_coordinates(2);
    std::uniform_int_distribution<int> which(0, 2);
    Expr u2 = Expr(seconds[static_cast<std::size_t>(which(rng))]);
    switch (seed % 3) {
        case 0:
            return random_poly(rng, j2.coordinates(), 3, 5);
        case 1:
            return random_poly(rng, base, 2, 2) * u2 + random_poly(rng, first, 3, 3);
        default: {
            std::vector<SymbolId> fiber_first{j2.u(0, {0, 0}), j2.u(0, {1, 0}), j2.u(0, {0, 1})};
            return random_poly(rng, fiber_first, 2, 3) * u2 + random_poly(rng, first, 3, 3);
        }
    }
}

inline bool coefficient_condition(const CartanCoefficients& c, int s) {
    for (std::size_t a = 0; a < c.L1.size(); ++a) {
        for (std::size_t i = 0; i < c.L1[a].size(); ++i) {
            if (!projects_onto(c.L1[a][i], s)) return false;
            for (const Expr& e : c.L2[a][i])
                if (!projects_onto(e, s)) return false;
        }
    }
    return true;
}

}  // namespace jetvar::testing
