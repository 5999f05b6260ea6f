#pragma once

#include <optional>
#include <vector>

#include "jetvar/constraints.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/forms.hpp"
#include "jetvar/jet_space.hpp"

namespace jetvar {

/// Second-order Lagrangian L on J^2 of a bundle with base dimension m and
/// fiber dimension n.
struct FieldLagrangian {
    int base_dim = 1;
    int fiber_dim = 1;
    Expr lagrangian;
    NormalizePolicy policy = NormalizePolicy::Expand;

    JetSpace space(int order = 2) const { return JetSpace(base_dim, fiber_dim, order); }
};

/// Checks that L lives on J^2 (OrderViolation for higher jets,
/// UnknownCoordinate for foreign symbols) and builds the Lagrangian.
FieldLagrangian make_field_lagrangian(int base_dim, int fiber_dim, const Expr& lagrangian,
                                      NormalizePolicy policy = NormalizePolicy::Expand);

struct CartanCoefficients {
    /// L2[a][i][j] = (1/n(ij)) dL/du^a_{1_i+1_j}, symmetric in i, j.
    std::vector<std::vector<std::vector<Expr>>> L2;
    /// L1[a][i] = dL/du^a_i - sum_j D_j L2[a][i][j].
    std::vector<std::vector<Expr>> L1;
    /// L0[a] = dL/du^a - sum_i D_i L1[a][i].
    std::vector<Expr> L0;
};

CartanCoefficients cartan_coefficients(const FieldLagrangian& lag);

/// dL/du - D_i dL/du_i + sum over |I| = 2 of D_I dL/du_I; equals L0.
Expr euler_lagrange_operator(const FieldLagrangian& lag, int alpha);

/// The Poincare-Cartan m-form on J^3.
JetForm poincare_cartan(const FieldLagrangian& lag, const CartanCoefficients& coeffs);
JetForm poincare_cartan(const FieldLagrangian& lag);

/// d^{m-1}x_j = i(d/dx^j) d^m x.
JetForm volume_contraction(const JetSpace& space, int direction, NormalizePolicy policy);

/// 1 if every L1, L2 projects onto J^1, 2 if onto J^2, otherwise empty.
std::optional<int> projectability_level(const FieldLagrangian& lag, const CartanCoefficients& coeffs);
std::optional<int> projectability_level(const FieldLagrangian& lag);

/// Per fiber: dL/du^a - sum_i X_i L1[a][i] with X_i the holonomic field on
/// J^3 (unknowns F^b_{J,i}, |J| = 3). Equals
/// L0 - sum (F - u_{J+1_i}) dL1/du_J and is linear in the unknowns.
std::vector<Expr> el_residual(const FieldLagrangian& lag, const CartanCoefficients& coeffs);
std::vector<Expr> el_residual(const FieldLagrangian& lag);

ConstraintChain constraint_algorithm(const FieldLagrangian& lag, const CartanCoefficients& coeffs,
                                     int max_generations = 6);
ConstraintChain constraint_algorithm(const FieldLagrangian& lag, int max_generations = 6);

struct LowerOrderComparison {
    bool forms_equal = false;
    bool lagrangians_equal = false;
};

/// Compares L with a first-order L' embedded in J^2: equality of the
/// Poincare-Cartan forms and of the Lagrangians. Throws OrderViolation when
/// L' is not first order and VerificationFailed if equal forms come with
/// different Lagrangians.
LowerOrderComparison compare_with_lower_order(const FieldLagrangian& lag, const FieldLagrangian& lower);

}  // namespace jetvar
