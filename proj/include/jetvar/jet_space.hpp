#pragma once

#include <string>
#include <vector>

#include "jetvar/expr.hpp"
#include "jetvar/multi_index.hpp"
#include "jetvar/normal_form.hpp"
#include "jetvar/symbol.hpp"

namespace jetvar {

/// Coordinates (x^i, u^a_I), 0 <= |I| <= k, of the jet bundle J^k of a bundle
/// with base dimension m and fiber dimension n.
class JetSpace {
public:
    JetSpace(int base_dim, int fiber_dim, int order);

    int base_dim() const noexcept { return m_; }
    int fiber_dim() const noexcept { return n_; }
    int order() const noexcept { return k_; }

    SymbolId x(int i) const;
    SymbolId u(int alpha, const MultiIndex& index) const;
    Expr xe(int i) const { return Expr(x(i)); }
    Expr ue(int alpha, const MultiIndex& index) const { return Expr(u(alpha, index)); }

    /// Fiber coordinates with |I| == level, ordered by fiber then multi-index.
    std::vector<SymbolId> fiber_coordinates(int level) const;
    /// x^1..x^m followed by the fiber coordinates of levels 0..k.
    std::vector<SymbolId> coordinates() const;

    /// True for base coordinates and fiber coordinates of this space.
    /// Auxiliary symbols are treated as parameters and always admitted.
    bool admits(SymbolId s) const;
    /// Throws UnknownCoordinate when e mentions a symbol the space does not admit.
    void check(const Expr& e) const;

    /// Same (m, n) with a different order.
    JetSpace with_order(int order) const { return JetSpace(m_, n_, order); }

    /// The fiber jet coordinates u^b_J with s < |J| <= k.
    std::vector<SymbolId> vertical_basis(int s) const;

    bool operator==(const JetSpace&) const = default;

private:
    int m_, n_, k_;
};

/// D_i as a derivation on fiber coordinates of any order: D_i x^j = delta,
/// D_i u^a_I = u^a_{I+1_i}. Unknowns and auxiliary symbols are constants.
const Derivation& total_derivation(int direction);

/// D_i e without any coordinate check.
Expr total_derivative(const Expr& e, int direction);

/// D_i e for e on the given jet space; the result lives on order k + 1.
/// Throws UnknownCoordinate when e leaves the space.
Expr total_derivative(const JetSpace& space, const Expr& e, int direction);

/// D_I e = D_1^{I(1)} ... D_m^{I(m)} e, applied in the order i = 1..m.
Expr iterated_total_derivative(const Expr& e, const MultiIndex& index);
Expr iterated_total_derivative(const JetSpace& space, const Expr& e, const MultiIndex& index);

/// The tangency field X_i of a holonomic multivector field on J^top:
/// X_i u^a_J = F^a_{J,i} for |J| == top and u^a_{J+1_i} below.
class TangencyDerivation final : public Derivation {
public:
    TangencyDerivation(int direction, int top) : i_(direction), top_(top) {}
    std::optional<Expr> component(SymbolId s) const override;
    std::string key() const override { return "X" + std::to_string(i_) + "@" + std::to_string(top_); }

private:
    int i_, top_;
};

/// The unknown F^a_{J,i} (value of u^a_{J+1_i} along the multivector field).
SymbolId unknown_symbol(int alpha, const MultiIndex& index, int direction);

/// Whether e depends on no fiber coordinate of order > s. NoExpand decides
/// higher-order dependence probabilistically; Expand uses the normal form.
bool projects_onto(const Expr& e, int s, NormalizePolicy policy = NormalizePolicy::Expand);

/// Replaces fiber coordinates of order > s by zero. Valid (value preserving)
/// when projects_onto(e, s); removes coordinates that only cancel.
Expr drop_orders_above(const Expr& e, int s);

}  // namespace jetvar
