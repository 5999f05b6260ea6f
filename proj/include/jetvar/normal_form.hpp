#pragma once

#include "jetvar/expr.hpp"

namespace jetvar {

enum class NormalizePolicy {
    /// Full expansion to a sum of monomials over a common denominator per
    /// radical class, with cancellation of divisible denominator factors.
    Expand,
    /// Keep the light canonical form produced by construction.
    NoExpand,
};

/// Canonical form under the given policy.
///
/// With Expand, the result is a sum of terms c * m * prod(B_j^-k_j) * prod(sqrt(r)),
/// where m is a Laurent monomial in the symbols, B_j are primitive polynomials
/// with positive leading coefficient, and each radical class (set of radicands)
/// carries a single fully reduced numerator. Subexpressions outside this
/// fragment (radicands that are not polynomials, inverses of sums with more
/// than one radical) are kept as opaque atoms.
Expr normalize(const Expr& e, NormalizePolicy policy = NormalizePolicy::Expand);

inline Expr expand(const Expr& e) { return normalize(e, NormalizePolicy::Expand); }

/// Number of monomial terms of the expanded form (an expression-size measure).
std::size_t expanded_term_count(const Expr& e);

}  // namespace jetvar
