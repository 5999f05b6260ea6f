#pragma once

#include <cstdint>
#include <vector>

#include "jetvar/expr.hpp"

namespace jetvar {

/// Storage behind Expr. Children are interned, so shallow comparison of the
/// child pointers decides structural equality.
class Node {
public:
    ExprKind kind = ExprKind::Constant;
    std::uint64_t hash = 0;
    std::uint64_t bloom = 0;
    std::int16_t max_order = -1;
    bool has_unknown = false;
    bool has_radical = false;
    Rational number;  // constant value, or constant term of a sum
    SymbolId symbol;
    std::vector<Term> terms;
    std::vector<Factor> factors;
};

class ExprFactory {
public:
    static Expr constant(const Rational& value);
    static Expr symbol(SymbolId id);
    /// terms must already be canonical: sorted, merged, nonzero, at least one.
    static Expr add_node(Rational constant, std::vector<Term> terms);
    /// factors must already be canonical: sorted, merged, nonzero exponents.
    static Expr mul_node(std::vector<Factor> factors);
};

}  // namespace jetvar
