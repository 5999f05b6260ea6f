#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "jetvar/expr.hpp"

namespace jetvar {

/// Canonical infix text: terms sorted by their text, rational coefficients
/// in front ("-1/2*q1_2^2"), exponents as ^k, ^(-k), ^(1/2), ^(-3/2).
/// parse_expr(to_string(e)) reproduces e.
std::string to_string(const Expr& e);

inline std::ostream& operator<<(std::ostream& out, const Expr& e) { return out << to_string(e); }

/// Maps an identifier to a symbol; may throw (UnknownCoordinate,
/// OrderViolation). Line and column locate the identifier.
using SymbolResolver = std::function<SymbolId(std::string_view name, int line, int column)>;

/// Decodes canonical coordinate names (x<i>, u<a>_[..], q<a>_<j>, F..);
/// anything else becomes an auxiliary symbol.
SymbolId symbol_from_name(std::string_view name);

/// Parses infix + - * / ^ with integer and p/q literals, parentheses and
/// sqrt(...). Exponents must be constant integers or half-integers.
/// Throws SyntaxError carrying the position within `text`; `line_offset`
/// shifts reported lines.
Expr parse_expr(std::string_view text, const SymbolResolver& resolve = {}, int line_offset = 0);

/// Simultaneous substitution followed by normalization under the default
/// policy. Throws CyclicBinding when bindings refer to each other in a loop
/// of two or more symbols; a binding may mention its own symbol.
Expr substitute(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings);

/// Simultaneous substitution without normalization.
Expr substitute_raw(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings);

}  // namespace jetvar
