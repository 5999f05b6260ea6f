#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "jetvar/symbol.hpp"

namespace jetvar {

using Rational = mpq_class;

/// Exponent restricted to integers and half-integers; stored doubled.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr HalfInt(int value) : twice_(2 * value) {}  // NOLINT(implicit)
    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }
    /// Throws UnsupportedExponent unless the denominator is 1 or 2.
    static HalfInt from_rational(const Rational& q);

    constexpr int twice() const noexcept { return twice_; }
    constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }
    /// Floor of the value.
    constexpr int floor() const noexcept { return twice_ >= 0 ? twice_ / 2 : -((-twice_ + 1) / 2); }
    Rational to_rational() const {
        Rational q(twice_, 2);
        q.canonicalize();
        return q;
    }

    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    /// Product with an integer.
    constexpr HalfInt times(int k) const { return from_twice(twice_ * k); }
    constexpr bool operator==(const HalfInt&) const = default;
    constexpr auto operator<=>(const HalfInt&) const = default;

private:
    int twice_ = 0;
};

enum class ExprKind : std::uint8_t { Constant, Symbol, Add, Mul };

class Node;
struct Term;
struct Factor;

/// Immutable, interned symbolic expression. Two structurally equal expressions
/// share one node, so == is pointer comparison. Construction applies the light
/// canonical form: sums and products are flattened and sorted, like terms and
/// equal bases are collected, rational constants are folded, and a rational
/// multiple of a sum is distributed. Products of sums are not expanded here;
/// see normalize().
class Expr {
public:
    Expr();
    Expr(int value);                 // NOLINT(implicit)
    Expr(long value);                // NOLINT(implicit)
    Expr(const Rational& value);     // NOLINT(implicit)
    explicit Expr(SymbolId symbol);
    explicit Expr(const Symbol& symbol);

    ExprKind kind() const noexcept;
    bool is_constant() const noexcept { return kind() == ExprKind::Constant; }
    bool is_zero_constant() const noexcept;
    bool is_one_constant() const noexcept;
    bool is_symbol() const noexcept { return kind() == ExprKind::Symbol; }

    /// Constant value, or the constant term of a sum (0 for other kinds).
    const Rational& constant() const noexcept;
    SymbolId symbol() const;
    /// Non-constant terms of a sum; each term carries no leading rational.
    std::span<const Term> terms() const noexcept;
    std::span<const Factor> factors() const noexcept;

    std::uint64_t hash() const noexcept;
    /// Largest jet order |I| among fiber coordinates present, -1 if none.
    int max_order() const noexcept;
    bool has_unknown() const noexcept;
    bool has_radical() const noexcept;
    /// Cheap may-contain test; false means the symbol is certainly absent.
    bool may_contain(SymbolId s) const noexcept;

    const Node* node() const noexcept { return node_.get(); }

    bool operator==(const Expr& other) const noexcept { return node_ == other.node_; }

    Expr operator-() const;
    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const Expr& o);
    Expr& operator/=(const Expr& o);

private:
    friend class ExprFactory;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Term {
    Expr expr;
    Rational coeff;
};

struct Factor {
    Expr base;
    HalfInt exponent;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

Expr pow(const Expr& base, HalfInt exponent);
inline Expr pow(const Expr& base, int exponent) { return pow(base, HalfInt(exponent)); }
/// Throws UnsupportedExponent for denominators other than 1 and 2.
Expr pow(const Expr& base, const Rational& exponent);
Expr sqrt(const Expr& e);

/// constant + sum of coeff * expr, built in one pass.
Expr sum(const Rational& constant, std::vector<Term> terms);
Expr sum(const std::vector<Expr>& items);
/// coeff * product of base^exponent, built in one pass.
Expr product(const Rational& coeff, std::vector<Factor> factors);
Expr product(const std::vector<Expr>& items);

/// Splits e into (c, u) with e == c*u and u carrying no leading rational.
std::pair<Rational, Expr> split_coefficient(const Expr& e);

/// Partial derivative; every other symbol is independent.
Expr diff(const Expr& e, SymbolId s);

/// A derivation determined by its action on symbols: V(s) = component(s),
/// extended by linearity and the Leibniz rule. `key` identifies the derivation
/// in the memo cache and must be unique per distinct action.
class Derivation {
public:
    virtual ~Derivation() = default;
    /// Empty result means V(s) = 0.
    virtual std::optional<Expr> component(SymbolId s) const = 0;
    /// Fast reject: false when V annihilates every symbol of e.
    virtual bool may_act_on(const Expr& e) const { (void)e; return true; }
    virtual std::string key() const = 0;
};

Expr apply(const Derivation& v, const Expr& e);

/// Derivation given by an explicit symbol -> component table.
class TableDerivation final : public Derivation {
public:
    explicit TableDerivation(std::unordered_map<SymbolId, Expr> components);
    std::optional<Expr> component(SymbolId s) const override;
    bool may_act_on(const Expr& e) const override;
    std::string key() const override { return key_; }

private:
    std::unordered_map<SymbolId, Expr> components_;
    std::uint64_t bloom_ = 0;
    std::string key_;
};

/// Symbols occurring in e, sorted by symbol_less.
std::vector<SymbolId> free_symbols(const Expr& e);
bool contains_symbol(const Expr& e, SymbolId s);

/// Number of distinct nodes reachable from e.
std::size_t dag_size(const Expr& e);
/// Number of nodes when printed as a tree, saturated at 2^62.
std::uint64_t tree_size(const Expr& e);

/// Drops the derivative/derivation memo caches of the calling thread.
void clear_expression_caches();

/// Deterministic structural comparison (does not depend on node addresses).
int compare_structural(const Expr& a, const Expr& b);

}  // namespace jetvar

template <>
struct std::hash<jetvar::Expr> {
    std::size_t operator()(const jetvar::Expr& e) const noexcept { return e.hash(); }
};
