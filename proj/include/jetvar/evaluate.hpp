#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "jetvar/expr.hpp"

namespace jetvar {

using BigFloat = boost::multiprecision::cpp_bin_float_50;
using Point = std::unordered_map<SymbolId, Rational>;

/// Result of eval_numeric. When `exact` the value is `rational`; when
/// `radical_form` it is a + b*sqrt(radicand) exactly. `approx` always holds a
/// 50-digit approximation.
struct NumericValue {
    bool exact = false;
    Rational rational;
    bool radical_form = false;
    Rational a, b, radicand;
    BigFloat approx;

    double to_double() const { return approx.convert_to<double>(); }
    std::string to_string(int digits = 30) const;
};

/// Throws UnboundSymbol, NegativeRadicand, DivisionByZero.
NumericValue eval_numeric(const Expr& e, const Point& point);

/// Evaluates many expressions at one point, sharing subexpression values.
class ExactEvaluator {
public:
    explicit ExactEvaluator(Point point);
    ~ExactEvaluator();
    ExactEvaluator(const ExactEvaluator&) = delete;
    ExactEvaluator& operator=(const ExactEvaluator&) = delete;

    NumericValue operator()(const Expr& e);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

template <class T>
using FloatPoint = std::unordered_map<SymbolId, T>;

/// Floating evaluation in long double or BigFloat.
template <class T>
class FloatEvaluator {
public:
    explicit FloatEvaluator(FloatPoint<T> point);
    ~FloatEvaluator();
    FloatEvaluator(const FloatEvaluator&) = delete;
    FloatEvaluator& operator=(const FloatEvaluator&) = delete;

    T operator()(const Expr& e);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

extern template class FloatEvaluator<long double>;
extern template class FloatEvaluator<BigFloat>;

long double eval_float(const Expr& e, const FloatPoint<long double>& point);

/// Arithmetic modulo the Mersenne prime 2^61 - 1.
namespace modp {
inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;
std::uint64_t add(std::uint64_t a, std::uint64_t b);
std::uint64_t sub(std::uint64_t a, std::uint64_t b);
std::uint64_t mul(std::uint64_t a, std::uint64_t b);
std::uint64_t power(std::uint64_t a, std::uint64_t e);
std::uint64_t inverse(std::uint64_t a);
/// nullopt when den is divisible by the prime.
std::optional<std::uint64_t> from_rational(const Rational& q);
}  // namespace modp

/// Evaluates modulo 2^61 - 1 with symbol values from `values`. Square roots
/// take the smaller of the two roots. Returns nullopt when a denominator
/// vanishes or a radicand is a non-residue at this point.
class ModPrimeEvaluator {
public:
    explicit ModPrimeEvaluator(std::function<std::uint64_t(SymbolId)> values);
    ~ModPrimeEvaluator();
    ModPrimeEvaluator(const ModPrimeEvaluator&) = delete;
    ModPrimeEvaluator& operator=(const ModPrimeEvaluator&) = delete;

    std::optional<std::uint64_t> operator()(const Expr& e);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Straight-line program evaluating a fixed list of expressions modulo
/// 2^61 - 1. Compilation walks the shared DAG once, so evaluating at many
/// points costs one pass over the nodes per point. Same conventions as
/// ModPrimeEvaluator.
class ModPrimeProgram {
public:
    explicit ModPrimeProgram(std::vector<Expr> roots);

    const std::vector<SymbolId>& symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return roots_.size(); }
    /// Values of all roots, or nullopt when the point is degenerate.
    std::optional<std::vector<std::uint64_t>> run(const std::function<std::uint64_t(SymbolId)>& values) const;

private:
    enum class Op : std::uint8_t { Add, Mul, Inverse, Sqrt };
    struct Instr {
        Op op;
        std::uint32_t out, begin, end;
        std::uint64_t constant;
    };
    struct Operand {
        std::uint32_t slot;
        std::uint64_t weight;  // coefficient in a sum, exponent in a product
    };
    std::uint32_t compile(const Expr& e);
    std::uint32_t derived(Op op, std::uint32_t in);

    std::vector<Expr> keep_;
    std::vector<SymbolId> symbols_;
    std::vector<std::uint32_t> symbol_slots_;
    std::vector<Instr> code_;
    std::vector<Operand> operands_;
    std::vector<std::uint32_t> roots_;
    std::uint32_t slots_ = 0;
    bool valid_ = true;
    std::unordered_map<const void*, std::uint32_t> slot_of_;
    std::unordered_map<std::uint64_t, std::uint32_t> derived_of_;
};

/// Deterministic pseudo-random value of a symbol for a given seed; depends
/// only on the symbol content, so equal symbols agree across expressions.
std::uint64_t random_symbol_value(SymbolId s, std::uint64_t seed);

}  // namespace jetvar
