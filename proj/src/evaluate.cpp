#include "jetvar/evaluate.hpp"

#include <sstream>

#include "hashing.hpp"
#include "jetvar/errors.hpp"
#include "node.hpp"
#include "symbol_table.hpp"

namespace jetvar {

namespace {

struct EvalFailure {};

/// Memoized bottom-up evaluation over the DAG. Field supplies constant(q),
/// symbol(s), zero(), one(), add, scale(v, q), mul, inverse, sqrt.
template <class Field>
class Evaluator {
public:
    using Value = typename Field::Value;

    explicit Evaluator(Field field) : field_(std::move(field)) {}

    Field& field() { return field_; }

    Value eval(const Expr& e) {
        switch (e.kind()) {
            case ExprKind::Constant:
                return field_.constant(e.constant());
            case ExprKind::Symbol:
                return field_.symbol(e.symbol());
            default:
                break;
        }
        if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
        Value v;
        if (e.kind() == ExprKind::Add) {
            v = field_.constant(e.constant());
            for (const Term& t : e.terms()) v = field_.add(v, field_.scale(eval(t.expr), t.coeff));
        } else {
            v = field_.one();
            for (const Factor& f : e.factors()) v = field_.mul(v, power(eval(f.base), f.exponent));
        }
        keep_.push_back(e);
        memo_.emplace(e.node(), v);
        return v;
    }

private:
    Value power(const Value& base, HalfInt e) {
        int n = e.floor();
        Value b = base;
        if (n < 0) {
            b = field_.inverse(base);
            n = -n;
        }
        Value r = field_.one();
        while (n > 0) {
            if (n & 1) r = field_.mul(r, b);
            n >>= 1;
            if (n) b = field_.mul(b, b);
        }
        if (!e.is_integer()) r = field_.mul(r, field_.sqrt(base));
        return r;
    }

    Field field_;
    std::unordered_map<const Node*, Value> memo_;
    std::vector<Expr> keep_;
};

[[noreturn]] void unbound(SymbolId s) { throw UnboundSymbol("no value for symbol " + symbol_name(s)); }

std::optional<Rational> rational_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    return Rational(n, d);
}

BigFloat to_big(const Rational& q) {
    return BigFloat(q.get_num().get_str()) / BigFloat(q.get_den().get_str());
}

/// Q(sqrt(w0)) with w0 fixed by the first irrational radicand met.
struct QuadraticField {
    struct Value {
        Rational a, b;
    };
    const Point* point;
    std::optional<Rational> w0;

    Value constant(const Rational& q) const { return {q, 0}; }
    Value symbol(SymbolId s) const {
        auto it = point->find(s);
        if (it == point->end()) unbound(s);
        return {it->second, 0};
    }
    Value one() const { return {1, 0}; }
    Value add(const Value& x, const Value& y) const { return {x.a + y.a, x.b + y.b}; }
    Value scale(const Value& x, const Rational& q) const { return {x.a * q, x.b * q}; }
    Value mul(const Value& x, const Value& y) const {
        if (x.b == 0 && y.b == 0) return {x.a * y.a, 0};
        return {x.a * y.a + x.b * y.b * *w0, x.a * y.b + x.b * y.a};
    }
    Value inverse(const Value& x) const {
        if (x.b == 0) {
            if (x.a == 0) throw DivisionByZero("division by zero during evaluation");
            return {1 / x.a, 0};
        }
        Rational n = x.a * x.a - x.b * x.b * *w0;
        if (n == 0) throw DivisionByZero("division by zero during evaluation");
        return {x.a / n, -x.b / n};
    }
    Value sqrt(const Value& x) {
        if (x.b != 0) throw EvalFailure{};
        if (x.a < 0) throw NegativeRadicand("negative radicand " + x.a.get_str() + " during evaluation");
        if (auto r = rational_sqrt(x.a)) return {*r, 0};
        if (!w0) {
            w0 = x.a;
            return {0, 1};
        }
        if (auto r = rational_sqrt(x.a / *w0)) return {0, *r};
        throw EvalFailure{};
    }
};

template <class T>
T from_rational(const Rational& q) {
    if constexpr (std::is_same_v<T, BigFloat>) {
        return to_big(q);
    } else {
        return static_cast<T>(q.get_d());
    }
}

template <class T>
struct RealField {
    using Value = T;
    const FloatPoint<T>* point;

    Value constant(const Rational& q) const { return from_rational<T>(q); }
    Value symbol(SymbolId s) const {
        auto it = point->find(s);
        if (it == point->end()) unbound(s);
        return it->second;
    }
    Value one() const { return T(1); }
    Value add(const Value& x, const Value& y) const { return x + y; }
    Value scale(const Value& x, const Rational& q) const { return q == 1 ? x : x * from_rational<T>(q); }
    Value mul(const Value& x, const Value& y) const { return x * y; }
    Value inverse(const Value& x) const {
        if (x == 0) throw DivisionByZero("division by zero during evaluation");
        return T(1) / x;
    }
    Value sqrt(const Value& x) const {
        using std::sqrt;
        using boost::multiprecision::sqrt;
        if (x < 0) throw NegativeRadicand("negative radicand during evaluation");
        return sqrt(x);
    }
};

struct BigPointField {
    using Value = BigFloat;
    const Point* point;
    std::unordered_map<SymbolId, BigFloat> cache;

    Value constant(const Rational& q) const { return to_big(q); }
    Value symbol(SymbolId s) {
        if (auto c = cache.find(s); c != cache.end()) return c->second;
        auto it = point->find(s);
        if (it == point->end()) unbound(s);
        return cache.emplace(s, to_big(it->second)).first->second;
    }
    Value one() const { return 1; }
    Value add(const Value& x, const Value& y) const { return x + y; }
    Value scale(const Value& x, const Rational& q) const { return q == 1 ? x : x * to_big(q); }
    Value mul(const Value& x, const Value& y) const { return x * y; }
    Value inverse(const Value& x) const {
        if (x == 0) throw DivisionByZero("division by zero during evaluation");
        return 1 / x;
    }
    Value sqrt(const Value& x) const {
        if (x < 0) throw NegativeRadicand("negative radicand during evaluation");
        return boost::multiprecision::sqrt(x);
    }
};

struct ModField {
    using Value = std::uint64_t;
    std::function<std::uint64_t(SymbolId)> values;
    std::unordered_map<SymbolId, std::uint64_t> cache;

    Value constant(const Rational& q) const {
        auto v = modp::from_rational(q);
        if (!v) throw EvalFailure{};
        return *v;
    }
    Value symbol(SymbolId s) {
        if (auto it = cache.find(s); it != cache.end()) return it->second;
        return cache.emplace(s, values(s) % modp::kPrime).first->second;
    }
    Value one() const { return 1; }
    Value add(Value x, Value y) const { return modp::add(x, y); }
    Value scale(Value x, const Rational& q) const { return q == 1 ? x : modp::mul(x, constant(q)); }
    Value mul(Value x, Value y) const { return modp::mul(x, y); }
    Value inverse(Value x) const {
        if (x == 0) throw EvalFailure{};
        return modp::inverse(x);
    }
    Value sqrt(Value x) const {
        if (x == 0) return 0;
        std::uint64_t r = modp::power(x, (modp::kPrime + 1) / 4);
        if (modp::mul(r, r) != x) throw EvalFailure{};
        return std::min(r, modp::kPrime - r);
    }
};

}  // namespace

// ---------------------------------------------------------------------------

namespace modp {

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= kPrime ? s - kPrime : s;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
    std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
    return add(lo, hi);
}

std::uint64_t power(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::uint64_t inverse(std::uint64_t a) { return power(a, kPrime - 2); }

std::optional<std::uint64_t> from_rational(const Rational& q) {
    if (mpz_fits_slong_p(q.get_num_mpz_t()) && mpz_fits_ulong_p(q.get_den_mpz_t())) {
        long n = mpz_get_si(q.get_num_mpz_t()) % static_cast<long>(kPrime);
        std::uint64_t nv = static_cast<std::uint64_t>(n < 0 ? n + static_cast<long>(kPrime) : n);
        std::uint64_t dv = mpz_get_ui(q.get_den_mpz_t()) % kPrime;
        if (dv == 0) return std::nullopt;
        return dv == 1 ? nv : mul(nv, inverse(dv));
    }
    static const mpz_class p(std::to_string(kPrime));
    mpz_class n = q.get_num() % p;
    if (n < 0) n += p;
    mpz_class d = q.get_den() % p;
    if (d == 0) return std::nullopt;
    std::uint64_t nv = std::stoull(n.get_str());
    std::uint64_t dv = std::stoull(d.get_str());
    return mul(nv, inverse(dv));
}

}  // namespace modp

ModPrimeProgram::ModPrimeProgram(std::vector<Expr> roots) : keep_(std::move(roots)) {
    for (const Expr& r : keep_) roots_.push_back(compile(r));
    slot_of_.clear();
    derived_of_.clear();
}

std::uint32_t ModPrimeProgram::derived(Op op, std::uint32_t in) {
    std::uint64_t key = (static_cast<std::uint64_t>(in) << 1) | (op == Op::Sqrt ? 1 : 0);
    if (auto it = derived_of_.find(key); it != derived_of_.end()) return it->second;
    std::uint32_t out = slots_++;
    code_.push_back({op, out, in, in, 0});
    derived_of_.emplace(key, out);
    return out;
}

std::uint32_t ModPrimeProgram::compile(const Expr& e) {
    if (auto it = slot_of_.find(e.node()); it != slot_of_.end()) return it->second;
    std::uint32_t out;
    auto constant_value = [&](const Rational& q) {
        auto v = modp::from_rational(q);
        if (!v) valid_ = false;
        return v.value_or(0);
    };
    switch (e.kind()) {
        case ExprKind::Symbol:
            out = slots_++;
            symbols_.push_back(e.symbol());
            symbol_slots_.push_back(out);
            break;
        case ExprKind::Constant:
            out = slots_++;
            code_.push_back({Op::Add, out, 0, 0, constant_value(e.constant())});
            break;
        case ExprKind::Add: {
            std::vector<Operand> ops;
            for (const Term& t : e.terms()) ops.push_back({compile(t.expr), constant_value(t.coeff)});
            out = slots_++;
            auto begin = static_cast<std::uint32_t>(operands_.size());
            operands_.insert(operands_.end(), ops.begin(), ops.end());
            code_.push_back({Op::Add, out, begin, static_cast<std::uint32_t>(operands_.size()),
                             constant_value(e.constant())});
            break;
        }
        default: {
            std::vector<Operand> ops;
            for (const Factor& f : e.factors()) {
                std::uint32_t base = compile(f.base);
                int n = f.exponent.floor();
                if (n != 0) ops.push_back({n < 0 ? derived(Op::Inverse, base) : base, static_cast<std::uint64_t>(n < 0 ? -n : n)});
                if (!f.exponent.is_integer()) ops.push_back({derived(Op::Sqrt, base), 1});
            }
            out = slots_++;
            auto begin = static_cast<std::uint32_t>(operands_.size());
            operands_.insert(operands_.end(), ops.begin(), ops.end());
            code_.push_back({Op::Mul, out, begin, static_cast<std::uint32_t>(operands_.size()), 1});
            break;
        }
    }
    slot_of_.emplace(e.node(), out);
    return out;
}

std::optional<std::vector<std::uint64_t>> ModPrimeProgram::run(
    const std::function<std::uint64_t(SymbolId)>& values) const {
    if (!valid_) return std::nullopt;
    std::vector<std::uint64_t> slot(slots_);
    for (std::size_t k = 0; k < symbols_.size(); ++k) slot[symbol_slots_[k]] = values(symbols_[k]) % modp::kPrime;
    for (const Instr& in : code_) {
        std::uint64_t v = 0;
        switch (in.op) {
            case Op::Add:
                v = in.constant;
                for (std::uint32_t k = in.begin; k < in.end; ++k)
                    v = modp::add(v, modp::mul(slot[operands_[k].slot], operands_[k].weight));
                break;
            case Op::Mul:
                v = 1;
                for (std::uint32_t k = in.begin; k < in.end; ++k) {
                    std::uint64_t b = slot[operands_[k].slot];
                    for (std::uint64_t n = operands_[k].weight; n > 0; --n) v = modp::mul(v, b);
                }
                break;
            case Op::Inverse:
                if (slot[in.begin] == 0) return std::nullopt;
                v = modp::inverse(slot[in.begin]);
                break;
            case Op::Sqrt: {
                std::uint64_t x = slot[in.begin];
                if (x == 0) {
                    v = 0;
                    break;
                }
                std::uint64_t r = modp::power(x, (modp::kPrime + 1) / 4);
                if (modp::mul(r, r) != x) return std::nullopt;
                v = std::min(r, modp::kPrime - r);
                break;
            }
        }
        slot[in.out] = v;
    }
    std::vector<std::uint64_t> out;
    out.reserve(roots_.size());
    for (std::uint32_t r : roots_) out.push_back(slot[r]);
    return out;
}

std::uint64_t random_symbol_value(SymbolId s, std::uint64_t seed) {
    return detail::mix(detail::combine(detail::symbol_hash(s), seed)) % modp::kPrime;
}

// ---------------------------------------------------------------------------

std::string NumericValue::to_string(int digits) const {
    if (exact) return rational.get_str();
    std::ostringstream out;
    out.precision(digits);
    out << approx;
    return out.str();
}

struct ExactEvaluator::Impl {
    Point point;
    Evaluator<QuadraticField> quad;
    std::optional<Evaluator<BigPointField>> fallback;

    explicit Impl(Point p) : point(std::move(p)), quad(QuadraticField{&point, std::nullopt}) {}
};

ExactEvaluator::ExactEvaluator(Point point) : impl_(std::make_unique<Impl>(std::move(point))) {}
ExactEvaluator::~ExactEvaluator() = default;

NumericValue ExactEvaluator::operator()(const Expr& e) {
    NumericValue out;
    if (!impl_->fallback) {
        try {
            auto v = impl_->quad.eval(e);
            if (v.b == 0) {
                out.exact = true;
                out.rational = v.a;
                out.approx = to_big(v.a);
            } else {
                out.radical_form = true;
                out.a = v.a;
                out.b = v.b;
                out.radicand = *impl_->quad.field().w0;
                out.approx = to_big(v.a) + to_big(v.b) * boost::multiprecision::sqrt(to_big(out.radicand));
            }
            return out;
        } catch (const EvalFailure&) {
            impl_->fallback.emplace(BigPointField{&impl_->point, {}});
        }
    }
    out.approx = impl_->fallback->eval(e);
    return out;
}

NumericValue eval_numeric(const Expr& e, const Point& point) {
    ExactEvaluator ev(point);
    return ev(e);
}

template <class T>
struct FloatEvaluator<T>::Impl {
    FloatPoint<T> point;
    Evaluator<RealField<T>> ev;
    explicit Impl(FloatPoint<T> p) : point(std::move(p)), ev(RealField<T>{&point}) {}
};

template <class T>
FloatEvaluator<T>::FloatEvaluator(FloatPoint<T> point) : impl_(std::make_unique<Impl>(std::move(point))) {}

template <class T>
FloatEvaluator<T>::~FloatEvaluator() = default;

template <class T>
T FloatEvaluator<T>::operator()(const Expr& e) {
    return impl_->ev.eval(e);
}

template class FloatEvaluator<long double>;
template class FloatEvaluator<BigFloat>;

long double eval_float(const Expr& e, const FloatPoint<long double>& point) {
    FloatEvaluator<long double> ev(point);
    return ev(e);
}

struct ModPrimeEvaluator::Impl {
    Evaluator<ModField> ev;
    explicit Impl(std::function<std::uint64_t(SymbolId)> values) : ev(ModField{std::move(values), {}}) {}
};

ModPrimeEvaluator::ModPrimeEvaluator(std::function<std::uint64_t(SymbolId)> values)
    : impl_(std::make_unique<Impl>(std::move(values))) {}
ModPrimeEvaluator::~ModPrimeEvaluator() = default;

std::optional<std::uint64_t> ModPrimeEvaluator::operator()(const Expr& e) {
    try {
        return impl_->ev.eval(e);
    } catch (const EvalFailure&) {
        return std::nullopt;
    }
}

}  // namespace jetvar
