#include "jetvar/expr.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "hashing.hpp"
#include "jetvar/errors.hpp"
#include "node.hpp"
#include "symbol_table.hpp"

namespace jetvar {

// ---------------------------------------------------------------------------
// HalfInt

HalfInt HalfInt::from_rational(const Rational& q) {
    Rational twice = q * 2;
    if (twice.get_den() != 1 || !twice.get_num().fits_sint_p())
        throw UnsupportedExponent("exponent must be an integer or half-integer, got " + q.get_str());
    return from_twice(static_cast<int>(twice.get_num().get_si()));
}

// ---------------------------------------------------------------------------
// Interning

namespace {

constexpr std::uint64_t kTagConst = 0x1001;
constexpr std::uint64_t kTagSym = 0x2002;
constexpr std::uint64_t kTagAdd = 0x3003;
constexpr std::uint64_t kTagMul = 0x4004;

bool shallow_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.hash != b.hash) return false;
    switch (a.kind) {
        case ExprKind::Constant:
            return a.number == b.number;
        case ExprKind::Symbol:
            return a.symbol == b.symbol;
        case ExprKind::Add:
            if (a.number != b.number || a.terms.size() != b.terms.size()) return false;
            for (std::size_t i = 0; i < a.terms.size(); ++i) {
                if (a.terms[i].expr != b.terms[i].expr || a.terms[i].coeff != b.terms[i].coeff) return false;
            }
            return true;
        case ExprKind::Mul:
            if (a.factors.size() != b.factors.size()) return false;
            for (std::size_t i = 0; i < a.factors.size(); ++i) {
                if (a.factors[i].base != b.factors[i].base ||
                    a.factors[i].exponent != b.factors[i].exponent)
                    return false;
            }
            return true;
    }
    return false;
}

class InternTable {
public:
    std::shared_ptr<const Node> intern(std::unique_ptr<Node> candidate) {
        Shard& shard = shards_[candidate->hash & (kShards - 1)];
        std::lock_guard lock(shard.mutex);
        auto [lo, hi] = shard.map.equal_range(candidate->hash);
        for (auto it = lo; it != hi;) {
            if (auto existing = it->second.lock()) {
                if (shallow_equal(*existing, *candidate)) return existing;
                ++it;
            } else {
                it = shard.map.erase(it);
            }
        }
        std::shared_ptr<const Node> fresh(candidate.release());
        shard.map.emplace(fresh->hash, fresh);
        if (shard.map.size() > shard.threshold) {
            for (auto it = shard.map.begin(); it != shard.map.end();) {
                if (it->second.expired())
                    it = shard.map.erase(it);
                else
                    ++it;
            }
            shard.threshold = std::max<std::size_t>(1024, 2 * shard.map.size());
        }
        return fresh;
    }

private:
    static constexpr std::size_t kShards = 64;
    struct Shard {
        std::mutex mutex;
        std::unordered_multimap<std::uint64_t, std::weak_ptr<const Node>> map;
        std::size_t threshold = 1024;
    };
    std::array<Shard, kShards> shards_;
};

InternTable& intern_table() {
    static InternTable* table = new InternTable();  // outlives static Expr destructors
    return *table;
}

const Expr& zero_expr() {
    static const Expr z = ExprFactory::constant(Rational(0));
    return z;
}

const Expr& one_expr() {
    static const Expr o = ExprFactory::constant(Rational(1));
    return o;
}

}  // namespace

Expr ExprFactory::constant(const Rational& value) {
    auto n = std::make_unique<Node>();
    n->kind = ExprKind::Constant;
    n->number = value;
    n->hash = detail::combine(kTagConst, detail::hash_rational(value));
    return Expr(intern_table().intern(std::move(n)));
}

Expr ExprFactory::symbol(SymbolId id) {
    auto n = std::make_unique<Node>();
    n->kind = ExprKind::Symbol;
    n->symbol = id;
    n->hash = detail::combine(kTagSym, detail::symbol_hash(id));
    n->bloom = detail::symbol_bloom(id);
    if (id->kind == SymbolKind::Fiber) n->max_order = static_cast<std::int16_t>(detail::symbol_order(id));
    n->has_unknown = detail::symbol_is_unknown(id);
    return Expr(intern_table().intern(std::move(n)));
}

Expr ExprFactory::add_node(Rational constant, std::vector<Term> terms) {
    auto n = std::make_unique<Node>();
    n->kind = ExprKind::Add;
    std::uint64_t h = detail::combine(kTagAdd, detail::hash_rational(constant));
    for (const Term& t : terms) {
        h = detail::combine(h, t.expr.hash());
        h = detail::combine(h, detail::hash_rational(t.coeff));
        const Node* c = t.expr.node();
        n->bloom |= c->bloom;
        n->max_order = std::max(n->max_order, c->max_order);
        n->has_unknown |= c->has_unknown;
        n->has_radical |= c->has_radical;
    }
    n->hash = h;
    n->number = std::move(constant);
    n->terms = std::move(terms);
    return Expr(intern_table().intern(std::move(n)));
}

Expr ExprFactory::mul_node(std::vector<Factor> factors) {
    auto n = std::make_unique<Node>();
    n->kind = ExprKind::Mul;
    n->number = 1;
    std::uint64_t h = kTagMul;
    for (const Factor& f : factors) {
        h = detail::combine(h, f.base.hash());
        h = detail::combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(f.exponent.twice())));
        const Node* c = f.base.node();
        n->bloom |= c->bloom;
        n->max_order = std::max(n->max_order, c->max_order);
        n->has_unknown |= c->has_unknown;
        n->has_radical |= c->has_radical || !f.exponent.is_integer();
    }
    n->hash = h;
    n->factors = std::move(factors);
    return Expr(intern_table().intern(std::move(n)));
}

// ---------------------------------------------------------------------------
// Expr accessors

Expr::Expr() : Expr(zero_expr()) {}
Expr::Expr(int value) : Expr(value == 0 ? zero_expr() : value == 1 ? one_expr() : ExprFactory::constant(Rational(value))) {}
Expr::Expr(long value) : Expr(ExprFactory::constant(Rational(value))) {}
Expr::Expr(const Rational& value) : Expr(ExprFactory::constant(value)) {}
Expr::Expr(SymbolId symbol) : Expr(ExprFactory::symbol(symbol)) {}
Expr::Expr(const Symbol& symbol) : Expr(ExprFactory::symbol(SymbolId::intern(symbol))) {}

ExprKind Expr::kind() const noexcept { return node_->kind; }
bool Expr::is_zero_constant() const noexcept { return is_constant() && node_->number == 0; }
bool Expr::is_one_constant() const noexcept { return is_constant() && node_->number == 1; }

const Rational& Expr::constant() const noexcept {
    static const Rational zero(0);
    if (node_->kind == ExprKind::Constant || node_->kind == ExprKind::Add) return node_->number;
    return zero;
}

SymbolId Expr::symbol() const {
    if (!is_symbol()) throw std::logic_error("Expr::symbol on non-symbol");
    return node_->symbol;
}

std::span<const Term> Expr::terms() const noexcept { return node_->terms; }
std::span<const Factor> Expr::factors() const noexcept { return node_->factors; }
std::uint64_t Expr::hash() const noexcept { return node_->hash; }
int Expr::max_order() const noexcept { return node_->max_order; }
bool Expr::has_unknown() const noexcept { return node_->has_unknown; }
bool Expr::has_radical() const noexcept { return node_->has_radical; }

bool Expr::may_contain(SymbolId s) const noexcept {
    if ((node_->bloom & detail::symbol_bloom(s)) == 0) return false;
    if (s->kind == SymbolKind::Fiber && detail::symbol_order(s) > node_->max_order) return false;
    if (s->kind == SymbolKind::Unknown && !node_->has_unknown) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Structural comparison

int compare_structural(const Expr& a, const Expr& b) {
    if (a == b) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    auto cmpq = [](const Rational& x, const Rational& y) { return cmp(x, y) < 0 ? -1 : (cmp(x, y) > 0 ? 1 : 0); };
    switch (a.kind()) {
        case ExprKind::Constant:
            return cmpq(a.constant(), b.constant());
        case ExprKind::Symbol:
            if (symbol_less(a.symbol(), b.symbol())) return -1;
            if (symbol_less(b.symbol(), a.symbol())) return 1;
            return 0;
        case ExprKind::Add: {
            if (int c = cmpq(a.constant(), b.constant())) return c;
            auto ta = a.terms();
            auto tb = b.terms();
            if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
            for (std::size_t i = 0; i < ta.size(); ++i) {
                if (int c = compare_structural(ta[i].expr, tb[i].expr)) return c;
                if (int c = cmpq(ta[i].coeff, tb[i].coeff)) return c;
            }
            return 0;
        }
        case ExprKind::Mul: {
            auto fa = a.factors();
            auto fb = b.factors();
            if (fa.size() != fb.size()) return fa.size() < fb.size() ? -1 : 1;
            for (std::size_t i = 0; i < fa.size(); ++i) {
                if (int c = compare_structural(fa[i].base, fb[i].base)) return c;
                if (fa[i].exponent != fb[i].exponent) return fa[i].exponent < fb[i].exponent ? -1 : 1;
            }
            return 0;
        }
    }
    return 0;
}

namespace {

bool canonical_less(const Expr& a, const Expr& b) {
    if (a.hash() != b.hash()) return a.hash() < b.hash();
    return compare_structural(a, b) < 0;
}

Rational rational_pow(const Rational& base, int exponent) {
    if (exponent == 0) return 1;
    if (base == 0) {
        if (exponent < 0) throw DivisionByZero("division by zero");
        return 0;
    }
    mpz_class num, den;
    unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
    Rational r = exponent > 0 ? Rational(num, den) : Rational(den, num);
    r.canonicalize();
    return r;
}

/// sqrt of a nonnegative rational when it is a perfect square.
std::optional<Rational> exact_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    return Rational(n, d);
}

bool is_scaled_unit(const Expr& e) {
    return e.kind() == ExprKind::Add && e.constant() == 0 && e.terms().size() == 1;
}

void add_into(std::vector<Term>& flat, Rational& constant, const Expr& e, const Rational& coeff) {
    if (coeff == 0) return;
    switch (e.kind()) {
        case ExprKind::Constant:
            constant += coeff * e.constant();
            return;
        case ExprKind::Add:
            constant += coeff * e.constant();
            for (const Term& t : e.terms()) flat.push_back({t.expr, coeff * t.coeff});
            return;
        default:
            flat.push_back({e, coeff});
    }
}

Expr build_add(Rational constant, std::vector<Term> flat) {
    std::sort(flat.begin(), flat.end(), [](const Term& a, const Term& b) { return canonical_less(a.expr, b.expr); });
    std::vector<Term> merged;
    merged.reserve(flat.size());
    for (Term& t : flat) {
        if (!merged.empty() && merged.back().expr == t.expr) {
            merged.back().coeff += t.coeff;
        } else {
            if (!merged.empty() && merged.back().coeff == 0) merged.pop_back();
            merged.push_back(std::move(t));
        }
    }
    if (!merged.empty() && merged.back().coeff == 0) merged.pop_back();
    if (merged.empty()) return Expr(constant);
    if (constant == 0 && merged.size() == 1 && merged[0].coeff == 1) return merged[0].expr;
    return ExprFactory::add_node(std::move(constant), std::move(merged));
}

struct MulBuilder {
    Rational coeff = 1;
    std::vector<Factor> flat;
    bool zero = false;

    void push(const Expr& base, HalfInt e) {
        if (e.twice() == 0 || zero) return;
        switch (base.kind()) {
            case ExprKind::Constant: {
                const Rational& v = base.constant();
                if (v == 0) {
                    if (e.twice() < 0) throw DivisionByZero("division by zero");
                    zero = true;
                    return;
                }
                coeff *= rational_pow(v, e.floor());
                if (!e.is_integer()) {
                    if (auto r = exact_sqrt(v)) {
                        coeff *= *r;
                    } else {
                        flat.push_back({base, HalfInt::from_twice(1)});
                    }
                }
                return;
            }
            case ExprKind::Add:
                if (e.is_integer() && is_scaled_unit(base)) {
                    const Term& t = base.terms()[0];
                    coeff *= rational_pow(t.coeff, e.twice() / 2);
                    push(t.expr, e);
                    return;
                }
                flat.push_back({base, e});
                return;
            case ExprKind::Mul:
                if (e.is_integer()) {
                    int k = e.twice() / 2;
                    for (const Factor& f : base.factors()) push(f.base, f.exponent.times(k));
                    return;
                }
                flat.push_back({base, e});
                return;
            case ExprKind::Symbol:
                flat.push_back({base, e});
                return;
        }
    }

    static bool needs_refold(const Factor& f) {
        switch (f.base.kind()) {
            case ExprKind::Constant:
                return f.exponent.twice() != 1;
            case ExprKind::Mul:
                return f.exponent.is_integer();
            case ExprKind::Add:
                return f.exponent.is_integer() && is_scaled_unit(f.base);
            default:
                return false;
        }
    }

    Expr finish() {
        for (;;) {
            if (zero) return Expr(0);
            std::sort(flat.begin(), flat.end(),
                      [](const Factor& a, const Factor& b) { return canonical_less(a.base, b.base); });
            std::vector<Factor> merged;
            merged.reserve(flat.size());
            for (Factor& f : flat) {
                if (!merged.empty() && merged.back().base == f.base) {
                    merged.back().exponent = merged.back().exponent + f.exponent;
                } else {
                    if (!merged.empty() && merged.back().exponent.twice() == 0) merged.pop_back();
                    merged.push_back(std::move(f));
                }
            }
            if (!merged.empty() && merged.back().exponent.twice() == 0) merged.pop_back();
            bool refold = std::any_of(merged.begin(), merged.end(), needs_refold);
            if (!refold) {
                flat = std::move(merged);
                break;
            }
            flat.clear();
            for (const Factor& f : merged) {
                if (needs_refold(f))
                    push(f.base, f.exponent);
                else
                    flat.push_back(f);
            }
        }
        if (zero || coeff == 0) return Expr(0);
        if (flat.empty()) return Expr(coeff);
        Expr core;
        if (flat.size() == 1 && flat[0].exponent.twice() == 2) {
            core = flat[0].base;
        } else {
            core = ExprFactory::mul_node(std::move(flat));
        }
        if (coeff == 1) return core;
        std::vector<Term> t;
        Rational c(0);
        add_into(t, c, core, coeff);
        return build_add(std::move(c), std::move(t));
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Builders

Expr sum(const Rational& constant, std::vector<Term> terms) {
    std::vector<Term> flat;
    flat.reserve(terms.size());
    Rational c = constant;
    for (const Term& t : terms) add_into(flat, c, t.expr, t.coeff);
    return build_add(std::move(c), std::move(flat));
}

Expr sum(const std::vector<Expr>& items) {
    std::vector<Term> flat;
    flat.reserve(items.size());
    Rational c(0);
    Rational one(1);
    for (const Expr& e : items) add_into(flat, c, e, one);
    return build_add(std::move(c), std::move(flat));
}

Expr product(const Rational& coeff, std::vector<Factor> factors) {
    MulBuilder b;
    b.coeff = coeff;
    if (coeff == 0) return Expr(0);
    for (const Factor& f : factors) b.push(f.base, f.exponent);
    return b.finish();
}

Expr product(const std::vector<Expr>& items) {
    MulBuilder b;
    for (const Expr& e : items) b.push(e, HalfInt(1));
    return b.finish();
}

std::pair<Rational, Expr> split_coefficient(const Expr& e) {
    if (e.is_constant()) return {e.constant(), Expr(1)};
    if (is_scaled_unit(e)) return {e.terms()[0].coeff, e.terms()[0].expr};
    return {Rational(1), e};
}

Expr operator+(const Expr& a, const Expr& b) { return sum(Rational(0), {{a, Rational(1)}, {b, Rational(1)}}); }
Expr operator-(const Expr& a, const Expr& b) { return sum(Rational(0), {{a, Rational(1)}, {b, Rational(-1)}}); }
Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant()) return sum(Rational(0), {{b, a.constant()}});
    if (b.is_constant()) return sum(Rational(0), {{a, b.constant()}});
    return product(Rational(1), {{a, HalfInt(1)}, {b, HalfInt(1)}});
}
Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant()) {
        if (b.constant() == 0) throw DivisionByZero("division by zero");
        return sum(Rational(0), {{a, Rational(1) / b.constant()}});
    }
    return product(Rational(1), {{a, HalfInt(1)}, {b, HalfInt(-1)}});
}

Expr Expr::operator-() const { return sum(Rational(0), {{*this, Rational(-1)}}); }
Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }
Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }
Expr& Expr::operator/=(const Expr& o) { return *this = *this / o; }

Expr pow(const Expr& base, HalfInt exponent) { return product(Rational(1), {{base, exponent}}); }
Expr pow(const Expr& base, const Rational& exponent) { return pow(base, HalfInt::from_rational(exponent)); }
Expr sqrt(const Expr& e) { return pow(e, HalfInt::from_twice(1)); }

// ---------------------------------------------------------------------------
// Differentiation

namespace {

struct MemoKey {
    const Node* node;
    std::uint32_t tag;
    bool operator==(const MemoKey&) const = default;
};

struct MemoKeyHash {
    std::size_t operator()(const MemoKey& k) const noexcept {
        return detail::combine(reinterpret_cast<std::uintptr_t>(k.node), k.tag);
    }
};

struct MemoValue {
    Expr keep;  // keeps the keyed node alive so its address is not reused
    Expr result;
};

using Memo = std::unordered_map<MemoKey, MemoValue, MemoKeyHash>;

Memo& diff_memo() {
    thread_local Memo memo;
    return memo;
}

Memo& derivation_memo() {
    thread_local Memo memo;
    return memo;
}

std::uint32_t derivation_tag(const std::string& key) {
    thread_local std::unordered_map<std::string, std::uint32_t> tags;
    auto [it, inserted] = tags.emplace(key, static_cast<std::uint32_t>(tags.size()));
    return it->second;
}

/// d(prod b_i^e_i) given the derivative of each base.
template <class BaseDerivative>
Expr leibniz(const Expr& e, BaseDerivative&& derive) {
    auto fs = e.factors();
    std::vector<Term> pieces;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        Expr db = derive(fs[i].base);
        if (db.is_zero_constant()) continue;
        std::vector<Factor> factors(fs.begin(), fs.end());
        HalfInt ei = factors[i].exponent;
        factors[i].exponent = ei - HalfInt(1);
        factors.push_back({db, HalfInt(1)});
        pieces.push_back({product(ei.to_rational(), std::move(factors)), Rational(1)});
    }
    return sum(Rational(0), std::move(pieces));
}

}  // namespace

Expr diff(const Expr& e, SymbolId s) {
    if (!e.may_contain(s)) return Expr(0);
    switch (e.kind()) {
        case ExprKind::Constant:
            return Expr(0);
        case ExprKind::Symbol:
            return Expr(e.symbol() == s ? 1 : 0);
        default:
            break;
    }
    Memo& memo = diff_memo();
    MemoKey key{e.node(), s.raw()};
    if (auto it = memo.find(key); it != memo.end()) return it->second.result;
    Expr result;
    if (e.kind() == ExprKind::Add) {
        std::vector<Term> pieces;
        pieces.reserve(e.terms().size());
        for (const Term& t : e.terms()) {
            Expr d = diff(t.expr, s);
            if (!d.is_zero_constant()) pieces.push_back({d, t.coeff});
        }
        result = sum(Rational(0), std::move(pieces));
    } else {
        result = leibniz(e, [&](const Expr& b) { return diff(b, s); });
    }
    memo.emplace(key, MemoValue{e, result});
    return result;
}

namespace {

Expr apply_tagged(const Derivation& v, std::uint32_t tag, const Expr& e) {
    if (e.is_constant()) return Expr(0);
    if (e.is_symbol()) {
        auto c = v.component(e.symbol());
        return c ? *c : Expr(0);
    }
    if (!v.may_act_on(e)) return Expr(0);
    Memo& memo = derivation_memo();
    MemoKey key{e.node(), tag};
    if (auto it = memo.find(key); it != memo.end()) return it->second.result;
    Expr result;
    if (e.kind() == ExprKind::Add) {
        std::vector<Term> pieces;
        pieces.reserve(e.terms().size());
        for (const Term& t : e.terms()) {
            Expr d = apply_tagged(v, tag, t.expr);
            if (!d.is_zero_constant()) pieces.push_back({d, t.coeff});
        }
        result = sum(Rational(0), std::move(pieces));
    } else {
        result = leibniz(e, [&](const Expr& b) { return apply_tagged(v, tag, b); });
    }
    memo.emplace(key, MemoValue{e, result});
    return result;
}

}  // namespace

Expr apply(const Derivation& v, const Expr& e) {
    if (e.is_constant() || e.is_symbol()) return apply_tagged(v, 0, e);
    return apply_tagged(v, derivation_tag(v.key()), e);
}

TableDerivation::TableDerivation(std::unordered_map<SymbolId, Expr> components)
    : components_(std::move(components)) {
    std::vector<std::pair<std::string, std::string>> parts;
    for (auto& [s, c] : components_) {
        bloom_ |= detail::symbol_bloom(s);
        parts.emplace_back(symbol_name(s), std::to_string(c.hash()));
    }
    std::sort(parts.begin(), parts.end());
    key_ = "table:";
    for (auto& [a, b] : parts) key_ += a + "=" + b + ";";
}

std::optional<Expr> TableDerivation::component(SymbolId s) const {
    if (auto it = components_.find(s); it != components_.end()) return it->second;
    return std::nullopt;
}

bool TableDerivation::may_act_on(const Expr& e) const { return (e.node()->bloom & bloom_) != 0; }

void clear_expression_caches() {
    diff_memo().clear();
    derivation_memo().clear();
}

// ---------------------------------------------------------------------------
// Traversals

namespace {

template <class Visit>
void for_each_node(const Expr& root, Visit&& visit) {
    std::unordered_set<const Node*> seen;
    std::vector<Expr> stack{root};
    while (!stack.empty()) {
        Expr e = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(e.node()).second) continue;
        visit(e);
        for (const Term& t : e.terms()) stack.push_back(t.expr);
        for (const Factor& f : e.factors()) stack.push_back(f.base);
    }
}

}  // namespace

std::vector<SymbolId> free_symbols(const Expr& e) {
    std::vector<SymbolId> out;
    for_each_node(e, [&](const Expr& n) {
        if (n.is_symbol()) out.push_back(n.symbol());
    });
    std::sort(out.begin(), out.end(), [](SymbolId a, SymbolId b) { return symbol_less(a, b); });
    return out;
}

bool contains_symbol(const Expr& e, SymbolId s) {
    if (!e.may_contain(s)) return false;
    if (e.is_symbol()) return e.symbol() == s;
    for (const Term& t : e.terms())
        if (contains_symbol(t.expr, s)) return true;
    for (const Factor& f : e.factors())
        if (contains_symbol(f.base, s)) return true;
    return false;
}

std::size_t dag_size(const Expr& e) {
    std::size_t n = 0;
    for_each_node(e, [&](const Expr&) { ++n; });
    return n;
}

namespace {

std::uint64_t tree_size_rec(const Expr& e, std::unordered_map<const Node*, std::uint64_t>& memo) {
    constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    std::uint64_t n = 1;
    for (const Term& t : e.terms()) n = std::min(kCap, n + tree_size_rec(t.expr, memo));
    for (const Factor& f : e.factors()) n = std::min(kCap, n + tree_size_rec(f.base, memo));
    memo.emplace(e.node(), n);
    return n;
}

}  // namespace

std::uint64_t tree_size(const Expr& e) {
    std::unordered_map<const Node*, std::uint64_t> memo;
    return tree_size_rec(e, memo);
}

}  // namespace jetvar
