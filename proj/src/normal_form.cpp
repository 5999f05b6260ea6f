#include "jetvar/normal_form.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_map>

#include "hashing.hpp"
#include "jetvar/errors.hpp"
#include "node.hpp"

namespace jetvar {

namespace {

// ---------------------------------------------------------------------------
// Sparse Laurent polynomials over session-local atoms

using AtomId = std::uint32_t;
using Monomial = std::vector<std::pair<AtomId, int>>;  // sorted by atom, nonzero exponents

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const noexcept {
        std::uint64_t h = 0x51ed;
        for (auto [a, e] : m) h = detail::combine(detail::combine(h, a), static_cast<std::uint64_t>(e));
        return h;
    }
};

using Poly = std::unordered_map<Monomial, Rational, MonomialHash>;

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            int e = a[i].second + b[j].second;
            if (e != 0) out.emplace_back(a[i].first, e);
            ++i;
            ++j;
        }
    }
    return out;
}

Monomial mono_pow(const Monomial& a, int k) {
    Monomial out;
    if (k == 0) return out;
    out.reserve(a.size());
    for (auto [v, e] : a) out.emplace_back(v, e * k);
    return out;
}

/// Lex order with lower atom ids more significant; true when a > b.
bool mono_greater(const Monomial& a, const Monomial& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        AtomId va = i < a.size() ? a[i].first : ~AtomId{0};
        AtomId vb = j < b.size() ? b[j].first : ~AtomId{0};
        if (va == vb) {
            if (a[i].second != b[j].second) return a[i].second > b[j].second;
            ++i;
            ++j;
        } else if (va < vb) {
            return a[i].second > 0;
        } else {
            return b[j].second < 0;
        }
    }
    return false;
}

bool mono_divides(const Monomial& d, const Monomial& m) {
    std::size_t j = 0;
    for (auto [v, e] : d) {
        while (j < m.size() && m[j].first < v) ++j;
        int have = (j < m.size() && m[j].first == v) ? m[j].second : 0;
        if (have < e) return false;
    }
    return true;
}

Monomial mono_div(const Monomial& m, const Monomial& d) { return mono_mul(m, mono_pow(d, -1)); }

void poly_add_term(Poly& p, const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = p.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

void poly_add_scaled(Poly& into, const Poly& p, const Rational& c) {
    if (c == 0) return;
    for (const auto& [m, v] : p) poly_add_term(into, m, v * c);
}

Poly poly_const(const Rational& c) {
    Poly p;
    if (c != 0) p.emplace(Monomial{}, c);
    return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    if (a.empty() || b.empty()) return out;
    out.reserve(a.size() * b.size() / 2 + 1);
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) poly_add_term(out, mono_mul(ma, mb), ca * cb);
    return out;
}

Poly poly_pow(const Poly& a, int k) {
    Poly result = poly_const(1);
    Poly base = a;
    while (k > 0) {
        if (k & 1) result = poly_mul(result, base);
        k >>= 1;
        if (k) base = poly_mul(base, base);
    }
    return result;
}

Poly poly_shift(const Poly& a, const Monomial& m) {
    Poly out;
    out.reserve(a.size());
    for (const auto& [ma, c] : a) out.emplace(mono_mul(ma, m), c);
    return out;
}

/// Exact quotient a / b, or nullopt when b does not divide a. b must have no
/// negative exponents; a may be Laurent.
std::optional<Poly> poly_exact_div(const Poly& a, const Poly& b) {
    if (a.empty()) return Poly{};
    // Clear negative exponents of a.
    std::map<AtomId, int> neg;
    for (const auto& [m, c] : a)
        for (auto [v, e] : m)
            if (e < 0) neg[v] = std::max(neg[v], -e);
    Monomial shift;
    for (auto [v, e] : neg) shift.emplace_back(v, e);

    auto greater = [](const Monomial& x, const Monomial& y) { return mono_greater(x, y); };
    std::map<Monomial, Rational, decltype(greater)> rem(greater);
    for (const auto& [m, c] : a) rem.emplace(shift.empty() ? m : mono_mul(m, shift), c);

    const Monomial* lead_b = nullptr;
    const Rational* lead_c = nullptr;
    for (const auto& [m, c] : b) {
        if (!lead_b || mono_greater(m, *lead_b)) {
            lead_b = &m;
            lead_c = &c;
        }
    }
    Poly quotient;
    while (!rem.empty()) {
        auto it = rem.begin();
        if (!mono_divides(*lead_b, it->first)) return std::nullopt;
        Monomial t = mono_div(it->first, *lead_b);
        Rational c = it->second / *lead_c;
        for (const auto& [mb, cb] : b) {
            Monomial mm = mono_mul(mb, t);
            auto [jt, inserted] = rem.try_emplace(std::move(mm), -c * cb);
            if (!inserted) {
                jt->second -= c * cb;
                if (jt->second == 0) rem.erase(jt);
            }
        }
        quotient.emplace(std::move(t), std::move(c));
    }
    if (!shift.empty()) quotient = poly_shift(quotient, mono_pow(shift, -1));
    return quotient;
}

// ---------------------------------------------------------------------------
// Session: atoms, denominator bases and radicands

struct Frac {
    Poly num;
    std::map<int, int> den;  // base index -> positive exponent
};

using RadKey = std::vector<int>;  // sorted radicand indices
using RForm = std::map<RadKey, Frac>;

class Session {
public:
    Expr normalize(const Expr& e) { return to_expr(canonical(to_rform(e))); }

    std::size_t term_count(const Expr& e) {
        std::size_t n = 0;
        for (auto& [k, f] : canonical(to_rform(e))) n += f.num.size();
        return n;
    }

private:
    struct Base {
        Poly poly;
        Expr expr;
    };

    std::vector<Expr> atoms_;
    std::unordered_map<const Node*, AtomId> atom_ids_;
    std::vector<Base> bases_;
    std::unordered_map<const Node*, int> base_ids_;
    std::vector<Base> radicands_;
    std::unordered_map<const Node*, int> radicand_ids_;
    std::unordered_map<const Node*, RForm> memo_;
    std::vector<Expr> keep_;

    AtomId atom(const Expr& e) {
        auto [it, inserted] = atom_ids_.emplace(e.node(), static_cast<AtomId>(atoms_.size()));
        if (inserted) atoms_.push_back(e);
        return it->second;
    }

    static RForm from_poly(Poly p) {
        RForm r;
        if (!p.empty()) r[{}] = Frac{std::move(p), {}};
        return r;
    }

    // --- polynomial <-> Expr

    /// Deterministic comparison of monomials (independent of atom numbering).
    int mono_compare_det(const Monomial& a, const Monomial& b) const {
        auto sorted = [&](const Monomial& m) {
            std::vector<std::pair<Expr, int>> v;
            for (auto [at, e] : m) v.emplace_back(atoms_[at], e);
            std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return compare_structural(x.first, y.first) < 0; });
            return v;
        };
        auto va = sorted(a);
        auto vb = sorted(b);
        for (std::size_t i = 0; i < std::min(va.size(), vb.size()); ++i) {
            if (int c = compare_structural(va[i].first, vb[i].first)) return c;
            if (va[i].second != vb[i].second) return va[i].second < vb[i].second ? -1 : 1;
        }
        if (va.size() != vb.size()) return va.size() < vb.size() ? -1 : 1;
        return 0;
    }

    Expr mono_expr(const Monomial& m, const Rational& c, std::vector<Factor> extra) const {
        for (auto [at, e] : m) extra.push_back({atoms_[at], HalfInt(e)});
        return product(c, std::move(extra));
    }

    Expr poly_expr(const Poly& p) const {
        std::vector<Term> terms;
        terms.reserve(p.size());
        for (const auto& [m, c] : p) terms.push_back({mono_expr(m, Rational(1), {}), c});
        return sum(Rational(0), std::move(terms));
    }

    /// p = c * m * q with q primitive, integral, positive leading coefficient and
    /// no monomial content.
    struct Primitive {
        Rational c;
        Monomial m;
        Poly q;
    };

    Primitive primitive(const Poly& p) const {
        Primitive out;
        mpz_class g = 0, l = 1;
        std::map<AtomId, int> minexp;
        bool first = true;
        for (const auto& [m, c] : p) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
            if (first) {
                for (auto [v, e] : m) minexp[v] = e;
                first = false;
            } else {
                for (auto& [v, e] : minexp) {
                    int have = 0;
                    for (auto [w, f] : m)
                        if (w == v) have = f;
                    e = std::min(e, have);
                }
                for (auto [v, e] : m)
                    if (!minexp.count(v)) minexp[v] = std::min(0, e);
            }
        }
        for (auto [v, e] : minexp)
            if (e != 0) out.m.emplace_back(v, e);
        Rational content(g, l);
        content.canonicalize();
        const Monomial* lead = nullptr;
        const Rational* lead_c = nullptr;
        for (const auto& [m, c] : p) {
            if (!lead || mono_compare_det(m, *lead) > 0) {
                lead = &m;
                lead_c = &c;
            }
        }
        if (*lead_c < 0) content = -content;
        out.c = content;
        Monomial inv = mono_pow(out.m, -1);
        for (const auto& [m, c] : p) out.q.emplace(mono_mul(m, inv), c / content);
        return out;
    }

    int base_index(const Poly& q) {
        Expr e = poly_expr(q);
        auto [it, inserted] = base_ids_.emplace(e.node(), static_cast<int>(bases_.size()));
        if (inserted) {
            bases_.push_back({q, e});
            keep_.push_back(e);
        }
        return it->second;
    }

    int radicand_index(const Poly& p) {
        Expr e = poly_expr(p);
        auto [it, inserted] = radicand_ids_.emplace(e.node(), static_cast<int>(radicands_.size()));
        if (inserted) {
            radicands_.push_back({p, e});
            keep_.push_back(e);
        }
        return it->second;
    }

    // --- fraction arithmetic

    Poly expand_den(const std::map<int, int>& den) const {
        Poly p = poly_const(1);
        for (auto [b, e] : den) p = poly_mul(p, poly_pow(bases_[b].poly, e));
        return p;
    }

    Frac frac_add(const Frac& a, const Frac& b) const {
        if (a.num.empty()) return b;
        if (b.num.empty()) return a;
        Frac out;
        std::map<int, int> needa, needb;
        out.den = a.den;
        for (auto [k, e] : b.den) out.den[k] = std::max(out.den[k], e);
        for (auto [k, e] : out.den) {
            int ea = a.den.count(k) ? a.den.at(k) : 0;
            int eb = b.den.count(k) ? b.den.at(k) : 0;
            if (e > ea) needa[k] = e - ea;
            if (e > eb) needb[k] = e - eb;
        }
        out.num = needa.empty() ? a.num : poly_mul(a.num, expand_den(needa));
        Poly tb = needb.empty() ? b.num : poly_mul(b.num, expand_den(needb));
        poly_add_scaled(out.num, tb, Rational(1));
        if (out.num.empty()) out.den.clear();
        return out;
    }

    Frac frac_mul(const Frac& a, const Frac& b) const {
        Frac out;
        out.num = poly_mul(a.num, b.num);
        if (out.num.empty()) return out;
        out.den = a.den;
        for (auto [k, e] : b.den) out.den[k] += e;
        return out;
    }

    void cancel(Frac& f) const {
        if (f.num.empty()) {
            f.den.clear();
            return;
        }
        for (auto it = f.den.begin(); it != f.den.end();) {
            while (it->second > 0) {
                auto q = poly_exact_div(f.num, bases_[it->first].poly);
                if (!q) break;
                f.num = std::move(*q);
                --it->second;
            }
            it = it->second == 0 ? f.den.erase(it) : std::next(it);
        }
    }

    RForm rf_add(const RForm& a, const RForm& b, const Rational& cb = 1) const {
        RForm out = a;
        for (const auto& [k, f] : b) {
            Frac scaled = f;
            if (cb != 1)
                for (auto& [m, c] : scaled.num) c *= cb;
            auto it = out.find(k);
            if (it == out.end()) {
                out.emplace(k, std::move(scaled));
            } else {
                it->second = frac_add(it->second, scaled);
                if (it->second.num.empty()) out.erase(it);
            }
        }
        return out;
    }

    RForm rf_mul(const RForm& a, const RForm& b) const {
        RForm out;
        for (const auto& [ka, fa] : a) {
            for (const auto& [kb, fb] : b) {
                RadKey key;
                std::vector<int> shared;
                std::set_symmetric_difference(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(key));
                std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(shared));
                Frac f = frac_mul(fa, fb);
                for (int r : shared) f.num = poly_mul(f.num, radicands_[r].poly);
                if (f.num.empty()) continue;
                auto it = out.find(key);
                if (it == out.end()) {
                    out.emplace(std::move(key), std::move(f));
                } else {
                    it->second = frac_add(it->second, f);
                    if (it->second.num.empty()) out.erase(it);
                }
            }
        }
        return out;
    }

    RForm rf_pow(const RForm& a, int k) const {
        RForm result = from_poly(poly_const(1));
        RForm base = a;
        while (k > 0) {
            if (k & 1) result = rf_mul(result, base);
            k >>= 1;
            if (k) base = rf_mul(base, base);
        }
        return result;
    }

    /// 1 / (N / D * sqrt(K)) for a single class.
    RForm invert_single(const RadKey& key, const Frac& f) {
        if (f.num.empty()) throw DivisionByZero("division by zero in normal form");
        Frac out;
        out.num = expand_den(f.den);
        Primitive p = primitive(f.num);
        Rational inv_c = Rational(1) / p.c;
        out.num = poly_shift(out.num, mono_pow(p.m, -1));
        for (auto& [m, c] : out.num) c *= inv_c;
        if (!(p.q.size() == 1 && p.q.begin()->first.empty())) out.den[base_index(p.q)] += 1;
        for (int r : key) {
            // 1/sqrt(r) = sqrt(r) / r
            Primitive pr = primitive(radicands_[r].poly);
            Rational ic = Rational(1) / pr.c;
            out.num = poly_shift(out.num, mono_pow(pr.m, -1));
            for (auto& [m, c] : out.num) c *= ic;
            if (!(pr.q.size() == 1 && pr.q.begin()->first.empty())) out.den[base_index(pr.q)] += 1;
        }
        cancel(out);
        RForm res;
        if (!out.num.empty()) res.emplace(key, std::move(out));
        return res;
    }

    std::optional<RForm> invert(const RForm& a) {
        if (a.empty()) throw DivisionByZero("division by zero in normal form");
        if (a.size() == 1) return invert_single(a.begin()->first, a.begin()->second);
        if (a.size() == 2 && a.begin()->first.empty() && std::next(a.begin())->first.size() == 1) {
            // 1/(A + B sqrt(r)) = (A - B sqrt(r)) / (A^2 - B^2 r)
            const Frac& fa = a.begin()->second;
            const auto& [kb, fb] = *std::next(a.begin());
            RForm A{{RadKey{}, fa}};
            RForm B{{kb, fb}};
            RForm conj = rf_add(A, B, Rational(-1));
            RForm delta = rf_add(rf_mul(A, A), rf_mul(B, B), Rational(-1));
            if (delta.size() != 1) return std::nullopt;
            RForm inv = invert_single(delta.begin()->first, delta.begin()->second);
            return rf_mul(conj, inv);
        }
        return std::nullopt;
    }

    RForm canonical(RForm r) const {
        for (auto it = r.begin(); it != r.end();) {
            cancel(it->second);
            it = it->second.num.empty() ? r.erase(it) : std::next(it);
        }
        return r;
    }

    // --- conversion

    RForm opaque(const Expr& e) {
        Monomial m{{atom(e), 1}};
        Poly p;
        p.emplace(std::move(m), Rational(1));
        return from_poly(std::move(p));
    }

    RForm factor_form(const Expr& base, HalfInt e) {
        const RForm& rb = to_rform(base);
        if (e.is_integer()) {
            int k = e.twice() / 2;
            if (k >= 0) return rf_pow(rb, k);
            auto inv = invert(rb);
            if (!inv) return opaque(pow(to_expr(rb), e));
            return rf_pow(*inv, -k);
        }
        int n = e.floor();
        bool polynomial = rb.size() == 1 && rb.begin()->first.empty() && rb.begin()->second.den.empty();
        if (polynomial) {
            for (const auto& [m, c] : rb.begin()->second.num)
                for (auto [v, x] : m)
                    if (x < 0) polynomial = false;
        }
        if (rb.empty()) return {};
        RForm integral;
        if (n >= 0) {
            integral = rf_pow(rb, n);
        } else {
            auto inv = invert(rb);
            if (!inv) return opaque(pow(to_expr(rb), e));
            integral = rf_pow(*inv, -n);
        }
        RForm root;
        if (polynomial) {
            int r = radicand_index(rb.begin()->second.num);
            root.emplace(RadKey{r}, Frac{poly_const(1), {}});
        } else {
            root = opaque(sqrt(to_expr(rb)));
        }
        return rf_mul(integral, root);
    }

    const RForm& to_rform(const Expr& e) {
        if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
        RForm r;
        switch (e.kind()) {
            case ExprKind::Constant:
                r = from_poly(poly_const(e.constant()));
                break;
            case ExprKind::Symbol:
                r = opaque(e);
                break;
            case ExprKind::Add: {
                r = from_poly(poly_const(e.constant()));
                for (const Term& t : e.terms()) r = rf_add(r, to_rform(t.expr), t.coeff);
                break;
            }
            case ExprKind::Mul: {
                r = from_poly(poly_const(1));
                for (const Factor& f : e.factors()) {
                    r = rf_mul(r, factor_form(f.base, f.exponent));
                    if (r.empty()) break;
                }
                break;
            }
        }
        keep_.push_back(e);
        return memo_.emplace(e.node(), std::move(r)).first->second;
    }

    Expr to_expr(const RForm& r) const {
        std::vector<Term> terms;
        for (const auto& [key, f] : r) {
            std::vector<Factor> extra;
            for (auto [b, k] : f.den) extra.push_back({bases_[b].expr, HalfInt(-k)});
            for (int rad : key) extra.push_back({radicands_[rad].expr, HalfInt::from_twice(1)});
            for (const auto& [m, c] : f.num) terms.push_back({mono_expr(m, c, extra), Rational(1)});
        }
        return sum(Rational(0), std::move(terms));
    }
};

}  // namespace

Expr normalize(const Expr& e, NormalizePolicy policy) {
    if (policy == NormalizePolicy::NoExpand) return e;
    if (e.kind() == ExprKind::Constant || e.kind() == ExprKind::Symbol) return e;
    Session s;
    return s.normalize(e);
}

std::size_t expanded_term_count(const Expr& e) {
    Session s;
    return s.term_count(e);
}

}  // namespace jetvar
