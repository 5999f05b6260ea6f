#include "jetvar/forms.hpp"

#include <algorithm>

#include "jetvar/errors.hpp"
#include "jetvar/text.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

bool FormKeyLess::operator()(const FormKey& a, const FormKey& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](SymbolId x, SymbolId y) { return symbol_less(x, y); });
}

namespace {

bool is_coordinate(SymbolId s) { return s->kind == SymbolKind::Base || s->kind == SymbolKind::Fiber; }

/// Sorts in place; returns the permutation sign, or 0 on a repeated entry.
int sort_with_sign(std::vector<SymbolId>& key) {
    int sign = 1;
    for (std::size_t i = 1; i < key.size(); ++i) {
        for (std::size_t j = i; j > 0 && symbol_less(key[j], key[j - 1]); --j) {
            std::swap(key[j], key[j - 1]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < key.size(); ++i)
        if (key[i] == key[i - 1]) return 0;
    return sign;
}

}  // namespace

JetForm::JetForm(JetSpace space, int degree, NormalizePolicy policy)
    : space_(space), degree_(degree), policy_(policy) {
    if (degree < 0) throw std::invalid_argument("negative form degree");
}

JetForm JetForm::function(const JetSpace& space, const Expr& f, NormalizePolicy policy) {
    JetForm out(space, 0, policy);
    out.add({}, f);
    return out;
}

JetForm JetForm::monomial(const JetSpace& space, const std::vector<SymbolId>& differentials, const Expr& coeff,
                          NormalizePolicy policy) {
    JetForm out(space, static_cast<int>(differentials.size()), policy);
    out.add(differentials, coeff);
    return out;
}

JetForm JetForm::volume(const JetSpace& space, NormalizePolicy policy) {
    std::vector<SymbolId> xs;
    for (int i = 0; i < space.base_dim(); ++i) xs.push_back(space.x(i));
    return monomial(space, xs, Expr(1), policy);
}

Expr JetForm::clean(const Expr& e) const { return policy_ == NormalizePolicy::Expand ? normalize(e) : e; }

Expr JetForm::coefficient(const std::vector<SymbolId>& differentials) const {
    std::vector<SymbolId> key = differentials;
    int sign = sort_with_sign(key);
    if (sign == 0) return Expr(0);
    auto it = terms_.find(key);
    if (it == terms_.end()) return Expr(0);
    return sign > 0 ? it->second : -it->second;
}

void JetForm::add(std::vector<SymbolId> differentials, const Expr& coeff) {
    if (static_cast<int>(differentials.size()) != degree_) throw std::invalid_argument("form degree mismatch");
    for (SymbolId s : differentials)
        if (!is_coordinate(s)) throw UnknownCoordinate("differential of non-coordinate " + symbol_name(s));
    int sign = sort_with_sign(differentials);
    if (sign == 0 || coeff.is_zero_constant()) return;
    Expr c = sign > 0 ? coeff : -coeff;
    auto it = terms_.find(differentials);
    Expr total = it == terms_.end() ? clean(c) : clean(it->second + c);
    if (total.is_zero_constant()) {
        if (it != terms_.end()) terms_.erase(it);
    } else if (it == terms_.end()) {
        terms_.emplace(std::move(differentials), total);
    } else {
        it->second = total;
    }
}

JetForm JetForm::operator+(const JetForm& o) const {
    if (o.degree_ != degree_) throw std::invalid_argument("adding forms of different degree");
    JetForm out = *this;
    for (const auto& [k, c] : o.terms_) out.add(k, c);
    return out;
}

JetForm JetForm::operator-(const JetForm& o) const { return *this + o.scaled(Expr(-1)); }

JetForm JetForm::scaled(const Expr& f) const {
    JetForm out(space_, degree_, policy_);
    for (const auto& [k, c] : terms_) out.add(k, c * f);
    return out;
}

std::string JetForm::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) out += " + ";
        first = false;
        std::string coeff = jetvar::to_string(c);
        bool wrap = c.kind() == ExprKind::Add;
        if (k.empty()) {
            out += wrap ? "(" + coeff + ")" : coeff;
            continue;
        }
        if (!c.is_one_constant()) out += (wrap ? "(" + coeff + ")" : coeff) + "*";
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) out += "^";
            out += "d" + symbol_name(k[i]);
        }
    }
    return out;
}

int ambient_dimension(const JetSpace& space) { return static_cast<int>(space.coordinates().size()); }

JetForm wedge(const JetForm& a, const JetForm& b) {
    int degree = a.degree() + b.degree();
    if (degree > ambient_dimension(a.space()))
        throw DegreeOverflow("wedge of degree " + std::to_string(degree) + " exceeds the ambient dimension");
    JetForm out(a.space(), degree, a.policy());
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            std::vector<SymbolId> key = ka;
            key.insert(key.end(), kb.begin(), kb.end());
            out.add(std::move(key), ca * cb);
        }
    }
    return out;
}

JetForm exterior_derivative(const JetForm& a) {
    JetForm out(a.space(), a.degree() + 1, a.policy());
    for (const auto& [k, c] : a.terms()) {
        for (SymbolId s : free_symbols(c)) {
            if (!is_coordinate(s)) continue;
            if (std::find(k.begin(), k.end(), s) != k.end()) continue;
            Expr dc = diff(c, s);
            if (dc.is_zero_constant()) continue;
            std::vector<SymbolId> key{s};
            key.insert(key.end(), k.begin(), k.end());
            out.add(std::move(key), dc);
        }
    }
    return out;
}

JetForm interior_product(const VectorField& v, const JetForm& a) {
    if (a.degree() == 0) return JetForm(a.space(), 0, a.policy());
    JetForm out(a.space(), a.degree() - 1, a.policy());
    for (const auto& [s, vc] : v.components) {
        for (const auto& [k, c] : a.terms()) {
            auto it = std::find(k.begin(), k.end(), s);
            if (it == k.end()) continue;
            std::size_t pos = static_cast<std::size_t>(it - k.begin());
            std::vector<SymbolId> rest = k;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
            Expr term = vc * c;
            out.add(std::move(rest), pos % 2 == 0 ? term : -term);
        }
    }
    return out;
}

JetForm lie_derivative(const VectorField& v, const JetForm& a) {
    JetForm first = interior_product(v, exterior_derivative(a));
    if (a.degree() == 0) return first;
    return first + exterior_derivative(interior_product(v, a));
}

namespace {

bool vertical_above(SymbolId s, int order) { return s->kind == SymbolKind::Fiber && s->index.length() > order; }

bool coefficient_zero(const JetForm& a, const Expr& c) {
    if (c.is_zero_constant()) return true;
    if (a.policy() == NormalizePolicy::Expand) return false;  // already normalized
    ZeroTestOptions o;
    o.policy = a.policy();
    return zero_test(c, o).zero;
}

}  // namespace

bool is_semibasic(const JetForm& a, int s) {
    for (const auto& [k, c] : a.terms()) {
        bool vertical = std::any_of(k.begin(), k.end(), [s](SymbolId v) { return vertical_above(v, s); });
        if (vertical && !coefficient_zero(a, c)) return false;
    }
    return true;
}

bool is_basic(const JetForm& a, int s) {
    if (!is_semibasic(a, s)) return false;
    if (a.policy() == NormalizePolicy::Expand) return is_semibasic(exterior_derivative(a), s);
    // For semibasic a, the vertical part of d a is sum_v dc/dv dv ^ K over keys K
    // without vertical entries, so d a is semibasic iff every coefficient
    // depends on no vertical coordinate above s.
    for (const auto& [k, c] : a.terms())
        if (!projects_onto(c, s, a.policy())) return false;
    return true;
}

bool forms_equal(const JetForm& a, const JetForm& b) {
    if (a.degree() != b.degree()) return false;
    JetForm d = a - b;
    for (const auto& [k, c] : d.terms())
        if (!coefficient_zero(a, c)) return false;
    return true;
}

}  // namespace jetvar
