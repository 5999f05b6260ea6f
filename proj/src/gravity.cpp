#include "jetvar/gravity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace jetvar {

namespace {

int permutation_sign(const std::vector<int>& p) {
    int inversions = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inversions;
    return inversions % 2 == 0 ? 1 : -1;
}

/// Determinant of the submatrix of `entry` on the given rows and columns.
Expr leibniz_det(const std::vector<int>& rows, const std::vector<int>& cols,
                 const std::function<Expr(int, int)>& entry) {
    std::vector<int> perm(cols.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Expr> terms;
    do {
        std::vector<Expr> factors;
        for (std::size_t i = 0; i < rows.size(); ++i) factors.push_back(entry(rows[i], cols[static_cast<std::size_t>(perm[i])]));
        Expr t = product(factors);
        terms.push_back(permutation_sign(perm) > 0 ? t : -t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum(terms);
}

}  // namespace

MetricContext::MetricContext(int dim) : d_(dim) {
    if (dim < 2) throw std::invalid_argument("metric dimension must be at least 2");
    for (int a = 0; a < d_; ++a)
        for (int b = a; b < d_; ++b) pairs_.emplace_back(a, b);

    std::vector<int> all(static_cast<std::size_t>(d_));
    std::iota(all.begin(), all.end(), 0);
    auto entry = [this](int a, int b) { return g(a, b); };
    w_ = -leibniz_det(all, all, entry);
    sqrt_w_ = sqrt(w_);
    Expr inv_w = pow(w_, -1);
    inverse_.resize(static_cast<std::size_t>(d_ * d_));
    for (int mu = 0; mu < d_; ++mu) {
        for (int nu = mu; nu < d_; ++nu) {
            std::vector<int> rows, cols;
            for (int i = 0; i < d_; ++i) {
                if (i != mu) rows.push_back(i);
                if (i != nu) cols.push_back(i);
            }
            Expr cof = leibniz_det(rows, cols, entry);
            if ((mu + nu) % 2 == 1) cof = -cof;
            Expr v = -cof * inv_w;
            inverse_[static_cast<std::size_t>(mu * d_ + nu)] = v;
            inverse_[static_cast<std::size_t>(nu * d_ + mu)] = v;
        }
    }
}

int MetricContext::fiber(int a, int b) const {
    if (a < 0 || b < 0 || a >= d_ || b >= d_) throw std::out_of_range("metric index out of range");
    if (a > b) std::swap(a, b);
    // Position of (a, b) in the lexicographic list of pairs a <= b.
    return a * d_ - a * (a - 1) / 2 + (b - a);
}

std::pair<int, int> MetricContext::components(int f) const { return pairs_.at(static_cast<std::size_t>(f)); }

SymbolId MetricContext::g_symbol(int a, int b, const MultiIndex& derivative) const {
    return SymbolId::intern(Symbol::fiber_jet(fiber(a, b), derivative));
}

Expr MetricContext::g(int a, int b) const { return Expr(g_symbol(a, b, MultiIndex(static_cast<std::size_t>(d_)))); }

Expr MetricContext::dg(int a, int b, int mu) const {
    return Expr(g_symbol(a, b, MultiIndex::unit(static_cast<std::size_t>(d_), static_cast<std::size_t>(mu))));
}

Expr MetricContext::ddg(int a, int b, int mu, int nu) const {
    auto m = static_cast<std::size_t>(d_);
    return Expr(g_symbol(a, b, MultiIndex::unit(m, static_cast<std::size_t>(mu)) + MultiIndex::unit(m, static_cast<std::size_t>(nu))));
}

Expr MetricContext::det() const { return -w_; }

const Expr& MetricContext::inverse(int mu, int nu) const {
    return inverse_.at(static_cast<std::size_t>(mu * d_ + nu));
}

const Expr& MetricContext::christoffel(int rho, int mu, int nu) const {
    auto key = std::make_tuple(rho, std::min(mu, nu), std::max(mu, nu));
    auto it = christoffel_.find(key);
    if (it != christoffel_.end()) return it->second;
    std::vector<Expr> terms;
    for (int l = 0; l < d_; ++l)
        terms.push_back(inverse(rho, l) * (dg(nu, l, mu) + dg(l, mu, nu) - dg(mu, nu, l)));
    Expr v = Expr(Rational(1, 2)) * sum(terms);
    return christoffel_.emplace(key, v).first->second;
}

const Expr& MetricContext::ricci(int mu, int nu) const {
    auto key = std::make_pair(mu, nu);
    auto it = ricci_.find(key);
    if (it != ricci_.end()) return it->second;
    std::vector<Expr> terms;
    for (int r = 0; r < d_; ++r) {
        terms.push_back(total_derivative(christoffel(r, mu, nu), r));
        terms.push_back(-total_derivative(christoffel(r, r, nu), mu));
        for (int s = 0; s < d_; ++s) {
            terms.push_back(christoffel(r, mu, nu) * christoffel(s, s, r));
            terms.push_back(-(christoffel(r, s, nu) * christoffel(s, mu, r)));
        }
    }
    return ricci_.emplace(key, sum(terms)).first->second;
}

const Expr& MetricContext::scalar_curvature() const {
    if (!scalar_) {
        std::vector<Expr> terms;
        for (int mu = 0; mu < d_; ++mu)
            for (int nu = 0; nu < d_; ++nu) terms.push_back(inverse(mu, nu) * ricci(mu, nu));
        scalar_ = sum(terms);
    }
    return *scalar_;
}

const Expr& MetricContext::raised_ricci(int a, int b) const {
    auto key = std::make_pair(a, b);
    auto it = raised_.find(key);
    if (it != raised_.end()) return it->second;
    std::vector<Expr> terms;
    for (int m = 0; m < d_; ++m)
        for (int n = 0; n < d_; ++n) terms.push_back(inverse(a, m) * inverse(b, n) * ricci(m, n));
    return raised_.emplace(key, sum(terms)).first->second;
}

Expr MetricContext::einstein_density(int a, int b) const {
    Expr g_part = raised_ricci(a, b) - Expr(Rational(1, 2)) * inverse(a, b) * scalar_curvature();
    return Expr(-comb(a, b)) * sqrt_w_ * g_part;
}

Expr MetricContext::hilbert_expr() const { return sqrt_w_ * scalar_curvature(); }

FieldLagrangian MetricContext::hilbert_lagrangian(NormalizePolicy policy) const {
    return FieldLagrangian{d_, fiber_count(), hilbert_expr(), policy};
}

Expr MetricContext::closed_form_first(int a, int b, int mu) const {
    std::vector<Expr> terms;
    for (int n = 0; n < d_; ++n) {
        for (int s = 0; s < d_; ++s) {
            terms.push_back(christoffel(a, n, s) *
                            (inverse(b, s) * inverse(mu, n) - inverse(b, mu) * inverse(s, n)));
            terms.push_back(christoffel(b, n, s) *
                            (inverse(a, s) * inverse(mu, n) - inverse(a, mu) * inverse(s, n)));
        }
    }
    return Expr(Rational(comb(a, b)) / 2) * sqrt_w_ * sum(terms);
}

Expr MetricContext::closed_form_second(int a, int b, int mu, int nu) const {
    Expr bracket = inverse(a, mu) * inverse(b, nu) + inverse(a, nu) * inverse(b, mu) -
                   Expr(2) * inverse(a, b) * inverse(mu, nu);
    return Expr(Rational(comb(a, b)) / 2) * sqrt_w_ * bracket;
}

}  // namespace jetvar
