#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "jetvar/expr.hpp"
#include "jetvar/jet_space.hpp"
#include "jetvar/variational.hpp"

namespace jetvar {

/// The jet bundle of metrics over a d-dimensional base. The fiber is indexed
/// by the independent components g_ab, a <= b, in lexicographic order; fiber
/// label of (a, b) is its position. Indices are zero-based.
class MetricContext {
public:
    explicit MetricContext(int dim);

    int dim() const noexcept { return d_; }
    int fiber_count() const noexcept { return d_ * (d_ + 1) / 2; }
    JetSpace space(int order) const { return JetSpace(d_, fiber_count(), order); }

    /// Fiber label of g_ab; symmetric in (a, b).
    int fiber(int a, int b) const;
    std::pair<int, int> components(int fiber) const;
    /// n(ab): 1 on the diagonal, 2 off it.
    static int comb(int a, int b) { return a == b ? 1 : 2; }

    SymbolId g_symbol(int a, int b, const MultiIndex& derivative) const;
    Expr g(int a, int b) const;
    Expr dg(int a, int b, int mu) const;
    Expr ddg(int a, int b, int mu, int nu) const;

    Expr det() const;
    /// w = -det g, the radicand of sqrt|det g| for Lorentzian metrics.
    const Expr& w() const noexcept { return w_; }
    const Expr& sqrt_w() const noexcept { return sqrt_w_; }
    /// g^{mu nu} = adj(g)_{mu nu} / det g = -cofactor / w.
    const Expr& inverse(int mu, int nu) const;

    /// Gamma^rho_{mu nu} on J^1.
    const Expr& christoffel(int rho, int mu, int nu) const;
    /// R_{mu nu} = D_r G^r_{mu nu} - D_mu G^r_{r nu} + G^r_{mu nu} G^s_{s r} - G^r_{s nu} G^s_{mu r}.
    const Expr& ricci(int mu, int nu) const;
    const Expr& scalar_curvature() const;
    /// R^{ab} = g^{am} g^{bn} R_{mn}.
    const Expr& raised_ricci(int a, int b) const;
    /// -sqrt(w) n(ab) (R^{ab} - 1/2 g^{ab} R).
    Expr einstein_density(int a, int b) const;

    /// sqrt(w) g^{mu nu} R_{mu nu}.
    Expr hilbert_expr() const;
    FieldLagrangian hilbert_lagrangian(NormalizePolicy policy) const;

    /// n(ab)/2 sqrt(w) (G^a_{ns}(g^{bs} g^{mn} - g^{bm} g^{sn}) + G^b_{ns}(g^{as} g^{mn} - g^{am} g^{sn})).
    Expr closed_form_first(int a, int b, int mu) const;
    /// n(ab)/2 sqrt(w) (g^{am} g^{bn} + g^{an} g^{bm} - 2 g^{ab} g^{mn}).
    Expr closed_form_second(int a, int b, int mu, int nu) const;

private:
    int d_;
    std::vector<std::pair<int, int>> pairs_;
    Expr w_, sqrt_w_;
    std::vector<Expr> inverse_;
    mutable std::map<std::tuple<int, int, int>, Expr> christoffel_;
    mutable std::map<std::pair<int, int>, Expr> ricci_, raised_;
    mutable std::optional<Expr> scalar_;
};

}  // namespace jetvar
