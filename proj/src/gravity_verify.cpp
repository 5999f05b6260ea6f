#include "jetvar/gravity_verify.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <sstream>

#include "jetvar/errors.hpp"
#include "jetvar/jet_space.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

namespace {

const Rational kStep(Rational(1) / 100000);

BigFloat to_big(const Rational& q) { return BigFloat(q.get_num().get_str()) / BigFloat(q.get_den().get_str()); }

bool is_unknown(SymbolId s) { return s->kind == SymbolKind::Unknown; }

double relative_error(const BigFloat& got, const BigFloat& want, const BigFloat& floor = BigFloat(0)) {
    BigFloat scale = std::max({abs(got), abs(want), abs(floor)});
    if (scale < BigFloat("1e-30")) return 0;
    return static_cast<double>(abs(got - want) / scale);
}

std::string pair_label(int a, int b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

/// Accumulates comparisons into one IdentityResult.
class Tally {
public:
    Tally(std::string identity, std::string method, std::uint64_t seed, double tolerance) : tolerance_(tolerance) {
        r_.identity = std::move(identity);
        r_.method = std::move(method);
        r_.seed = seed;
    }

    void relative(const BigFloat& got, const BigFloat& want, const std::string& where) {
        record(relative_error(got, want), where);
    }
    /// Relative to the larger of the two values and the function magnitude;
    /// a derivative that vanishes at the point is compared against the
    /// function's own scale.
    void derivative(const BigFloat& got, const BigFloat& want, const BigFloat& function, const std::string& where) {
        record(relative_error(got, want, function), where);
    }
    void absolute(const BigFloat& value, const std::string& where) { record(static_cast<double>(abs(value)), where); }
    void require(bool ok, const std::string& where) {
        ++r_.checks;
        if (!ok) fail(where);
    }
    void fail(const std::string& where) {
        if (r_.passed) r_.detail = where;
        r_.passed = false;
    }
    void set_points(int n) { r_.points = n; }
    IdentityResult done() { return std::move(r_); }

private:
    void record(double err, const std::string& where) {
        ++r_.checks;
        r_.max_error = std::max(r_.max_error, err);
        if (!(err <= tolerance_)) {
            std::ostringstream out;
            out << where << ": error " << err;
            fail(out.str());
        }
    }

    IdentityResult r_;
    double tolerance_;
};

/// f'(0) from f(-2h), f(-h), f(h), f(2h).
BigFloat stencil(const std::array<BigFloat, 4>& v, const BigFloat& h) {
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h);
}

constexpr std::array<int, 4> kShifts{-2, -1, 1, 2};

/// Evaluators at the four stencil points along direction i of a section.
struct SectionStencil {
    std::vector<std::unique_ptr<FloatEvaluator<BigFloat>>> at;
    BigFloat h;

    SectionStencil(const MetricSection& section, int dim, int direction, int order) : h(to_big(kStep)) {
        for (int k : kShifts) {
            std::vector<Rational> x(static_cast<std::size_t>(dim), Rational(0));
            x[static_cast<std::size_t>(direction)] = kStep * k;
            at.push_back(std::make_unique<FloatEvaluator<BigFloat>>(to_float_point(section.jet(x, order))));
        }
    }

    BigFloat derivative(const Expr& e) {
        std::array<BigFloat, 4> v;
        for (std::size_t k = 0; k < 4; ++k) v[k] = (*at[k])(e);
        return stencil(v, h);
    }
};

/// Central difference in one coordinate of a point.
BigFloat partial_difference(const Expr& e, const FloatPoint<BigFloat>& point, SymbolId s) {
    BigFloat x = point.at(s);
    BigFloat h = to_big(kStep) * std::max(BigFloat(1), abs(x));
    std::array<BigFloat, 4> v;
    for (std::size_t k = 0; k < 4; ++k) {
        FloatPoint<BigFloat> shifted = point;
        shifted[s] = x + kShifts[k] * h;
        v[k] = FloatEvaluator<BigFloat>(std::move(shifted))(e);
    }
    return stencil(v, h);
}

std::vector<SymbolId> metric_coordinates(const MetricContext& ctx, int lo, int hi) {
    JetSpace space = ctx.space(hi);
    std::vector<SymbolId> out;
    for (int level = lo; level <= hi; ++level)
        for (SymbolId s : space.fiber_coordinates(level)) out.push_back(s);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

MetricSection::MetricSection(const MetricContext& ctx, int degree,
                             std::vector<std::vector<std::pair<MultiIndex, Rational>>> taylor)
    : ctx_(&ctx), degree_(degree), taylor_(std::move(taylor)) {}

Point MetricSection::jet(const std::vector<Rational>& x, int order) const {
    const int d = ctx_->dim();
    const auto m = static_cast<std::size_t>(d);
    JetSpace space = ctx_->space(order);
    Point out;
    for (int i = 0; i < d; ++i) out.emplace(space.x(i), x[static_cast<std::size_t>(i)]);
    for (std::size_t f = 0; f < taylor_.size(); ++f) {
        for (const MultiIndex& I : multi_indices_between(m, 0, order)) {
            Rational value = 0;
            for (const auto& [J, c] : taylor_[f]) {
                Rational term = c;
                bool below = true;
                for (std::size_t i = 0; i < m && below; ++i) {
                    int e = J[i] - I[i];
                    if (e < 0) {
                        below = false;
                        break;
                    }
                    for (int p = 1; p <= e; ++p) term *= x[i] / p;
                }
                if (below) value += term;
            }
            out.emplace(space.u(static_cast<int>(f), I), value);
        }
    }
    return out;
}

Point MetricSection::jet_at_origin(int order) const {
    return jet(std::vector<Rational>(static_cast<std::size_t>(ctx_->dim()), Rational(0)), order);
}

MetricSampler::MetricSampler(const MetricContext& ctx, std::uint64_t seed) : ctx_(&ctx), rng_(seed) {}

MetricSection MetricSampler::next(int degree) {
    const auto m = static_cast<std::size_t>(ctx_->dim());
    std::uniform_int_distribution<int> small(-3, 3), coeff(-4, 4);
    for (;;) {
        std::vector<std::vector<std::pair<MultiIndex, Rational>>> taylor(static_cast<std::size_t>(ctx_->fiber_count()));
        for (int f = 0; f < ctx_->fiber_count(); ++f) {
            auto [a, b] = ctx_->components(f);
            for (const MultiIndex& J : multi_indices_between(m, 0, degree)) {
                Rational c;
                if (J.length() == 0) {
                    Rational eta = a != b ? 0 : (a == 0 ? -1 : 1);
                    c = eta + Rational(small(rng_)) / 16;
                } else {
                    c = Rational(coeff(rng_)) / 8;
                }
                taylor[static_cast<std::size_t>(f)].emplace_back(J, c);
            }
        }
        MetricSection section(*ctx_, degree, std::move(taylor));
        NumericValue det = eval_numeric(ctx_->det(), section.jet_at_origin(0));
        if (det.rational < 0 && abs(det.rational) >= Rational(1) / 1000) return section;
    }
}

Point flat_point(const MetricContext& ctx, int order) {
    JetSpace space = ctx.space(order);
    Point out;
    for (int i = 0; i < ctx.dim(); ++i) out.emplace(space.x(i), 0);
    for (SymbolId s : space.coordinates()) {
        if (s->kind == SymbolKind::Base) continue;
        Rational v = 0;
        if (s->index.length() == 0) {
            auto [a, b] = ctx.components(s->fiber);
            if (a == b) v = a == 0 ? -1 : 1;
        }
        out.emplace(s, v);
    }
    return out;
}

FloatPoint<BigFloat> to_float_point(const Point& point) {
    FloatPoint<BigFloat> out;
    for (const auto& [s, q] : point) out.emplace(s, to_big(q));
    return out;
}

HilbertPipeline run_hilbert_pipeline(const MetricContext& ctx, int max_generations) {
    HilbertPipeline p;
    p.lagrangian = ctx.hilbert_lagrangian(NormalizePolicy::NoExpand);
    p.coefficients = cartan_coefficients(p.lagrangian);
    p.chain = constraint_algorithm(p.lagrangian, p.coefficients, max_generations);
    return p;
}

bool GravityReport::passed() const {
    return std::all_of(results.begin(), results.end(), [](const IdentityResult& r) { return r.passed; });
}

void GravityReport::require() const {
    std::string failed;
    for (const IdentityResult& r : results)
        if (!r.passed) failed += "\n  " + r.identity + " [" + r.method + "]: " + r.detail;
    if (!failed.empty()) throw VerificationFailed("gravity verification failed for d = " + std::to_string(dim) + failed);
}

// ---------------------------------------------------------------------------

std::vector<IdentityResult> verify_metric_identities(const MetricContext& ctx, const VerifyOptions& options) {
    const int d = ctx.dim();
    std::vector<IdentityResult> out;
    {
        Tally t("symmetric metric access", "structural", 0, 0);
        t.require(ctx.fiber_count() == d * (d + 1) / 2, "fiber count");
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                t.require(ctx.g_symbol(a, b, MultiIndex(static_cast<std::size_t>(d))) ==
                              ctx.g_symbol(b, a, MultiIndex(static_cast<std::size_t>(d))),
                          "g" + pair_label(a, b));
        out.push_back(t.done());
    }
    {
        std::uint64_t seed = options.seed + 1;
        Tally t("g^{mn} g_{nr} = delta^m_r", "exact-at-points", seed, 0);
        MetricSampler sampler(ctx, seed);
        std::vector<std::vector<Expr>> products(static_cast<std::size_t>(d));
        for (int mu = 0; mu < d; ++mu) {
            for (int rho = 0; rho < d; ++rho) {
                std::vector<Expr> terms;
                for (int nu = 0; nu < d; ++nu) terms.push_back(ctx.inverse(mu, nu) * ctx.g(nu, rho));
                products[static_cast<std::size_t>(mu)].push_back(sum(terms));
            }
        }
        for (int p = 0; p < options.points; ++p) {
            ExactEvaluator ev(sampler.next(0).jet_at_origin(0));
            for (int mu = 0; mu < d; ++mu) {
                for (int rho = 0; rho < d; ++rho) {
                    NumericValue v = ev(products[static_cast<std::size_t>(mu)][static_cast<std::size_t>(rho)]);
                    t.require(v.exact && v.rational == (mu == rho ? 1 : 0),
                              "entry " + pair_label(mu, rho) + " at point " + std::to_string(p));
                }
            }
        }
        t.set_points(options.points);
        out.push_back(t.done());
    }
    {
        std::uint64_t seed = options.seed + 2;
        Tally t("R_{mn} = R_{nm}", "numeric", seed, options.tolerance);
        MetricSampler sampler(ctx, seed);
        for (int p = 0; p < options.points; ++p) {
            FloatEvaluator<BigFloat> ev(to_float_point(sampler.next(2).jet_at_origin(2)));
            for (int mu = 0; mu < d; ++mu)
                for (int nu = mu + 1; nu < d; ++nu)
                    t.relative(ev(ctx.ricci(mu, nu)), ev(ctx.ricci(nu, mu)),
                               "R" + pair_label(mu, nu) + " at point " + std::to_string(p));
        }
        t.set_points(options.points);
        out.push_back(t.done());
    }
    {
        Tally t("flat point: Christoffel symbols and Ricci tensor vanish", "exact-at-points", 0, 0);
        ExactEvaluator ev(flat_point(ctx, 2));
        for (int r = 0; r < d; ++r)
            for (int mu = 0; mu < d; ++mu)
                for (int nu = 0; nu < d; ++nu) {
                    NumericValue g = ev(ctx.christoffel(r, mu, nu));
                    t.require(g.exact && g.rational == 0, "Gamma^" + std::to_string(r) + "_" + pair_label(mu, nu));
                }
        for (int mu = 0; mu < d; ++mu)
            for (int nu = 0; nu < d; ++nu) {
                NumericValue v = ev(ctx.ricci(mu, nu));
                t.require(v.exact && v.rational == 0, "R" + pair_label(mu, nu));
            }
        t.set_points(1);
        out.push_back(t.done());
    }
    {
        Tally t("d sqrt(w) / d g_ab = n(ab)/2 sqrt(w) g^{ab}", "probabilistic", 0, 0);
        ZeroTestOptions zo;
        zo.policy = NormalizePolicy::NoExpand;
        for (int f = 0; f < ctx.fiber_count(); ++f) {
            auto [a, b] = ctx.components(f);
            Expr lhs = diff(ctx.sqrt_w(), ctx.g_symbol(a, b, MultiIndex(static_cast<std::size_t>(d))));
            Expr rhs = Expr(Rational(MetricContext::comb(a, b)) / 2) * ctx.sqrt_w() * ctx.inverse(a, b);
            t.require(zero_test(lhs - rhs, zo).zero, "g" + pair_label(a, b));
        }
        out.push_back(t.done());
    }
    return out;
}

std::vector<IdentityResult> verify_cartan_closed_forms(const MetricContext& ctx, const CartanCoefficients& c,
                                                       const VerifyOptions& options) {
    const int d = ctx.dim();
    std::vector<IdentityResult> out;
    auto L2 = [&](int f, int mu, int nu) -> const Expr& {
        return c.L2[static_cast<std::size_t>(f)][static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
    };
    auto L1 = [&](int f, int mu) -> const Expr& {
        return c.L1[static_cast<std::size_t>(f)][static_cast<std::size_t>(mu)];
    };
    auto label = [](int a, int b, int mu, int nu) {
        std::string s = "(a,b,m";
        s += nu >= 0 ? ",n)=(" : ")=(";
        s += std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(mu);
        if (nu >= 0) s += "," + std::to_string(nu);
        return s + ")";
    };

    if (d <= options.exact_max_dim) {
        Tally second("L^{ab,mn} = closed form", "symbolic", 0, 0), first("L^{ab,m} = closed form", "symbolic", 0, 0);
        for (int f = 0; f < ctx.fiber_count(); ++f) {
            auto [a, b] = ctx.components(f);
            for (int mu = 0; mu < d; ++mu) {
                for (int nu = 0; nu < d; ++nu)
                    second.require(normalize(L2(f, mu, nu) - ctx.closed_form_second(a, b, mu, nu)).is_zero_constant(),
                                   label(a, b, mu, nu));
                first.require(normalize(L1(f, mu) - ctx.closed_form_first(a, b, mu)).is_zero_constant(),
                              label(a, b, mu, -1));
            }
        }
        out.push_back(second.done());
        out.push_back(first.done());
    }
    {
        std::uint64_t seed = options.seed + 3;
        Tally second("L^{ab,mn} = closed form", "numeric", seed, options.tolerance),
            first("L^{ab,m} = closed form", "numeric", seed, options.tolerance);
        MetricSampler sampler(ctx, seed);
        for (int p = 0; p < options.points; ++p) {
            FloatEvaluator<BigFloat> ev(to_float_point(sampler.next(1).jet_at_origin(1)));
            std::string at = " at point " + std::to_string(p);
            for (int f = 0; f < ctx.fiber_count(); ++f) {
                auto [a, b] = ctx.components(f);
                for (int mu = 0; mu < d; ++mu) {
                    for (int nu = 0; nu < d; ++nu)
                        second.relative(ev(L2(f, mu, nu)), ev(ctx.closed_form_second(a, b, mu, nu)),
                                        label(a, b, mu, nu) + at);
                    first.relative(ev(L1(f, mu)), ev(ctx.closed_form_first(a, b, mu)), label(a, b, mu, -1) + at);
                }
            }
        }
        second.set_points(options.points);
        first.set_points(options.points);
        out.push_back(second.done());
        out.push_back(first.done());
    }
    {
        Tally second("L^{ab,mn} projects onto J^0", "probabilistic", 0, 0),
            first("L^{ab,m} projects onto J^1", "probabilistic", 0, 0);
        for (int f = 0; f < ctx.fiber_count(); ++f) {
            auto [a, b] = ctx.components(f);
            for (int mu = 0; mu < d; ++mu) {
                for (int nu = 0; nu < d; ++nu)
                    second.require(projects_onto(L2(f, mu, nu), 0, NormalizePolicy::NoExpand), label(a, b, mu, nu));
                first.require(projects_onto(L1(f, mu), 1, NormalizePolicy::NoExpand), label(a, b, mu, -1));
            }
        }
        out.push_back(second.done());
        out.push_back(first.done());
    }
    {
        Tally t("L^{00,00} = 0", "probabilistic", 0, 0);
        ZeroTestOptions zo;
        zo.policy = NormalizePolicy::NoExpand;
        t.require(zero_test(L2(0, 0, 0), zo).zero, "L^{00,00}");
        out.push_back(t.done());
    }
    return out;
}

std::vector<IdentityResult> verify_hilbert_projectability(const MetricContext&, const HilbertPipeline& pipeline) {
    std::vector<IdentityResult> out;
    {
        Tally t("projectability level of the Hilbert Lagrangian is 1", "probabilistic", 0, 0);
        std::optional<int> level = projectability_level(pipeline.lagrangian, pipeline.coefficients);
        t.require(level == 1, level ? "level " + std::to_string(*level) : "not projectable");
        out.push_back(t.done());
    }
    {
        Tally t("Poincare-Cartan form is basic over J^1", "probabilistic", 0, 0);
        t.require(is_basic(poincare_cartan(pipeline.lagrangian, pipeline.coefficients), 1), "is_basic(Theta, 1)");
        out.push_back(t.done());
    }
    return out;
}

std::vector<IdentityResult> einstein_constraints(const MetricContext& ctx, const HilbertPipeline& pipeline,
                                                 const VerifyOptions& options) {
    const int d = ctx.dim();
    const ConstraintChain& chain = pipeline.chain;
    std::vector<IdentityResult> out;
    const ChainStatus expected = d == 2 ? ChainStatus::TerminatedIdentically : ChainStatus::TerminatedWithResidual;
    {
        Tally t("constraint chain status", "structural", 0, 0);
        t.require(chain.status == expected, "status " + to_string(chain.status) + ", expected " + to_string(expected));
        out.push_back(t.done());
    }
    Tally count("generation 1 has one constraint per metric component", "structural", 0, 0);
    if (chain.generations.empty()) {
        count.fail("no generation 1");
        out.push_back(count.done());
        return out;
    }
    const std::vector<Constraint>& gen1 = chain.generations[0];
    std::vector<int> seen(static_cast<std::size_t>(ctx.fiber_count()), 0);
    for (const Constraint& c : gen1) ++seen[static_cast<std::size_t>(c.fiber)];
    for (int f = 0; f < ctx.fiber_count(); ++f)
        count.require(seen[static_cast<std::size_t>(f)] == 1,
                      "fiber g" + pair_label(ctx.components(f).first, ctx.components(f).second));
    out.push_back(count.done());

    {
        std::uint64_t seed = options.seed + 4;
        Tally match("generation 1 = -sqrt(w) n(ab) (R^{ab} - 1/2 g^{ab} R)", "numeric", seed, options.tolerance);
        Tally vanish("generation 1 vanishes in two dimensions", "numeric", seed, options.tolerance);
        MetricSampler sampler(ctx, seed);
        for (int p = 0; p < options.points; ++p) {
            FloatEvaluator<BigFloat> ev(to_float_point(sampler.next(2).jet_at_origin(2)));
            for (const Constraint& c : gen1) {
                auto [a, b] = ctx.components(c.fiber);
                std::string where = "L^" + pair_label(a, b) + " at point " + std::to_string(p);
                BigFloat v = ev(c.expr);
                match.relative(v, ev(ctx.einstein_density(a, b)), where);
                if (d == 2) vanish.absolute(v, where);
            }
        }
        match.set_points(options.points);
        vanish.set_points(options.points);
        out.push_back(match.done());
        if (d == 2) out.push_back(vanish.done());
    }
    {
        Tally t("flat point solves generation 1", "exact-at-points", 0, 0);
        ExactEvaluator ev(flat_point(ctx, 2));
        for (const Constraint& c : gen1) {
            NumericValue v = ev(c.expr);
            t.require(v.exact && v.rational == 0, "L^" + pair_label(ctx.components(c.fiber).first, ctx.components(c.fiber).second));
        }
        t.set_points(1);
        out.push_back(t.done());
    }
    {
        Tally t("generation 1 projects onto J^2", "probabilistic", 0, 0);
        for (const Constraint& c : gen1)
            t.require(projects_onto(c.expr, 2, NormalizePolicy::NoExpand),
                      "L^" + pair_label(ctx.components(c.fiber).first, ctx.components(c.fiber).second));
        out.push_back(t.done());
    }
    if (d == 2) return out;

    {
        Tally t("generation 2 = D_r of generation 1", "structural", 0, 0);
        if (chain.generations.size() < 2) {
            t.fail("no generation 2");
        } else {
            const auto& gen2 = chain.generations[1];
            t.require(gen2.size() == gen1.size() * static_cast<std::size_t>(d),
                      std::to_string(gen2.size()) + " constraints in generation 2");
            for (const Constraint& c : gen2) {
                const Constraint& parent = gen1[static_cast<std::size_t>(c.parent)];
                t.require(c.expr == total_derivative(parent.expr, c.direction),
                          "D_" + std::to_string(c.direction) + " L^" + pair_label(ctx.components(c.fiber).first,
                                                                                 ctx.components(c.fiber).second));
            }
        }
        out.push_back(t.done());
    }
    if (chain.generations.size() >= 2) {
        std::uint64_t seed = options.seed + 5;
        Tally t("generation 2 = D_r of the Einstein density", "numeric", seed, options.tolerance);
        MetricSampler sampler(ctx, seed);
        const auto& gen2 = chain.generations[1];
        std::vector<Expr> reference;
        for (const Constraint& c : gen2) {
            auto [a, b] = ctx.components(c.fiber);
            reference.push_back(total_derivative(ctx.einstein_density(a, b), c.direction));
        }
        for (int p = 0; p < options.points; ++p) {
            FloatEvaluator<BigFloat> ev(to_float_point(sampler.next(3).jet_at_origin(3)));
            for (std::size_t k = 0; k < gen2.size(); ++k) {
                auto [a, b] = ctx.components(gen2[k].fiber);
                t.relative(ev(gen2[k].expr), ev(reference[k]),
                           "D_" + std::to_string(gen2[k].direction) + " L^" + pair_label(a, b) + " at point " +
                               std::to_string(p));
            }
        }
        t.set_points(options.points);
        out.push_back(t.done());
    }
    {
        Tally t("generation-3 tangency equations contain F", "probabilistic", 0, 0);
        ZeroTestOptions zo;
        zo.policy = NormalizePolicy::NoExpand;
        std::size_t found = 0;
        for (const ResidualEquation& r : chain.residual_equations) {
            if (r.source_generation != 2) continue;
            ++found;
            t.require(r.expr.has_unknown() && !independent_of(r.expr, is_unknown, zo),
                      "X_" + std::to_string(r.direction) + " of generation-2 constraint " + std::to_string(r.parent));
        }
        std::size_t expected_count = chain.generations.size() >= 2 ? chain.generations[1].size() * static_cast<std::size_t>(d) : 0;
        t.require(found > 0 && found == expected_count, std::to_string(found) + " tangency equations from generation 2");
        out.push_back(t.done());
    }
    return out;
}

std::vector<IdentityResult> verify_calculus(const MetricContext& ctx, const HilbertPipeline& pipeline,
                                            const VerifyOptions& options) {
    const int d = ctx.dim();
    const int n = options.derivative_points;
    const Expr& L = pipeline.lagrangian.lagrangian;
    const CartanCoefficients& c = pipeline.coefficients;
    std::vector<IdentityResult> out;

    auto partial_check = [&](const std::string& name, std::uint64_t seed, const std::vector<Expr>& functions,
                             const std::vector<SymbolId>& coordinates) {
        Tally t(name, "finite-difference", seed, options.derivative_tolerance);
        MetricSampler sampler(ctx, seed);
        std::vector<std::vector<Expr>> derivatives;
        for (const Expr& e : functions) {
            derivatives.emplace_back();
            for (SymbolId s : coordinates) derivatives.back().push_back(diff(e, s));
        }
        for (int p = 0; p < n; ++p) {
            FloatPoint<BigFloat> point = to_float_point(sampler.next(2).jet_at_origin(2));
            FloatEvaluator<BigFloat> ev(point);
            for (std::size_t i = 0; i < functions.size(); ++i)
                for (std::size_t k = 0; k < coordinates.size(); ++k)
                    t.derivative(ev(derivatives[i][k]), partial_difference(functions[i], point, coordinates[k]),
                                 ev(functions[i]),
                                 "function " + std::to_string(i) + ", d/d" + symbol_name(coordinates[k]) +
                                     " at point " + std::to_string(p));
        }
        t.set_points(n);
        out.push_back(t.done());
    };

    partial_check("partial derivatives of the Hilbert Lagrangian", options.seed + 6, {L}, metric_coordinates(ctx, 0, 2));
    {
        std::vector<Expr> inverse;
        for (int r = 0; r < d; ++r)
            for (int s = r; s < d; ++s) inverse.push_back(ctx.inverse(r, s));
        partial_check("partial derivatives of g^{rs} by g_ab", options.seed + 7, inverse, metric_coordinates(ctx, 0, 0));
    }
    partial_check("partial derivatives of sqrt(w) by g_ab", options.seed + 8, {ctx.sqrt_w()}, metric_coordinates(ctx, 0, 0));

    // Total derivatives: (function, direction, symbolic derivative).
    struct TotalCase {
        Expr function;
        int direction;
        Expr derivative;
        std::string label;
    };
    auto total_check = [&](const std::string& name, std::uint64_t seed, const std::vector<TotalCase>& cases, int order) {
        Tally t(name, "finite-difference", seed, options.derivative_tolerance);
        MetricSampler sampler(ctx, seed);
        for (int p = 0; p < n; ++p) {
            MetricSection section = sampler.next(order + 1);
            FloatEvaluator<BigFloat> center(to_float_point(section.jet_at_origin(order + 1)));
            for (int i = 0; i < d; ++i) {
                SectionStencil st(section, d, i, order);
                for (const TotalCase& tc : cases) {
                    if (tc.direction != i) continue;
                    t.derivative(center(tc.derivative), st.derivative(tc.function), center(tc.function),
                                 tc.label + " at point " + std::to_string(p));
                }
            }
        }
        t.set_points(n);
        out.push_back(t.done());
    };
    {
        std::vector<TotalCase> cases;
        for (int s = 0; s < d; ++s)
            for (int mu = 0; mu < d; ++mu)
                for (int nu = mu; nu < d; ++nu)
                    for (int r = 0; r < d; ++r) {
                        const Expr& g = ctx.christoffel(s, mu, nu);
                        cases.push_back({g, r, total_derivative(g, r),
                                         "D_" + std::to_string(r) + " Gamma^" + std::to_string(s) + "_" + pair_label(mu, nu)});
                    }
        total_check("total derivatives of Christoffel symbols", options.seed + 9, cases, 1);
    }
    {
        std::vector<TotalCase> cases;
        for (int f = 0; f < ctx.fiber_count(); ++f) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const Expr& e = c.L2[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    cases.push_back({e, j, total_derivative(e, j),
                                     "D_" + std::to_string(j) + " L2[" + std::to_string(f) + "][" + std::to_string(i) + "]"});
                }
                const Expr& e = c.L1[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)];
                cases.push_back({e, i, total_derivative(e, i),
                                 "D_" + std::to_string(i) + " L1[" + std::to_string(f) + "]"});
            }
        }
        total_check("total derivatives of the Cartan coefficients", options.seed + 10, cases, 2);
    }
    {
        std::vector<TotalCase> cases;
        const auto& gens = pipeline.chain.generations;
        if (gens.size() >= 2) {
            for (const Constraint& k : gens[1])
                cases.push_back({gens[0][static_cast<std::size_t>(k.parent)].expr, k.direction, k.expr,
                                 "generation-2 constraint D_" + std::to_string(k.direction) + " of " +
                                     std::to_string(k.parent)});
        } else if (!gens.empty()) {
            for (const Constraint& k : gens[0])
                for (int r = 0; r < d; ++r)
                    cases.push_back({k.expr, r, total_derivative(k.expr, r),
                                     "D_" + std::to_string(r) + " of generation-1 constraint"});
        }
        total_check("total derivatives of generation-1 constraints", options.seed + 11, cases, 2);
    }
    return out;
}

std::vector<IdentityResult> verify_contracted_bianchi(const MetricContext& ctx, const VerifyOptions& options) {
    const int d = ctx.dim();
    const auto m = static_cast<std::size_t>(d);
    std::uint64_t seed = options.seed + 12;
    Tally t("contracted Bianchi identity nabla_a G^{ab} = 0", "finite-difference", seed, options.bianchi_tolerance);
    std::vector<Expr> G(m * m);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            G[static_cast<std::size_t>(a * d + b)] =
                ctx.raised_ricci(a, b) - Expr(Rational(1, 2)) * ctx.inverse(a, b) * ctx.scalar_curvature();
    MetricSampler sampler(ctx, seed);
    for (int p = 0; p < options.derivative_points; ++p) {
        MetricSection section = sampler.next(3);
        FloatEvaluator<BigFloat> center(to_float_point(section.jet_at_origin(2)));
        std::vector<BigFloat> divergence(m, BigFloat(0)), scale(m, BigFloat(0));
        for (int a = 0; a < d; ++a) {
            SectionStencil st(section, d, a, 2);
            for (int b = 0; b < d; ++b) {
                BigFloat v = st.derivative(G[static_cast<std::size_t>(a * d + b)]);
                divergence[static_cast<std::size_t>(b)] += v;
                scale[static_cast<std::size_t>(b)] += abs(v);
            }
        }
        for (int b = 0; b < d; ++b) {
            for (int a = 0; a < d; ++a) {
                for (int c = 0; c < d; ++c) {
                    BigFloat v = center(ctx.christoffel(a, a, c)) * center(G[static_cast<std::size_t>(c * d + b)]) +
                                 center(ctx.christoffel(b, a, c)) * center(G[static_cast<std::size_t>(a * d + c)]);
                    divergence[static_cast<std::size_t>(b)] += v;
                    scale[static_cast<std::size_t>(b)] += abs(v);
                }
            }
            BigFloat err = scale[static_cast<std::size_t>(b)] > BigFloat("1e-30")
                               ? abs(divergence[static_cast<std::size_t>(b)]) / scale[static_cast<std::size_t>(b)]
                               : BigFloat(0);
            t.absolute(err, "b = " + std::to_string(b) + " at point " + std::to_string(p));
        }
    }
    t.set_points(options.derivative_points);
    return {t.done()};
}

GravityReport gravity_verify(const MetricContext& ctx, const VerifyOptions& options, HilbertPipeline* pipeline_out) {
    GravityReport report;
    report.dim = ctx.dim();
    HilbertPipeline pipeline = run_hilbert_pipeline(ctx, options.max_generations);
    auto append = [&](std::vector<IdentityResult> rs) {
        for (auto& r : rs) report.results.push_back(std::move(r));
    };
    append(verify_metric_identities(ctx, options));
    append(verify_cartan_closed_forms(ctx, pipeline.coefficients, options));
    append(verify_hilbert_projectability(ctx, pipeline));
    append(einstein_constraints(ctx, pipeline, options));
    append(verify_calculus(ctx, pipeline, options));
    append(verify_contracted_bianchi(ctx, options));
    if (pipeline_out) *pipeline_out = std::move(pipeline);
    return report;
}

}  // namespace jetvar
