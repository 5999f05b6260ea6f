#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jetvar/constraints.hpp"
#include "jetvar/evaluate.hpp"
#include "jetvar/gravity.hpp"
#include "jetvar/variational.hpp"

namespace jetvar {

/// Polynomial section g_ab(x) = sum_J c_J x^J / J! of the metric bundle.
/// Its jets at rational x are exact, which makes finite differences along
/// the section well defined at any order.
class MetricSection {
public:
    MetricSection(const MetricContext& ctx, int degree, std::vector<std::vector<std::pair<MultiIndex, Rational>>> taylor);

    int degree() const noexcept { return degree_; }
    /// Values of x^i and of every g_ab jet coordinate up to `order` at x.
    Point jet(const std::vector<Rational>& x, int order) const;
    Point jet_at_origin(int order) const;

private:
    const MetricContext* ctx_;
    int degree_;
    std::vector<std::vector<std::pair<MultiIndex, Rational>>> taylor_;  // per fiber
};

/// Seeded random Lorentzian sections: g(0) = diag(-1, 1, ..., 1) plus small
/// rationals, higher Taylor coefficients small rationals. Sections with
/// w(0) <= 0 or |det g(0)| < 1e-3 are rejected.
class MetricSampler {
public:
    MetricSampler(const MetricContext& ctx, std::uint64_t seed);
    MetricSection next(int degree);

private:
    const MetricContext* ctx_;
    std::mt19937_64 rng_;
};

/// Every jet coordinate of order <= `order` set to the Minkowski values.
Point flat_point(const MetricContext& ctx, int order);

FloatPoint<BigFloat> to_float_point(const Point& point);

struct VerifyOptions {
    int points = 20;
    /// Points per derivative in the finite-difference checks.
    int derivative_points = 10;
    std::uint64_t seed = 0x6a65747661720001ULL;
    /// Symbolic closed-form comparison up to this dimension, numeric above.
    int exact_max_dim = 3;
    int max_generations = 6;
    double tolerance = 1e-9;
    double derivative_tolerance = 1e-6;
    double bianchi_tolerance = 1e-7;
};

struct IdentityResult {
    std::string identity;
    bool passed = true;
    /// "symbolic", "exact-at-points", "numeric", "finite-difference", "probabilistic" or "structural".
    std::string method;
    int checks = 0;
    int points = 0;
    std::uint64_t seed = 0;
    double max_error = 0;
    /// First failure, with indices and point.
    std::string detail;
};

/// The Hilbert Lagrangian pushed through the variational pipeline once.
struct HilbertPipeline {
    FieldLagrangian lagrangian;
    CartanCoefficients coefficients;
    ConstraintChain chain;
};

HilbertPipeline run_hilbert_pipeline(const MetricContext& ctx, int max_generations = 6);

struct GravityReport {
    int dim = 0;
    std::vector<IdentityResult> results;

    bool passed() const;
    /// Throws VerificationFailed naming every failed identity.
    void require() const;
};

/// Symmetric access, g^{mn} g_{nr} = delta, Ricci symmetry, the sqrt(w)
/// derivative identity.
std::vector<IdentityResult> verify_metric_identities(const MetricContext& ctx, const VerifyOptions& options);

/// Computed L^{ab,m}, L^{ab,mn} against the closed forms, plus their orders.
std::vector<IdentityResult> verify_cartan_closed_forms(const MetricContext& ctx, const CartanCoefficients& coeffs,
                                                       const VerifyOptions& options);

/// Projectability level 1 and basicness of the Poincare-Cartan form.
std::vector<IdentityResult> verify_hilbert_projectability(const MetricContext& ctx, const HilbertPipeline& pipeline);

/// Generation 1 against the Einstein density, generation 2 against its
/// total derivatives, F in the generation-3 tangency equations. For d = 2
/// generation 1 must vanish instead.
std::vector<IdentityResult> einstein_constraints(const MetricContext& ctx, const HilbertPipeline& pipeline,
                                                 const VerifyOptions& options);

/// Every partial and total derivative of the pipeline against central finite
/// differences (five-point stencil, step 1e-5).
std::vector<IdentityResult> verify_calculus(const MetricContext& ctx, const HilbertPipeline& pipeline,
                                            const VerifyOptions& options);

/// nabla_a G^{ab} = 0 with the divergence taken by finite differences along
/// random sections.
std::vector<IdentityResult> verify_contracted_bianchi(const MetricContext& ctx, const VerifyOptions& options);

/// All of the above.
GravityReport gravity_verify(const MetricContext& ctx, const VerifyOptions& options,
                             HilbertPipeline* pipeline_out = nullptr);

}  // namespace jetvar
