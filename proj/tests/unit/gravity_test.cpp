#include <gtest/gtest.h>

#include "jetvar/errors.hpp"
#include "jetvar/gravity.hpp"
#include "jetvar/gravity_verify.hpp"
#include "jetvar/text.hpp"
#include "jetvar/zero_test.hpp"

using namespace jetvar;

namespace {

Rational exact(const Expr& e, const Point& p) {
    NumericValue v = ExactEvaluator(p)(e);
    EXPECT_TRUE(v.exact) << to_string(e);
    return v.rational;
}

void expect_all_passed(const GravityReport& report) {
    for (const IdentityResult& r : report.results)
        EXPECT_TRUE(r.passed) << r.identity << ": " << r.detail << " (max error " << r.max_error << ")";
}

}  // namespace

TEST(Metric, SymmetricAccess) {
    MetricContext ctx(4);
    EXPECT_EQ(ctx.fiber_count(), 10);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            EXPECT_EQ(ctx.fiber(a, b), ctx.fiber(b, a));
            EXPECT_EQ(ctx.g(a, b), ctx.g(b, a));
            auto [p, q] = ctx.components(ctx.fiber(a, b));
            EXPECT_EQ(p, std::min(a, b));
            EXPECT_EQ(q, std::max(a, b));
        }
    EXPECT_EQ(ctx.fiber(0, 0), 0);
    EXPECT_EQ(ctx.fiber(1, 1), 4);
    EXPECT_EQ(ctx.fiber(3, 3), 9);
    EXPECT_EQ(symbol_name(ctx.g_symbol(1, 2, MultiIndex{0, 1, 0, 1})), "u6_[0,1,0,1]");
}

TEST(Metric, MinkowskiIsFlat) {
    MetricContext ctx(3);
    Point flat = flat_point(ctx, 2);
    EXPECT_EQ(exact(ctx.w(), flat), 1);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            EXPECT_EQ(exact(ctx.inverse(a, b), flat), a != b ? 0 : (a == 0 ? -1 : 1));
            EXPECT_EQ(exact(ctx.ricci(a, b), flat), 0);
            for (int r = 0; r < 3; ++r) EXPECT_EQ(exact(ctx.christoffel(r, a, b), flat), 0);
        }
    EXPECT_EQ(exact(ctx.scalar_curvature(), flat), 0);
}

TEST(Metric, DiagonalInverseAndChristoffel) {
    // g = diag(-1, f) with f = 5/3 and d_2 f = 7/4 at the point.
    MetricContext ctx(2);
    Point p = flat_point(ctx, 1);
    p[symbol_from_name("u3_[0,0]")] = Rational(5) / 3;
    p[symbol_from_name("u3_[0,1]")] = Rational(7) / 4;
    EXPECT_EQ(exact(ctx.inverse(1, 1), p), Rational(3) / 5);
    EXPECT_EQ(exact(ctx.inverse(0, 0), p), -1);
    EXPECT_EQ(exact(ctx.inverse(0, 1), p), 0);
    EXPECT_EQ(exact(ctx.w(), p), Rational(5) / 3);
    EXPECT_EQ(exact(ctx.christoffel(1, 1, 1), p), (Rational(7) / 4) / (2 * (Rational(5) / 3)));
    EXPECT_EQ(exact(ctx.christoffel(0, 1, 1), p), 0);
    EXPECT_EQ(exact(ctx.christoffel(1, 0, 1), p), 0);
}

TEST(Metric, RicciSymmetricOnRandomSections) {
    MetricContext ctx(3);
    MetricSampler sampler(ctx, 77);
    for (int i = 0; i < 3; ++i) {
        Point p = sampler.next(2).jet_at_origin(2);
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) EXPECT_EQ(exact(ctx.ricci(a, b), p), exact(ctx.ricci(b, a), p));
    }
}

TEST(Metric, SamplerIsSeeded) {
    MetricContext ctx(3);
    MetricSampler a(ctx, 5), b(ctx, 5), c(ctx, 6);
    Point pa = a.next(2).jet_at_origin(2), pb = b.next(2).jet_at_origin(2), pc = c.next(2).jet_at_origin(2);
    EXPECT_EQ(pa, pb);
    EXPECT_NE(pa, pc);
    EXPECT_GT(exact(ctx.w(), pa), 0);
}

TEST(Hilbert, TwoDimensionalVerification) {
    MetricContext ctx(2);
    HilbertPipeline pipeline;
    GravityReport report = gravity_verify(ctx, VerifyOptions{}, &pipeline);
    expect_all_passed(report);
    EXPECT_NO_THROW(report.require());
    ASSERT_FALSE(pipeline.chain.generations.empty());
    for (const Constraint& c : pipeline.chain.generations[0]) EXPECT_TRUE(c.identically_zero);
}

TEST(Hilbert, ThreeDimensionalVerification) {
    MetricContext ctx(3);
    HilbertPipeline pipeline;
    GravityReport report = gravity_verify(ctx, VerifyOptions{}, &pipeline);
    expect_all_passed(report);
    EXPECT_TRUE(report.passed());

    const CartanCoefficients& c = pipeline.coefficients;
    EXPECT_TRUE(is_zero(c.L2[ctx.fiber(0, 0)][0][0], NormalizePolicy::NoExpand));
    EXPECT_FALSE(is_zero(c.L2[ctx.fiber(0, 1)][0][1], NormalizePolicy::NoExpand));
    EXPECT_EQ(projectability_level(pipeline.lagrangian, c), 1);
    EXPECT_EQ(pipeline.chain.status, ChainStatus::TerminatedWithResidual);
    ASSERT_GE(pipeline.chain.generations.size(), 2u);
    EXPECT_EQ(pipeline.chain.generations[0].size(), 6u);
}

TEST(Hilbert, FailedReportThrows) {
    GravityReport report;
    report.results.push_back(IdentityResult{"made-up identity", false, "numeric", 1, 1, 0, 1.0, "x"});
    EXPECT_FALSE(report.passed());
    EXPECT_THROW(report.require(), VerificationFailed);
}
