#include <gtest/gtest.h>

#include <random>

#include "jetvar/errors.hpp"
#include "jetvar/evaluate.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/normal_form.hpp"
#include "jetvar/text.hpp"
#include "jetvar/zero_test.hpp"

using namespace jetvar;

namespace {

Expr sym(const std::string& name) { return Expr(symbol_from_name(name)); }
Expr P(const std::string& text) { return parse_expr(text); }

}  // namespace

TEST(Normalize, CollectsLikeTerms) {
    Expr x = sym("x");
    EXPECT_EQ(x + x, 2 * x);
    EXPECT_EQ(to_string(x + x), "2*x");
}

TEST(Normalize, Commutativity) {
    Expr u = sym("u"), v = sym("v");
    EXPECT_TRUE((u * v - v * u).is_zero_constant());
}

TEST(Normalize, BinomialIdentity) {
    Expr a = sym("a"), b = sym("b");
    Expr e = pow(a + b, 2) - pow(a, 2) - 2 * a * b - pow(b, 2);
    EXPECT_FALSE(e.is_zero_constant());
    EXPECT_EQ(normalize(e), Expr(0));
    EXPECT_EQ(normalize(e, NormalizePolicy::NoExpand), e);
}

TEST(Normalize, Idempotent) {
    Expr e = P("(a+b)^3/(a-b) + (a^2 - b^2)/(a+b)^2*w^(1/2) - 1/(a*w^(1/2))");
    Expr n = normalize(e);
    EXPECT_EQ(normalize(n), n);
}

TEST(Normalize, CancelsCommonFactors) {
    EXPECT_EQ(normalize(P("(a^2 - b^2)/(a - b)")), P("a + b"));
    EXPECT_EQ(normalize(P("1/(x-1) - 1/(x+1) - 2/(x^2-1)")), Expr(0));
    EXPECT_EQ(normalize(P("x/x")), Expr(1));
}

TEST(Normalize, RadicalsSquareOut) {
    EXPECT_EQ(normalize(P("(w+1)^(1/2)*(w+1)^(1/2) - w")), Expr(1));
    EXPECT_EQ(normalize(P("(a*b)^(1/2)*(a*b)^(-1/2)")), Expr(1));
    EXPECT_EQ(normalize(P("1/(1 + w^(1/2)) - (1 - w^(1/2))/(1 - w)")), Expr(0));
}

TEST(Normalize, HomomorphismProperty) {
    std::mt19937_64 rng(7);
    std::vector<std::string> atoms = {"a", "b", "c", "(a+b)", "(b-c)", "c^(1/2)"};
    auto random_expr = [&](int depth, auto&& self) -> Expr {
        if (depth == 0) return P(atoms[rng() % atoms.size()]);
        Expr l = self(depth - 1, self), r = self(depth - 1, self);
        switch (rng() % 3) {
            case 0:
                return l + r;
            case 1:
                return l * r;
            default:
                return l - Rational(Rational(static_cast<long>(rng() % 5) + 1) / 3) * r;
        }
    };
    for (int i = 0; i < 30; ++i) {
        Expr a = random_expr(3, random_expr), b = random_expr(3, random_expr);
        EXPECT_EQ(normalize(a + b), normalize(normalize(a) + normalize(b)));
        EXPECT_EQ(normalize(a * b), normalize(normalize(a) * normalize(b)));
        EXPECT_TRUE(is_zero(a - a));
    }
}

TEST(Diff, Basics) {
    Expr s = sym("s"), t = sym("t"), w = sym("w");
    EXPECT_EQ(diff(pow(s, 2), s.symbol()), 2 * s);
    EXPECT_EQ(diff(t, s.symbol()), Expr(0));
    EXPECT_EQ(diff(sqrt(w), w.symbol()), Rational(1, 2) * pow(w, HalfInt::from_twice(-1)));
}

TEST(Diff, ChainRuleThroughRadical) {
    Expr e = P("(x^2 + y)^(1/2)");
    Expr d = diff(e, symbol_from_name("x"));
    EXPECT_TRUE(is_zero(d - P("x*(x^2+y)^(-1/2)")));
}

TEST(Diff, AgreesWithFiniteDifferences) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(50, 150);
    std::vector<Expr> cases = {P("x^3*y - 2/(x+y) + (x^2+y^2+1)^(1/2)"), P("x*y^(-2) + (1+x*y)^(3/2)"),
                               P("(x - y)^4/(1 + x^2)")};
    SymbolId x = symbol_from_name("x"), y = symbol_from_name("y");
    for (const Expr& e : cases) {
        for (SymbolId v : {x, y}) {
            Expr d = diff(e, v);
            for (int i = 0; i < 10; ++i) {
                FloatPoint<long double> p{{x, num(rng) / 100.0L}, {y, num(rng) / 100.0L}};
                long double h = 1e-5L;
                auto q = p;
                q[v] += h;
                auto r = p;
                r[v] -= h;
                long double fd = (eval_float(e, q) - eval_float(e, r)) / (2 * h);
                long double an = eval_float(d, p);
                long double scale = std::max({std::fabs(fd), std::fabs(an), 1.0L});
                EXPECT_LE(std::fabs(fd - an), 1e-6L * scale);
            }
        }
    }
}

TEST(Substitute, Examples) {
    SymbolId s = symbol_from_name("s"), t = symbol_from_name("t"), w = symbol_from_name("w");
    EXPECT_EQ(substitute(P("s+t"), {{s, Expr(1)}, {t, Expr(2)}}), Expr(3));
    EXPECT_EQ(substitute(P("s^2"), {{s, P("s+1")}}), P("s^2 + 2*s + 1"));
    EXPECT_EQ(substitute(P("w^(1/2)"), {{w, Expr(4)}}), Expr(2));
}

TEST(Substitute, IsSimultaneous) {
    SymbolId s = symbol_from_name("s"), t = symbol_from_name("t");
    EXPECT_THROW(substitute(P("s*t"), {{s, P("t")}, {t, P("s")}}), CyclicBinding);
    SymbolId a = symbol_from_name("a");
    EXPECT_EQ(substitute(P("s*t"), {{s, P("t")}, {t, P("a")}}), P("t*a"));
    (void)a;
}

TEST(Substitute, RejectsLongerCycles) {
    SymbolId a = symbol_from_name("a"), b = symbol_from_name("b"), c = symbol_from_name("c");
    EXPECT_THROW(substitute(P("a"), {{a, P("b+1")}, {b, P("c")}, {c, P("2*a")}}), CyclicBinding);
}

TEST(Evaluate, ExactRationals) {
    SymbolId s = symbol_from_name("s"), t = symbol_from_name("t");
    auto v = eval_numeric(P("(s+t)/2"), {{s, 1}, {t, 3}});
    ASSERT_TRUE(v.exact);
    EXPECT_EQ(v.rational, 2);
    auto u = eval_numeric(P("s*t"), {{s, Rational(2, 3)}, {t, Rational(3, 2)}});
    ASSERT_TRUE(u.exact);
    EXPECT_EQ(u.rational, 1);
}

TEST(Evaluate, Errors) {
    SymbolId w = symbol_from_name("w");
    EXPECT_THROW(eval_numeric(P("w^(1/2)"), {{w, -1}}), NegativeRadicand);
    EXPECT_THROW(eval_numeric(P("w + v"), {{w, 1}}), UnboundSymbol);
    EXPECT_THROW(eval_numeric(P("1/w"), {{w, 0}}), DivisionByZero);
}

TEST(Evaluate, RadicalForm) {
    SymbolId w = symbol_from_name("w");
    auto v = eval_numeric(P("1 + w^(1/2) + w^(-1/2)"), {{w, 2}});
    ASSERT_TRUE(v.radical_form);
    EXPECT_EQ(v.a, 1);
    EXPECT_EQ(v.b, Rational(3, 2));
    EXPECT_NEAR(v.to_double(), 1 + 1.5 * std::sqrt(2.0), 1e-12);
    auto sq = eval_numeric(P("w^(1/2)*w^(1/2)"), {{w, 2}});
    EXPECT_TRUE(sq.exact);
}

TEST(Evaluate, MixedRadicandsFallBackToFloat) {
    SymbolId a = symbol_from_name("a"), b = symbol_from_name("b");
    auto v = eval_numeric(P("a^(1/2) + b^(1/2)"), {{a, 2}, {b, 3}});
    EXPECT_FALSE(v.exact);
    EXPECT_FALSE(v.radical_form);
    EXPECT_NEAR(v.to_double(), std::sqrt(2.0) + std::sqrt(3.0), 1e-12);
}

TEST(ZeroTest, Paths) {
    EXPECT_TRUE(is_zero(Expr(0)));
    EXPECT_TRUE(is_zero(P("s - s")));
    EXPECT_FALSE(is_zero(P("s")));
    Expr e = P("(a+b)^2 - a^2 - 2*a*b - b^2");
    ZeroTestOptions o;
    o.policy = NormalizePolicy::NoExpand;
    auto r = zero_test(e, o);
    EXPECT_TRUE(r.zero);
    EXPECT_EQ(r.path, "probabilistic");
    EXPECT_GE(r.points, 8);
    auto nz = zero_test(e + P("a*b*10^(-12)"), o);
    EXPECT_FALSE(nz.zero);
    EXPECT_EQ(zero_test(e).path, "expanded");
    EXPECT_EQ(zero_test(Expr(0), o).path, "structural");
}

TEST(ZeroTest, IndependenceAndRank) {
    Expr e = P("(a+b)^2 - a^2 - 2*a*b + c");
    auto is_b = [](SymbolId s) { return symbol_name(s) == "b"; };
    auto is_a = [](SymbolId s) { return symbol_name(s) == "a"; };
    for (auto policy : {NormalizePolicy::Expand, NormalizePolicy::NoExpand}) {
        ZeroTestOptions o;
        o.policy = policy;
        EXPECT_FALSE(independent_of(e, is_b, o));
        EXPECT_TRUE(independent_of(e - P("b^2"), is_b, o));
        EXPECT_TRUE(independent_of(e, is_a, o));
        std::vector<Expr> items = {P("a"), P("2*a"), P("a + b"), P("(a+b)^2 - a^2"), P("b"), P("a*b")};
        auto kept = independent_subset(items, policy);
        EXPECT_EQ(kept, (std::vector<std::size_t>{0, 2, 3, 5}));
    }
}

TEST(Text, RoundTrip) {
    for (std::string src : {"2*q1_2", "-1/2*q1_2^2 + q1_0*q1_1", "u1_[1,0]*x1^(-1) + (1 + u1_[0,0]^2)^(1/2)",
                            "F1_[3,0]_2 - u1_[4,0]", "F1_3 - q1_4", "(a + b)^(-3/2)*c"}) {
        Expr e = P(src);
        EXPECT_EQ(P(to_string(e)), e) << src;
        EXPECT_EQ(to_string(P(to_string(e))), to_string(e));
    }
    EXPECT_EQ(to_string(P("x - 1")), "x - 1");
    EXPECT_EQ(to_string(P("1/2*q1_2^2")), "1/2*q1_2^2");
}

TEST(Text, CanonicalNames) {
    EXPECT_EQ(symbol_from_name("x2")->kind, SymbolKind::Base);
    EXPECT_EQ(symbol_from_name("x2")->direction, 1);
    const Symbol& u = symbol_from_name("u2_[1,0,3]").get();
    EXPECT_EQ(u.kind, SymbolKind::Fiber);
    EXPECT_EQ(u.fiber, 1);
    EXPECT_EQ(u.index, (MultiIndex{1, 0, 3}));
    EXPECT_EQ(symbol_from_name("q1_4")->index, MultiIndex{4});
    const Symbol& f = symbol_from_name("F1_[2,1]_2").get();
    EXPECT_EQ(f.kind, SymbolKind::Unknown);
    EXPECT_EQ(f.direction, 1);
    EXPECT_EQ(symbol_from_name("alpha")->kind, SymbolKind::Auxiliary);
}

TEST(Text, SyntaxErrorsCarryPosition) {
    try {
        P("a +\n  * b");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 3);
    }
    EXPECT_THROW(P("a^b"), SyntaxError);
    EXPECT_THROW(P("a^(1/3)"), SyntaxError);
    EXPECT_THROW(P("(a + b"), SyntaxError);
    EXPECT_THROW(P("a / 0"), SyntaxError);
}

TEST(Structure, DeterministicOrdering) {
    Expr a = P("z*y + y*x + 3*x^2 - w");
    Expr b = P("-w + 3*x^2 + x*y + y*z");
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_string(normalize(a)), to_string(normalize(b)));
    EXPECT_EQ(to_string(a), "-w + x*y + 3*x^2 + y*z");
}

TEST(Structure, RejectsUnsupportedExponents) {
    EXPECT_THROW(pow(P("a"), Rational(1, 3)), UnsupportedExponent);
    EXPECT_THROW(P("1/a") * Expr(0) + pow(Expr(0), HalfInt(-1)), DivisionByZero);
}
