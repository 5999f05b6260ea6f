#include <gtest/gtest.h>

#include "jetvar/dsl.hpp"
#include "jetvar/errors.hpp"
#include "jetvar/text.hpp"

using namespace jetvar;

TEST(Dsl, MechanicsOneLiner) {
    LagrangianSpec s = parse_spec("lagrangian{kind:mechanics,n:1,k:2} L = q1_0 * q1_2");
    EXPECT_EQ(s.kind, LagrangianKind::Mechanics);
    EXPECT_EQ(s.base_dim, 1);
    EXPECT_EQ(s.fiber_dim, 1);
    EXPECT_EQ(s.order, 2);
    EXPECT_EQ(s.lagrangian, parse_expr("q1_0*q1_2"));
    EXPECT_EQ(s.source, "q1_0 * q1_2");
    EXPECT_EQ(effective_policy(s), NormalizePolicy::Expand);
}

TEST(Dsl, FieldWithCommentsAndNewlines) {
    LagrangianSpec s = parse_spec(
        "# mixed second derivative\n"
        "lagrangian {\n  kind: field\n  m: 2, n: 1\n  k: 2   # order\n}\n"
        "L = 1/2 * u1_[1,1]^2\n");
    EXPECT_EQ(s.kind, LagrangianKind::Field);
    EXPECT_EQ(s.base_dim, 2);
    EXPECT_EQ(s.lagrangian, parse_expr("1/2*u1_[1,1]^2"));
    FieldLagrangian lag = field_lagrangian(s);
    EXPECT_EQ(lag.base_dim, 2);
}

TEST(Dsl, TimeIsTheBaseCoordinate) {
    LagrangianSpec s = parse_spec("lagrangian { kind: mechanics, k: 1 }\nL = t*q1_1^2");
    EXPECT_EQ(s.lagrangian, parse_expr("x1*q1_1^2"));
}

TEST(Dsl, Hilbert) {
    LagrangianSpec s = parse_spec("lagrangian { kind: builtin:hilbert, d: 4 }");
    EXPECT_EQ(s.kind, LagrangianKind::Hilbert);
    EXPECT_EQ(s.base_dim, 4);
    EXPECT_EQ(s.fiber_dim, 10);
    EXPECT_EQ(effective_policy(s), NormalizePolicy::NoExpand);
    EXPECT_EQ(parse_spec("lagrangian { kind: builtin:hilbert }").base_dim, 4);
    EXPECT_THROW(parse_spec("lagrangian { kind: builtin:hilbert, d: 5 }"), SyntaxError);
    EXPECT_THROW(parse_spec("lagrangian { kind: builtin:hilbert } L = x1"), SyntaxError);
}

TEST(Dsl, Options) {
    LagrangianSpec s = parse_spec(
        "lagrangian { kind: field, m: 1, n: 2, max_generations: 3, points: 7, seed: 99, policy: no-expand }\n"
        "L = u1_[1]*u2_[1]");
    EXPECT_EQ(s.options.max_generations, 3);
    EXPECT_EQ(s.options.points, 7);
    EXPECT_EQ(s.options.seed, 99u);
    EXPECT_EQ(effective_policy(s), NormalizePolicy::NoExpand);
}

TEST(Dsl, SyntaxErrorsCarryPosition) {
    try {
        parse_spec("lagrangian { kind: field }\nL = u1_[2] + * 3");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 14);
    }
    try {
        parse_spec("lagrangian { kind: field,\n  colour: 2 }\nL = 1");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 3);
    }
    EXPECT_THROW(parse_spec("lagrangian { kind: ghost }\nL = 1"), SyntaxError);
    EXPECT_THROW(parse_spec("lagrangian { kind: field }\nM = 1"), SyntaxError);
    EXPECT_THROW(parse_spec("lagrangian { m: 1 }\nL = 1"), SyntaxError);
    EXPECT_THROW(parse_spec("lagrangian { kind: field, k: 3 }\nL = 1"), SyntaxError);
}

TEST(Dsl, CoordinateErrors) {
    try {
        parse_spec("lagrangian { kind: field, m: 2, n: 1, k: 2 }\nL = u1_[1,0]\n  + x3");
        FAIL();
    } catch (const UnknownCoordinate& e) {
        EXPECT_NE(std::string(e.what()).find("'x3' at line 3, column 5"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_spec("lagrangian { kind: field, m: 2 }\nL = u2_[1,0]"), UnknownCoordinate);
    EXPECT_THROW(parse_spec("lagrangian { kind: field, m: 2 }\nL = u1_[1]"), UnknownCoordinate);
    EXPECT_THROW(parse_spec("lagrangian { kind: field, m: 2, k: 1 }\nL = u1_[1,1]"), OrderViolation);
    EXPECT_THROW(parse_spec("lagrangian { kind: mechanics, k: 2 }\nL = q1_3"), OrderViolation);
    EXPECT_THROW(parse_spec("lagrangian { kind: field }\nL = t"), UnknownCoordinate);
}

TEST(Dsl, PrintParseRoundTrip) {
    const char* inputs[] = {
        "lagrangian{kind:mechanics,n:1,k:2} L = q1_0 * q1_2",
        "lagrangian { kind: field, m: 2 }\nL = 1/2 * u1_[1,1]^2 - x1*u1_[0,1]",
        "lagrangian { kind: field, m: 1, n: 2, points: 5, policy: expand }\nL = (u1_[1] + u2_[1])^2 / 3",
        "lagrangian { kind: mechanics, n: 2, k: 3, seed: 12 }\nL = q1_3*q2_1 + sqrt(1 + q1_1^2)",
        "lagrangian { kind: builtin:hilbert, d: 3, max_generations: 4 }",
    };
    for (const char* text : inputs) {
        LagrangianSpec s = parse_spec(text);
        std::string printed = print_spec(s);
        EXPECT_EQ(parse_spec(printed), s) << printed;
        EXPECT_EQ(print_spec(parse_spec(printed)), printed);
    }
}

TEST(Dsl, MechanicsReadsAsField) {
    LagrangianSpec s = parse_spec("lagrangian { kind: mechanics, k: 2 }\nL = q1_0*q1_2");
    FieldLagrangian f = field_lagrangian(s);
    EXPECT_EQ(f.base_dim, 1);
    EXPECT_EQ(f.lagrangian, parse_expr("u1_[0]*u1_[2]"));
    EXPECT_EQ(mech_lagrangian(s).order, 2);
    EXPECT_THROW(mech_lagrangian(parse_spec("lagrangian { kind: field }\nL = u1_[1]")), std::invalid_argument);
}
