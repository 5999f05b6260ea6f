#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "jetvar/expr.hpp"
#include "jetvar/mechanics.hpp"
#include "jetvar/variational.hpp"

namespace jetvar {

enum class LagrangianKind { Field, Mechanics, Hilbert };

std::string to_string(LagrangianKind kind);

struct SpecOptions {
    std::optional<int> max_generations;
    std::optional<int> points;
    std::optional<std::uint64_t> seed;
    std::optional<NormalizePolicy> policy;

    bool operator==(const SpecOptions&) const = default;
};

/// A parsed Lagrangian description:
///
///     lagrangian { kind: field, m: 2, n: 1, k: 2 }   # header
///     L = 1/2 * u1_[1,1]^2
///
/// kind is field, mechanics or builtin:hilbert (with d: instead of m/n/k and
/// no L line). Optional header keys: max_generations, points, seed, policy
/// (expand | no-expand). Mechanics accepts t for x1.
struct LagrangianSpec {
    LagrangianKind kind = LagrangianKind::Field;
    /// m; 1 for mechanics, d for the Hilbert Lagrangian.
    int base_dim = 1;
    int fiber_dim = 1;
    int order = 2;
    Expr lagrangian;
    /// The expression as written; not part of equality.
    std::string source;
    SpecOptions options;

    bool operator==(const LagrangianSpec& other) const;
};

/// Throws SyntaxError (with line and column), UnknownCoordinate and
/// OrderViolation; the latter two name the position in their message.
LagrangianSpec parse_spec(std::string_view text);

/// Canonical text; parse_spec(print_spec(s)) == s.
std::string print_spec(const LagrangianSpec& spec);

NormalizePolicy effective_policy(const LagrangianSpec& spec);
FieldLagrangian field_lagrangian(const LagrangianSpec& spec);
MechLagrangian mech_lagrangian(const LagrangianSpec& spec);

}  // namespace jetvar
