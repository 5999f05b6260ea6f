#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jetvar/expr.hpp"
#include "jetvar/jet_space.hpp"
#include "jetvar/normal_form.hpp"

namespace jetvar {

/// Sorted list of coordinates whose differentials are wedged together.
using FormKey = std::vector<SymbolId>;

struct FormKeyLess {
    bool operator()(const FormKey& a, const FormKey& b) const;
};

/// A differential form on a jet space, stored sparsely as coefficient times
/// sorted wedge of coordinate differentials. Under Expand every coefficient
/// is kept in normal form and zero coefficients are removed; under NoExpand
/// only structurally zero coefficients are removed.
class JetForm {
public:
    JetForm(JetSpace space, int degree, NormalizePolicy policy = NormalizePolicy::Expand);

    /// f as a 0-form.
    static JetForm function(const JetSpace& space, const Expr& f,
                            NormalizePolicy policy = NormalizePolicy::Expand);
    /// coeff * d(s_1) ^ ... ^ d(s_p) in the given (unsorted) order.
    static JetForm monomial(const JetSpace& space, const std::vector<SymbolId>& differentials, const Expr& coeff,
                            NormalizePolicy policy = NormalizePolicy::Expand);
    /// d^m x = dx^1 ^ ... ^ dx^m.
    static JetForm volume(const JetSpace& space, NormalizePolicy policy = NormalizePolicy::Expand);

    const JetSpace& space() const noexcept { return space_; }
    int degree() const noexcept { return degree_; }
    NormalizePolicy policy() const noexcept { return policy_; }
    const std::map<FormKey, Expr, FormKeyLess>& terms() const noexcept { return terms_; }

    /// Coefficient of the wedge of the given differentials (any order; sign applied).
    Expr coefficient(const std::vector<SymbolId>& differentials) const;

    /// Adds coeff * d(s_1) ^ ... ^ d(s_p); sorts the key and absorbs the sign.
    void add(std::vector<SymbolId> differentials, const Expr& coeff);

    bool empty() const noexcept { return terms_.empty(); }

    JetForm operator+(const JetForm& o) const;
    JetForm operator-(const JetForm& o) const;
    JetForm scaled(const Expr& f) const;

    /// Deterministic text: "coeff*dA^dB + ..." with keys in symbol order.
    std::string to_string() const;

private:
    Expr clean(const Expr& e) const;

    JetSpace space_;
    int degree_;
    NormalizePolicy policy_;
    std::map<FormKey, Expr, FormKeyLess> terms_;
};

/// Number of coordinates of the ambient jet space (upper bound for degrees).
int ambient_dimension(const JetSpace& space);

/// Throws DegreeOverflow when deg a + deg b exceeds the ambient dimension.
JetForm wedge(const JetForm& a, const JetForm& b);

JetForm exterior_derivative(const JetForm& a);

/// Sum of c_s * d/ds over coordinates s.
struct VectorField {
    std::vector<std::pair<SymbolId, Expr>> components;
    static VectorField coordinate(SymbolId s) { return {{{s, Expr(1)}}}; }
};

JetForm interior_product(const VectorField& v, const JetForm& a);

/// Cartan formula: L(v) a = i(v) d a + d i(v) a.
JetForm lie_derivative(const VectorField& v, const JetForm& a);

/// True when i(d/du^b_J) a == 0 for every fiber coordinate with |J| > s.
bool is_semibasic(const JetForm& a, int s);

/// is_semibasic(a, s) and is_semibasic(d a, s).
bool is_basic(const JetForm& a, int s);

/// a - b vanishes (zero test per coefficient, using a's policy).
bool forms_equal(const JetForm& a, const JetForm& b);

}  // namespace jetvar
