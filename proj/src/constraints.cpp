#include "jetvar/constraints.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "jetvar/evaluate.hpp"
#include "jetvar/jet_space.hpp"
#include "jetvar/text.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

std::string to_string(ChainStatus status) {
    switch (status) {
        case ChainStatus::TerminatedIdentically:
            return "terminated-identically";
        case ChainStatus::TerminatedWithResidual:
            return "terminated-with-residual";
        case ChainStatus::MaxIterations:
            return "max-iterations";
    }
    return "unknown";
}

std::string Constraint::derivation() const {
    if (generation == 1) return "EL";
    return "D_" + std::to_string(direction + 1) + " of parent";
}

int ConstraintChain::effective_generations() const {
    int count = 0;
    for (const auto& gen : generations)
        if (std::any_of(gen.begin(), gen.end(), [](const Constraint& c) { return !c.identically_zero; })) ++count;
    return count;
}

std::vector<SymbolId> unknowns_in(const std::vector<Expr>& exprs) {
    std::vector<SymbolId> out;
    for (const Expr& e : exprs) {
        if (!e.has_unknown()) continue;
        for (SymbolId s : free_symbols(e))
            if (s->kind == SymbolKind::Unknown) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](SymbolId a, SymbolId b) { return symbol_less(a, b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

bool is_unknown(SymbolId s) { return s->kind == SymbolKind::Unknown; }

int rank_modp(std::vector<std::vector<std::uint64_t>> rows) {
    int rank = 0;
    std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
        std::size_t pivot = static_cast<std::size_t>(rank);
        while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[pivot], rows[static_cast<std::size_t>(rank)]);
        auto& p = rows[static_cast<std::size_t>(rank)];
        std::uint64_t inv = modp::inverse(p[c]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<std::size_t>(rank) || rows[r][c] == 0) continue;
            std::uint64_t f = modp::mul(rows[r][c], inv);
            for (std::size_t k = c; k < cols; ++k) rows[r][k] = modp::sub(rows[r][k], modp::mul(f, p[k]));
        }
        ++rank;
    }
    return rank;
}

/// Solves A F + b = 0 by Gaussian elimination over normal forms.
std::optional<std::vector<Expr>> solve_linear(std::vector<std::vector<Expr>> a, std::vector<Expr> b) {
    std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        while (pivot < n && a[pivot][c].is_zero_constant()) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[c]);
        std::swap(b[pivot], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero_constant()) continue;
            Expr f = normalize(a[r][c] / a[c][c]);
            for (std::size_t k = c; k < n; ++k) a[r][k] = normalize(a[r][k] - f * a[c][k]);
            b[r] = normalize(b[r] - f * b[c]);
        }
    }
    std::vector<Expr> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = normalize(-b[i] / a[i][i]);
    return x;
}

void analyse_unknowns(ConstraintChain& chain, NormalizePolicy policy) {
    std::vector<Expr> eqs;
    for (const auto& r : chain.residual_equations) eqs.push_back(r.expr);
    std::vector<SymbolId> unknowns = unknowns_in(eqs);
    if (unknowns.empty() || eqs.size() < unknowns.size() || unknowns.size() > 64) return;

    std::vector<Expr> jacobian;
    for (const Expr& e : eqs)
        for (SymbolId f : unknowns) jacobian.push_back(diff(e, f));
    auto samples = sample_values(jacobian, 1, 0x510e527fade682d1ULL);
    if (samples.empty()) return;
    std::vector<std::vector<std::uint64_t>> rows(eqs.size(), std::vector<std::uint64_t>(unknowns.size()));
    for (std::size_t r = 0; r < eqs.size(); ++r)
        for (std::size_t c = 0; c < unknowns.size(); ++c) rows[r][c] = samples[0][r * unknowns.size() + c];
    chain.determines_unknowns = rank_modp(rows) == static_cast<int>(unknowns.size());

    if (!chain.determines_unknowns || policy != NormalizePolicy::Expand || eqs.size() != unknowns.size() ||
        unknowns.size() > 4)
        return;
    std::unordered_map<SymbolId, Expr> zero;
    for (SymbolId f : unknowns) zero.emplace(f, Expr(0));
    std::vector<std::vector<Expr>> a(eqs.size());
    std::vector<Expr> b;
    for (std::size_t r = 0; r < eqs.size(); ++r) {
        for (std::size_t c = 0; c < unknowns.size(); ++c) a[r].push_back(normalize(jacobian[r * unknowns.size() + c]));
        b.push_back(substitute(eqs[r], zero));
    }
    if (auto x = solve_linear(std::move(a), std::move(b)))
        for (std::size_t i = 0; i < unknowns.size(); ++i) chain.solved_unknowns.emplace_back(unknowns[i], (*x)[i]);
}

}  // namespace

ConstraintChain run_constraint_algorithm(const ChainInput& input) {
    if (input.max_generations < 1) throw std::invalid_argument("max_generations must be at least 1");
    if (input.residuals.size() != input.holonomic.size())
        throw std::invalid_argument("residual and holonomic lists differ in length");

    const NormalizePolicy policy = input.policy;
    const int top = input.top_order;
    ZeroTestOptions zo;
    zo.policy = policy;
    auto clean = [&](const Expr& e) { return policy == NormalizePolicy::Expand ? normalize(e) : e; };
    auto f_free = [&](const Expr& e) { return !e.has_unknown() || independent_of(e, is_unknown, zo); };

    ConstraintChain chain;
    chain.top_order = top;

    // Generation 1 from the Euler-Lagrange residuals.
    std::vector<Constraint> first;
    std::vector<Expr> nonzero;
    std::vector<std::size_t> nonzero_pos;
    for (std::size_t a = 0; a < input.residuals.size(); ++a) {
        Expr r = clean(input.residuals[a]);
        if (!f_free(r)) {
            chain.residual_equations.push_back({r, 0, -1, -1, static_cast<int>(a)});
            continue;
        }
        Constraint c;
        c.expr = clean(input.holonomic[a]);
        c.fiber = static_cast<int>(a);
        c.identically_zero = zero_test(c.expr, zo).zero;
        if (!c.identically_zero) {
            nonzero.push_back(c.expr);
            nonzero_pos.push_back(first.size());
        }
        first.push_back(c);
    }
    {
        std::vector<std::size_t> keep = independent_subset(nonzero, policy);
        std::vector<bool> drop(first.size(), false);
        for (std::size_t p : nonzero_pos) drop[p] = true;
        for (std::size_t k : keep) drop[nonzero_pos[k]] = false;
        std::vector<Constraint> kept;
        for (std::size_t i = 0; i < first.size(); ++i)
            if (!drop[i]) kept.push_back(first[i]);
        first = std::move(kept);
    }
    if (!first.empty()) chain.generations.push_back(std::move(first));

    bool tangency_residual = false;
    while (!chain.generations.empty()) {
        const int g = static_cast<int>(chain.generations.size());
        std::vector<Constraint>& current = chain.generations.back();
        std::vector<Constraint> candidates;
        for (std::size_t j = 0; j < current.size(); ++j) {
            Constraint& phi = current[j];
            if (phi.identically_zero) continue;
            bool projects = projects_onto(phi.expr, top - 1, policy);
            if (projects && policy == NormalizePolicy::NoExpand) phi.expr = drop_orders_above(phi.expr, top - 1);
            for (int i = 0; i < input.base_dim; ++i) {
                if (projects) {
                    Constraint c;
                    c.expr = clean(total_derivative(phi.expr, i));
                    c.generation = g + 1;
                    c.parent = static_cast<int>(j);
                    c.direction = i;
                    c.fiber = phi.fiber;
                    candidates.push_back(c);
                } else {
                    TangencyDerivation x(i, top);
                    chain.residual_equations.push_back(
                        {clean(apply(x, phi.expr)), g, static_cast<int>(j), i, phi.fiber});
                    tangency_residual = true;
                }
            }
        }
        std::vector<Expr> exprs;
        for (const auto& c : candidates) exprs.push_back(c.expr);
        std::vector<Constraint> next;
        for (std::size_t k : independent_subset(exprs, policy)) next.push_back(candidates[k]);
        if (next.empty()) break;
        if (g + 1 > input.max_generations) {
            chain.status = ChainStatus::MaxIterations;
            analyse_unknowns(chain, policy);
            return chain;
        }
        chain.generations.push_back(std::move(next));
    }
    chain.status = tangency_residual ? ChainStatus::TerminatedWithResidual : ChainStatus::TerminatedIdentically;
    analyse_unknowns(chain, policy);
    return chain;
}

}  // namespace jetvar
