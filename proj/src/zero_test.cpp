#include "jetvar/zero_test.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "hashing.hpp"
#include "jetvar/evaluate.hpp"

namespace jetvar {

namespace {

constexpr int kMaxAttemptsFactor = 8;

std::function<std::uint64_t(SymbolId)> point_values(std::uint64_t seed) {
    return [seed](SymbolId s) { return random_symbol_value(s, seed); };
}

}  // namespace

ZeroTestResult zero_test(const Expr& e, const ZeroTestOptions& options) {
    if (e.is_constant()) return {e.is_zero_constant(), "structural", 0};
    if (options.policy == NormalizePolicy::NoExpand) {
        int wanted = std::max(8, options.points);
        int good = 0;
        ModPrimeProgram program({e});
        for (int attempt = 0; attempt < kMaxAttemptsFactor * wanted && good < wanted; ++attempt) {
            auto v = program.run(point_values(detail::combine(options.seed, attempt)));
            if (!v) continue;
            if ((*v)[0] != 0) return {false, "probabilistic", good + 1};
            ++good;
        }
        if (good == wanted) return {true, "probabilistic", good};
    }
    return {normalize(e).is_zero_constant(), "expanded", 0};
}

bool independent_of(const Expr& e, const std::function<bool(SymbolId)>& varies, const ZeroTestOptions& options) {
    auto present = free_symbols(e);
    if (std::none_of(present.begin(), present.end(), varies)) return true;
    if (options.policy == NormalizePolicy::NoExpand) {
        int wanted = std::max(8, options.points);
        int good = 0;
        ModPrimeProgram program({e});
        for (int attempt = 0; attempt < kMaxAttemptsFactor * wanted && good < wanted; ++attempt) {
            std::uint64_t s1 = detail::combine(options.seed, attempt);
            std::uint64_t s2 = detail::combine(s1, 0x9e37);
            auto va = program.run(point_values(s1));
            if (!va) continue;
            auto vb = program.run([&](SymbolId s) { return random_symbol_value(s, varies(s) ? s2 : s1); });
            if (!vb) continue;
            if (*va != *vb) return false;
            ++good;
        }
        if (good == wanted) return true;
    }
    auto reduced = free_symbols(normalize(e));
    return std::none_of(reduced.begin(), reduced.end(), varies);
}

std::vector<std::vector<std::uint64_t>> sample_values(const std::vector<Expr>& exprs, int points,
                                                      std::uint64_t seed) {
    std::vector<std::vector<std::uint64_t>> out;
    ModPrimeProgram program(exprs);
    for (int attempt = 0; attempt < kMaxAttemptsFactor * points + 8 && static_cast<int>(out.size()) < points;
         ++attempt) {
        if (auto row = program.run(point_values(detail::combine(seed, attempt)))) out.push_back(std::move(*row));
    }
    return out;
}

namespace {

std::vector<std::size_t> independent_exact(const std::vector<Expr>& exprs) {
    // Each normal form is a vector over its monomial terms; the constant term is keyed by 1.
    std::vector<std::map<const Node*, Rational>> basis;  // reduced rows
    std::vector<const Node*> pivots;
    std::vector<Expr> keep;
    std::vector<std::size_t> kept;
    for (std::size_t idx = 0; idx < exprs.size(); ++idx) {
        Expr n = normalize(exprs[idx]);
        std::map<const Node*, Rational> row;
        auto add = [&](const Expr& term, const Rational& c) {
            keep.push_back(term);
            row[term.node()] += c;
        };
        if (n.kind() == ExprKind::Add) {
            if (n.constant() != 0) add(Expr(1), n.constant());
            for (const Term& t : n.terms()) add(t.expr, t.coeff);
        } else if (n.is_constant()) {
            if (n.constant() != 0) add(Expr(1), n.constant());
        } else {
            auto [c, u] = split_coefficient(n);
            add(u, c);
        }
        for (std::size_t b = 0; b < basis.size(); ++b) {
            auto it = row.find(pivots[b]);
            if (it == row.end()) continue;
            Rational f = it->second;
            for (const auto& [k, v] : basis[b]) {
                Rational& slot = row[k];
                slot -= f * v;
            }
            std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
        }
        if (row.empty()) continue;
        const Node* pivot = row.begin()->first;
        Rational inv = 1 / row.begin()->second;
        for (auto& [k, v] : row) v *= inv;
        // keep earlier rows reduced against the new pivot
        for (auto& r : basis) {
            auto it = r.find(pivot);
            if (it == r.end()) continue;
            Rational f = it->second;
            for (const auto& [k, v] : row) r[k] -= f * v;
            std::erase_if(r, [](const auto& kv) { return kv.second == 0; });
        }
        basis.push_back(std::move(row));
        pivots.push_back(pivot);
        kept.push_back(idx);
    }
    return kept;
}

std::vector<std::size_t> independent_modp(const std::vector<Expr>& exprs, std::uint64_t seed) {
    int points = static_cast<int>(exprs.size()) + 8;
    auto samples = sample_values(exprs, points, seed);
    std::size_t rows = samples.size();
    std::vector<std::vector<std::uint64_t>> basis;  // column vectors in echelon form
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> kept;
    for (std::size_t idx = 0; idx < exprs.size(); ++idx) {
        std::vector<std::uint64_t> col(rows);
        for (std::size_t r = 0; r < rows; ++r) col[r] = samples[r][idx];
        for (std::size_t b = 0; b < basis.size(); ++b) {
            std::uint64_t f = col[pivots[b]];
            if (f == 0) continue;
            for (std::size_t r = 0; r < rows; ++r) col[r] = modp::sub(col[r], modp::mul(f, basis[b][r]));
        }
        auto nz = std::find_if(col.begin(), col.end(), [](std::uint64_t v) { return v != 0; });
        if (nz == col.end()) continue;
        std::size_t pivot = static_cast<std::size_t>(nz - col.begin());
        std::uint64_t inv = modp::inverse(col[pivot]);
        for (auto& v : col) v = modp::mul(v, inv);
        basis.push_back(std::move(col));
        pivots.push_back(pivot);
        kept.push_back(idx);
    }
    return kept;
}

}  // namespace

std::vector<std::size_t> independent_subset(const std::vector<Expr>& exprs, NormalizePolicy policy,
                                            std::uint64_t seed) {
    if (policy == NormalizePolicy::Expand) return independent_exact(exprs);
    return independent_modp(exprs, seed);
}

}  // namespace jetvar
