#include "jetvar/jet_space.hpp"

#include <array>
#include <memory>
#include <mutex>

#include "jetvar/errors.hpp"
#include "jetvar/text.hpp"
#include "jetvar/zero_test.hpp"

namespace jetvar {

JetSpace::JetSpace(int base_dim, int fiber_dim, int order) : m_(base_dim), n_(fiber_dim), k_(order) {
    if (m_ < 1 || n_ < 1 || k_ < 0) throw std::invalid_argument("jet space needs m >= 1, n >= 1, k >= 0");
}

SymbolId JetSpace::x(int i) const {
    if (i < 0 || i >= m_) throw UnknownCoordinate("base direction " + std::to_string(i + 1) + " out of range");
    return SymbolId::intern(Symbol::base(i));
}

SymbolId JetSpace::u(int alpha, const MultiIndex& index) const {
    if (alpha < 0 || alpha >= n_ || static_cast<int>(index.dim()) != m_)
        throw UnknownCoordinate("fiber coordinate outside the jet space");
    return SymbolId::intern(Symbol::fiber_jet(alpha, index));
}

std::vector<SymbolId> JetSpace::fiber_coordinates(int level) const {
    std::vector<SymbolId> out;
    auto indices = multi_indices_of_length(static_cast<std::size_t>(m_), level);
    for (int a = 0; a < n_; ++a)
        for (const MultiIndex& I : indices) out.push_back(u(a, I));
    return out;
}

std::vector<SymbolId> JetSpace::coordinates() const {
    std::vector<SymbolId> out;
    for (int i = 0; i < m_; ++i) out.push_back(x(i));
    for (int r = 0; r <= k_; ++r) {
        auto level = fiber_coordinates(r);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

bool JetSpace::admits(SymbolId s) const {
    const Symbol& sym = s.get();
    switch (sym.kind) {
        case SymbolKind::Base:
            return sym.direction < m_;
        case SymbolKind::Fiber:
            return sym.fiber < n_ && static_cast<int>(sym.index.dim()) == m_ && sym.index.length() <= k_;
        case SymbolKind::Unknown:
            return false;
        case SymbolKind::Auxiliary:
            return true;
    }
    return false;
}

void JetSpace::check(const Expr& e) const {
    for (SymbolId s : free_symbols(e))
        if (!admits(s))
            throw UnknownCoordinate("symbol " + symbol_name(s) + " is not a coordinate of J^" + std::to_string(k_) +
                                    " (m=" + std::to_string(m_) + ", n=" + std::to_string(n_) + ")");
}

std::vector<SymbolId> JetSpace::vertical_basis(int s) const {
    std::vector<SymbolId> out;
    for (int r = std::max(s + 1, 0); r <= k_; ++r) {
        auto level = fiber_coordinates(r);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

class TotalDerivation final : public Derivation {
public:
    explicit TotalDerivation(int i) : i_(i), key_("D" + std::to_string(i)) {}

    std::optional<Expr> component(SymbolId s) const override {
        const Symbol& sym = s.get();
        switch (sym.kind) {
            case SymbolKind::Base:
                if (sym.direction == i_) return Expr(1);
                return std::nullopt;
            case SymbolKind::Fiber:
                if (static_cast<int>(sym.index.dim()) <= i_)
                    throw UnknownCoordinate("total derivative along x" + std::to_string(i_ + 1) + " of " +
                                            symbol_name(sym));
                return Expr(Symbol::fiber_jet(sym.fiber, sym.index.add_unit(static_cast<std::size_t>(i_))));
            default:
                return std::nullopt;
        }
    }

    std::string key() const override { return key_; }

private:
    int i_;
    std::string key_;
};

}  // namespace

const Derivation& total_derivation(int direction) {
    static std::mutex mutex;
    static std::vector<std::unique_ptr<TotalDerivation>> table;
    std::lock_guard lock(mutex);
    while (static_cast<int>(table.size()) <= direction)
        table.push_back(std::make_unique<TotalDerivation>(static_cast<int>(table.size())));
    return *table[static_cast<std::size_t>(direction)];
}

Expr total_derivative(const Expr& e, int direction) { return apply(total_derivation(direction), e); }

Expr total_derivative(const JetSpace& space, const Expr& e, int direction) {
    space.check(e);
    if (direction < 0 || direction >= space.base_dim())
        throw UnknownCoordinate("base direction " + std::to_string(direction + 1) + " out of range");
    return total_derivative(e, direction);
}

Expr iterated_total_derivative(const Expr& e, const MultiIndex& index) {
    Expr out = e;
    for (std::size_t i = 0; i < index.dim(); ++i)
        for (int c = 0; c < index[i]; ++c) out = total_derivative(out, static_cast<int>(i));
    return out;
}

Expr iterated_total_derivative(const JetSpace& space, const Expr& e, const MultiIndex& index) {
    space.check(e);
    if (static_cast<int>(index.dim()) != space.base_dim())
        throw UnknownCoordinate("multi-index dimension does not match the base");
    return iterated_total_derivative(e, index);
}

SymbolId unknown_symbol(int alpha, const MultiIndex& index, int direction) {
    return SymbolId::intern(Symbol::unknown(alpha, index, direction));
}

std::optional<Expr> TangencyDerivation::component(SymbolId s) const {
    const Symbol& sym = s.get();
    switch (sym.kind) {
        case SymbolKind::Base:
            if (sym.direction == i_) return Expr(1);
            return std::nullopt;
        case SymbolKind::Fiber: {
            int len = sym.index.length();
            if (len > top_)
                throw UnknownCoordinate("coordinate " + symbol_name(sym) + " above the top order " +
                                        std::to_string(top_));
            if (len == top_) return Expr(unknown_symbol(sym.fiber, sym.index, i_));
            return Expr(Symbol::fiber_jet(sym.fiber, sym.index.add_unit(static_cast<std::size_t>(i_))));
        }
        default:
            return std::nullopt;
    }
}

bool projects_onto(const Expr& e, int s, NormalizePolicy policy) {
    if (e.max_order() <= s) return true;
    ZeroTestOptions o;
    o.policy = policy;
    return independent_of(
        e, [s](SymbolId v) { return v->kind == SymbolKind::Fiber && v->index.length() > s; }, o);
}

Expr drop_orders_above(const Expr& e, int s) {
    if (e.max_order() <= s) return e;
    std::unordered_map<SymbolId, Expr> zero;
    for (SymbolId v : free_symbols(e))
        if (v->kind == SymbolKind::Fiber && v->index.length() > s) zero.emplace(v, Expr(0));
    try {
        return substitute_raw(e, zero);
    } catch (const DivisionByZero&) {
        return e;
    }
}

}  // namespace jetvar
