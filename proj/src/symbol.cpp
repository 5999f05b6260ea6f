#include "jetvar/symbol.hpp"

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "hashing.hpp"
#include "symbol_table.hpp"

namespace jetvar {

Symbol Symbol::base(int direction) {
    Symbol s;
    s.kind = SymbolKind::Base;
    s.direction = direction;
    return s;
}

Symbol Symbol::fiber_jet(int fiber, MultiIndex index) {
    Symbol s;
    s.kind = SymbolKind::Fiber;
    s.fiber = fiber;
    s.index = std::move(index);
    return s;
}

Symbol Symbol::unknown(int fiber, MultiIndex index, int direction) {
    Symbol s;
    s.kind = SymbolKind::Unknown;
    s.fiber = fiber;
    s.index = std::move(index);
    s.direction = direction;
    return s;
}

Symbol Symbol::auxiliary(std::string name) {
    Symbol s;
    s.kind = SymbolKind::Auxiliary;
    s.name = std::move(name);
    return s;
}

int Symbol::jet_order() const noexcept {
    return kind == SymbolKind::Fiber ? index.length() : 0;
}

bool symbol_less(const Symbol& a, const Symbol& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    switch (a.kind) {
        case SymbolKind::Base:
            return a.direction < b.direction;
        case SymbolKind::Fiber:
            if (a.fiber != b.fiber) return a.fiber < b.fiber;
            return a.index < b.index;
        case SymbolKind::Unknown:
            if (a.fiber != b.fiber) return a.fiber < b.fiber;
            if (a.index != b.index) return a.index < b.index;
            return a.direction < b.direction;
        case SymbolKind::Auxiliary:
            return a.name < b.name;
    }
    return false;
}

std::string symbol_name(const Symbol& s) {
    switch (s.kind) {
        case SymbolKind::Base:
            return "x" + std::to_string(s.direction + 1);
        case SymbolKind::Fiber:
            if (s.index.dim() == 1)
                return "q" + std::to_string(s.fiber + 1) + "_" + std::to_string(s.index[0]);
            return "u" + std::to_string(s.fiber + 1) + "_" + s.index.to_string();
        case SymbolKind::Unknown:
            if (s.index.dim() == 1)
                return "F" + std::to_string(s.fiber + 1) + "_" + std::to_string(s.index[0]);
            return "F" + std::to_string(s.fiber + 1) + "_" + s.index.to_string() + "_" +
                   std::to_string(s.direction + 1);
        case SymbolKind::Auxiliary:
            return s.name;
    }
    return {};
}

namespace {

struct Entry {
    Symbol symbol;
    int order;
    std::uint64_t bloom;
    std::uint64_t hash;
};

constexpr std::size_t kChunkBits = 12;
constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
constexpr std::size_t kMaxChunks = 4096;

struct SymbolHasher {
    std::size_t operator()(const Symbol& s) const noexcept {
        std::uint64_t h = detail::mix(static_cast<std::uint64_t>(s.kind) + 17);
        h = detail::combine(h, static_cast<std::uint64_t>(s.fiber));
        h = detail::combine(h, static_cast<std::uint64_t>(s.direction));
        h = detail::combine(h, s.index.dim());
        for (int e : s.index.entries()) h = detail::combine(h, static_cast<std::uint64_t>(e));
        h = detail::combine(h, detail::hash_bytes(s.name.data(), s.name.size()));
        return h;
    }
};

class Registry {
public:
    Registry() { intern(Symbol::auxiliary("")); }

    std::uint32_t intern(const Symbol& s) {
        std::lock_guard lock(mutex_);
        if (auto it = ids_.find(s); it != ids_.end()) return it->second;
        std::uint32_t id = size_.load(std::memory_order_relaxed);
        std::size_t chunk = id >> kChunkBits;
        if (chunk >= kMaxChunks) throw std::length_error("symbol table exhausted");
        if (!chunks_[chunk].load(std::memory_order_relaxed)) {
            owned_.push_back(std::make_unique<std::array<Entry, kChunkSize>>());
            chunks_[chunk].store(owned_.back().get(), std::memory_order_release);
        }
        std::uint64_t h = SymbolHasher{}(s);
        Entry& e = (*chunks_[chunk].load(std::memory_order_relaxed))[id & (kChunkSize - 1)];
        e.symbol = s;
        e.order = s.jet_order();
        e.hash = h;
        e.bloom = std::uint64_t{1} << (detail::mix(h) & 63);
        ids_.emplace(s, id);
        size_.store(id + 1, std::memory_order_release);
        return id;
    }

    const Entry& get(std::uint32_t id) const {
        auto* chunk = chunks_[id >> kChunkBits].load(std::memory_order_acquire);
        return (*chunk)[id & (kChunkSize - 1)];
    }

private:
    std::mutex mutex_;
    std::unordered_map<Symbol, std::uint32_t, SymbolHasher> ids_;
    std::array<std::atomic<std::array<Entry, kChunkSize>*>, kMaxChunks> chunks_{};
    std::vector<std::unique_ptr<std::array<Entry, kChunkSize>>> owned_;
    std::atomic<std::uint32_t> size_{0};
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

SymbolId SymbolId::intern(const Symbol& symbol) { return SymbolId(registry().intern(symbol)); }

const Symbol& SymbolId::get() const { return registry().get(id_).symbol; }

namespace detail {

int symbol_order(SymbolId id) noexcept { return registry().get(id.raw()).order; }
bool symbol_is_unknown(SymbolId id) noexcept {
    return registry().get(id.raw()).symbol.kind == SymbolKind::Unknown;
}
std::uint64_t symbol_bloom(SymbolId id) noexcept { return registry().get(id.raw()).bloom; }
std::uint64_t symbol_hash(SymbolId id) noexcept { return registry().get(id.raw()).hash; }

}  // namespace detail

}  // namespace jetvar
