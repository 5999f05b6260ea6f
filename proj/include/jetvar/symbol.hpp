#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "jetvar/multi_index.hpp"

namespace jetvar {

enum class SymbolKind : std::uint8_t {
    Base = 0,       ///< base coordinate x^i
    Fiber = 1,      ///< fiber jet coordinate u^alpha_I
    Unknown = 2,    ///< unknown F^alpha_{J,i} of a holonomic multivector field
    Auxiliary = 3,  ///< free-standing named symbol
};

/// Identity of a coordinate. Directions and fiber labels are zero-based;
/// the textual form shifts them to one-based.
struct Symbol {
    SymbolKind kind = SymbolKind::Auxiliary;
    int fiber = 0;
    int direction = 0;
    MultiIndex index;
    std::string name;

    static Symbol base(int direction);
    static Symbol fiber_jet(int fiber, MultiIndex index);
    static Symbol unknown(int fiber, MultiIndex index, int direction);
    static Symbol auxiliary(std::string name);

    /// |I| for fiber coordinates, 0 otherwise.
    int jet_order() const noexcept;

    bool operator==(const Symbol& other) const = default;
};

/// Total order over symbols: kind first, then the index payload.
bool symbol_less(const Symbol& a, const Symbol& b);

/// Interned handle to a Symbol. Ids are dense but their numeric order is not
/// meaningful; use symbol_less for deterministic ordering.
class SymbolId {
public:
    SymbolId() = default;

    static SymbolId intern(const Symbol& symbol);

    const Symbol& get() const;
    const Symbol* operator->() const { return &get(); }
    std::uint32_t raw() const noexcept { return id_; }

    bool operator==(const SymbolId& other) const = default;

private:
    explicit SymbolId(std::uint32_t id) : id_(id) {}
    std::uint32_t id_ = 0;
};

inline bool symbol_less(SymbolId a, SymbolId b) { return a != b && symbol_less(a.get(), b.get()); }

/// Canonical text: x<i>, u<a>_[c1,...,cm], q<a>_<j> when m == 1, F<a>_[J]_<i>
/// (F<a>_<j> when m == 1), or the auxiliary name.
std::string symbol_name(const Symbol& symbol);
inline std::string symbol_name(SymbolId id) { return symbol_name(id.get()); }

}  // namespace jetvar

template <>
struct std::hash<jetvar::SymbolId> {
    std::size_t operator()(jetvar::SymbolId id) const noexcept { return id.raw(); }
};
