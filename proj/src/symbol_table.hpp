#pragma once

#include <cstdint>

#include "jetvar/symbol.hpp"

namespace jetvar::detail {

/// Cached per-symbol data used by the expression node summaries.
int symbol_order(SymbolId id) noexcept;
bool symbol_is_unknown(SymbolId id) noexcept;
std::uint64_t symbol_bloom(SymbolId id) noexcept;
std::uint64_t symbol_hash(SymbolId id) noexcept;

}  // namespace jetvar::detail
