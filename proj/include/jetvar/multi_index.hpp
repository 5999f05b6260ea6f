#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace jetvar {

/// Element of Z^m with nonnegative entries; entry i counts derivatives along x^(i+1).
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t dim) : entries_(dim, 0) {}
    MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}
    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}

    static MultiIndex unit(std::size_t dim, std::size_t i);

    std::size_t dim() const noexcept { return entries_.size(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<int>& entries() const noexcept { return entries_; }

    /// |I|, the sum of the entries.
    int length() const noexcept;

    MultiIndex add_unit(std::size_t i) const;
    /// Requires entry i > 0.
    MultiIndex remove_unit(std::size_t i) const;
    MultiIndex operator+(const MultiIndex& other) const;

    /// Graded lexicographic: shorter length first, then entries compared from the
    /// first position with larger entries first, so (2,0) < (1,1) < (0,2).
    std::strong_ordering operator<=>(const MultiIndex& other) const;
    bool operator==(const MultiIndex& other) const = default;

    /// "[c1,...,cm]"
    std::string to_string() const;

private:
    std::vector<int> entries_;
};

/// All multi-indices of dimension `dim` and length `length`, in graded-lex order.
std::vector<MultiIndex> multi_indices_of_length(std::size_t dim, int length);

/// All multi-indices with lo <= |I| <= hi, ordered by length then lex.
std::vector<MultiIndex> multi_indices_between(std::size_t dim, int lo, int hi);

/// Combinatorial factor n(ij): 1 when i == j, 2 otherwise.
inline int comb_factor(std::size_t i, std::size_t j) { return i == j ? 1 : 2; }

/// C(n, k) for the small arguments used in coordinate counting.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace jetvar
