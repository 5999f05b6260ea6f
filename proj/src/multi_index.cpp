#include "jetvar/multi_index.hpp"

#include <numeric>
#include <stdexcept>

namespace jetvar {

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t i) {
    MultiIndex m(dim);
    m.entries_.at(i) = 1;
    return m;
}

int MultiIndex::length() const noexcept {
    return std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::add_unit(std::size_t i) const {
    MultiIndex m = *this;
    ++m.entries_.at(i);
    return m;
}

MultiIndex MultiIndex::remove_unit(std::size_t i) const {
    if (entries_.at(i) == 0) throw std::invalid_argument("MultiIndex::remove_unit: entry is zero");
    MultiIndex m = *this;
    --m.entries_[i];
    return m;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    MultiIndex m = *this;
    for (std::size_t i = 0; i < dim(); ++i) m.entries_[i] += other.entries_[i];
    return m;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
    if (auto c = length() <=> other.length(); c != 0) return c;
    if (auto c = dim() <=> other.dim(); c != 0) return c;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (entries_[i] != other.entries_[i]) return other.entries_[i] <=> entries_[i];
    }
    return std::strong_ordering::equal;
}

std::string MultiIndex::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(entries_[i]);
    }
    return s + "]";
}

namespace {

void enumerate(std::size_t dim, std::size_t pos, int remaining, std::vector<int>& cur,
               std::vector<MultiIndex>& out) {
    if (pos + 1 == dim) {
        cur[pos] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[pos] = v;
        enumerate(dim, pos + 1, remaining - v, cur, out);
    }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_length(std::size_t dim, int length) {
    std::vector<MultiIndex> out;
    if (length < 0) return out;
    if (dim == 0) {
        if (length == 0) out.emplace_back(std::vector<int>{});
        return out;
    }
    std::vector<int> cur(dim, 0);
    enumerate(dim, 0, length, cur, out);
    return out;
}

std::vector<MultiIndex> multi_indices_between(std::size_t dim, int lo, int hi) {
    std::vector<MultiIndex> out;
    for (int r = std::max(lo, 0); r <= hi; ++r) {
        auto level = multi_indices_of_length(dim, r);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace jetvar
