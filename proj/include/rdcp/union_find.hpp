#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace rdcp {

/// Union-find with component sizes and a running sum of squared sizes.
class UnionFind {
public:
    UnionFind() = default;
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), components_(n), sum_sq_(n), largest_(n ? 1 : 0) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        sum_sq_ -= size_[a] * size_[a] + size_[b] * size_[b];
        parent_[b] = a;
        size_[a] += size_[b];
        sum_sq_ += size_[a] * size_[a];
        --components_;
        if (size_[a] > largest_) largest_ = size_[a];
        return true;
    }

    std::uint64_t component_size(std::uint32_t x) { return size_[find(x)]; }
    std::uint64_t components() const { return components_; }
    std::uint64_t sum_of_squares() const { return sum_sq_; }
    std::uint64_t largest() const { return largest_; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint64_t> size_;
    std::uint64_t components_ = 0;
    std::uint64_t sum_sq_ = 0;
    std::uint64_t largest_ = 0;
};

}  // namespace rdcp
