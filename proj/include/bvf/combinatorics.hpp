#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bvf {

inline constexpr int kMaxDim = 8;

constexpr long binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long v = 1;
    if (k > n - k) k = n - k;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

/// Sorted multi-indices of length k over [0, n), enumerated lexicographically,
/// with a bitmask lookup for ranking.
struct IndexTable {
    int n = 0;
    int k = 0;
    std::vector<std::vector<int>> tuples;
    std::array<int, 256> rank_of_mask{};  // mask -> rank, -1 if |mask| != k

    IndexTable() = default;
    IndexTable(int n_, int k_) : n(n_), k(k_) {
        rank_of_mask.fill(-1);
        if (k < 0 || k > n) return;  // empty table: the zero fiber
        std::vector<int> t(k);
        for (int i = 0; i < k; ++i) t[i] = i;
        while (true) {
            int mask = 0;
            for (int v : t) mask |= 1 << v;
            rank_of_mask[mask] = static_cast<int>(tuples.size());
            tuples.push_back(t);
            int i = k - 1;
            while (i >= 0 && t[i] == n - k + i) --i;
            if (i < 0) break;
            ++t[i];
            for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
        }
    }

    int count() const { return static_cast<int>(tuples.size()); }
    const std::vector<int>& tuple(int rank) const { return tuples[rank]; }
    int rank(int mask) const { return rank_of_mask[mask]; }
};

inline const IndexTable& index_table(int n, int k) {
    static std::array<std::array<IndexTable, kMaxDim + 2>, kMaxDim + 1> cache = [] {
        std::array<std::array<IndexTable, kMaxDim + 2>, kMaxDim + 1> c;
        for (int n = 0; n <= kMaxDim; ++n)
            for (int k = 0; k <= kMaxDim + 1; ++k) c[n][k] = IndexTable(n, k);
        return c;
    }();
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("index_table: dimension out of range");
    if (k < 0) throw std::invalid_argument("index_table: negative degree");
    if (k > kMaxDim + 1) throw std::invalid_argument("index_table: degree out of range");
    return cache[n][k];
}

/// Sorts an index tuple in place, returning the permutation signature,
/// or 0 if an index repeats. Entries must lie in [0, n).
inline int canonicalize(std::vector<int>& t, int n) {
    int sign = 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0 || t[i] >= n) throw std::out_of_range("canonicalize: index out of range");
        for (std::size_t j = i; j > 0 && t[j] < t[j - 1]; --j) {
            std::swap(t[j], t[j - 1]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] == t[i - 1]) return 0;
    return sign;
}

/// Sign and rank of the concatenation (a, b) of two sorted disjoint tuples,
/// as a sorted multi-index over [0, n). Returns 0 on overlap.
inline int merge_sign(const std::vector<int>& a, const std::vector<int>& b, int& out_mask) {
    int mask_a = 0, mask_b = 0;
    for (int v : a) mask_a |= 1 << v;
    for (int v : b) mask_b |= 1 << v;
    if (mask_a & mask_b) return 0;
    out_mask = mask_a | mask_b;
    // inversions between the two sorted blocks
    int inv = 0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        while (i < a.size() && a[i] < b[j]) ++i;
        inv += static_cast<int>(a.size() - i);
    }
    return (inv & 1) ? -1 : 1;
}

/// Visits every split of the sorted tuple `R` into a subtuple of size k and its
/// complement, passing (rank_first, rank_second, sign) where sign is the
/// signature of the (k, |R|-k) shuffle. Ranks refer to index_table(n, k) and
/// index_table(n, |R|-k).
template <class F>
void for_each_split(int n, const std::vector<int>& R, int k, F&& visit) {
    const int m = static_cast<int>(R.size());
    if (k < 0 || k > m) return;
    const IndexTable& tab_a = index_table(n, k);
    const IndexTable& tab_b = index_table(n, m - k);
    // iterate over k-subsets of positions {0..m-1}
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) pos[i] = i;
    while (true) {
        int mask_a = 0, mask_b = 0, inv = 0;
        {
            int pi = 0;
            for (int p = 0; p < m; ++p) {
                if (pi < k && pos[pi] == p) {
                    mask_a |= 1 << R[p];
                    inv += p - pi;  // second-block elements jumped over
                    ++pi;
                } else {
                    mask_b |= 1 << R[p];
                }
            }
        }
        visit(tab_a.rank(mask_a), tab_b.rank(mask_b), (inv & 1) ? -1 : 1);
        if (k == 0) break;
        int i = k - 1;
        while (i >= 0 && pos[i] == m - k + i) --i;
        if (i < 0) break;
        ++pos[i];
        for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

/// Determinant of a small row-major k x k matrix (k <= 6 in practice).
inline double det_small(const double* m, int k) {
    switch (k) {
        case 0: return 1.0;
        case 1: return m[0];
        case 2: return m[0] * m[3] - m[1] * m[2];
        case 3:
            return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                   m[2] * (m[3] * m[7] - m[4] * m[6]);
        default: {
            double sub[49];
            double acc = 0.0;
            for (int j = 0; j < k; ++j) {
                for (int r = 1; r < k; ++r) {
                    int cc = 0;
                    for (int c = 0; c < k; ++c) {
                        if (c == j) continue;
                        sub[(r - 1) * (k - 1) + cc++] = m[r * k + c];
                    }
                }
                acc += ((j & 1) ? -1.0 : 1.0) * m[j] * det_small(sub, k - 1);
            }
            return acc;
        }
    }
}

inline std::vector<int> complement_tuple(int n, const std::vector<int>& tuple) {
    std::vector<int> out;
    out.reserve(n - tuple.size());
    std::size_t i = 0;
    for (int v = 0; v < n; ++v) {
        if (i < tuple.size() && tuple[i] == v) { ++i; continue; }
        out.push_back(v);
    }
    return out;
}

}  // namespace bvf
