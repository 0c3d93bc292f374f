#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bvf/combinatorics.hpp"

namespace bvf {

/// Tensor-product sample grid. Periodic axes store res nodes on [lo, hi) with
/// the right endpoint identified; non-periodic axes store res nodes including
/// both endpoints.
struct Grid {
    int n = 0;
    std::array<int, kMaxDim> res{};
    std::array<bool, kMaxDim> periodic{};
    std::array<double, kMaxDim> lo{}, hi{}, h{};

    long node_count() const {
        long c = 1;
        for (int a = 0; a < n; ++a) c *= res[a];
        return c;
    }

    bool all_periodic() const {
        for (int a = 0; a < n; ++a)
            if (!periodic[a]) return false;
        return true;
    }

    void finalize() {
        for (int a = 0; a < n; ++a) {
            if (res[a] < (periodic[a] ? 3 : 3))
                throw std::invalid_argument("Grid: resolution too small for central differences");
            h[a] = periodic[a] ? (hi[a] - lo[a]) / res[a] : (hi[a] - lo[a]) / (res[a] - 1);
        }
    }

    void node_coords(long idx, std::array<int, kMaxDim>& c) const {
        for (int a = n - 1; a >= 0; --a) {
            c[a] = static_cast<int>(idx % res[a]);
            idx /= res[a];
        }
    }

    long node_index(const std::array<int, kMaxDim>& c) const {
        long idx = 0;
        for (int a = 0; a < n; ++a) idx = idx * res[a] + c[a];
        return idx;
    }

    std::array<double, kMaxDim> position(long idx) const {
        std::array<int, kMaxDim> c{};
        node_coords(idx, c);
        std::array<double, kMaxDim> x{};
        for (int a = 0; a < n; ++a) x[a] = lo[a] + c[a] * h[a];
        return x;
    }

    /// Index of the node shifted by `step` along `axis`; ok=false when the
    /// shift leaves a non-periodic axis.
    long shifted(long idx, int axis, int step, bool& ok) const {
        std::array<int, kMaxDim> c{};
        node_coords(idx, c);
        int v = c[axis] + step;
        if (periodic[axis]) {
            v %= res[axis];
            if (v < 0) v += res[axis];
        } else if (v < 0 || v >= res[axis]) {
            ok = false;
            return idx;
        }
        ok = true;
        c[axis] = v;
        return node_index(c);
    }

    /// True when the node sits at least `margin` layers from every
    /// non-periodic boundary.
    bool node_valid(long idx, int margin) const {
        if (margin == 0) return true;
        std::array<int, kMaxDim> c{};
        node_coords(idx, c);
        for (int a = 0; a < n; ++a) {
            if (periodic[a]) continue;
            if (c[a] < margin || c[a] >= res[a] - margin) return false;
        }
        return true;
    }

    double max_h() const {
        double m = 0;
        for (int a = 0; a < n; ++a) m = std::max(m, h[a]);
        return m;
    }
};

}  // namespace bvf
