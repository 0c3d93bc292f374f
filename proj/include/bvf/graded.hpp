#pragma once

#include <map>

#include "bvf/integration.hpp"

namespace bvf {

/// A finite sum of tangent-valued forms across degrees; absent degrees are
/// zero. The carrier for graded variational fields and their derivatives.
struct GradedField {
    const ChartGeometry* geom = nullptr;
    std::map<int, FormField> comps;

    GradedField() = default;
    explicit GradedField(const ChartGeometry& g) : geom(&g) {}

    static GradedField from(FormField f) {
        GradedField out(*f.geom);
        out.comps.emplace(f.degree, std::move(f));
        return out;
    }

    bool has(int degree) const { return comps.count(degree) != 0; }
    const FormField& at(int degree) const { return comps.at(degree); }

    /// Adds a component into the given degree (accumulating).
    void add(FormField f) {
        if (geom == nullptr) geom = f.geom;
        if (f.geom != geom) throw std::invalid_argument("GradedField: geometry mismatch");
        if (f.degree > geom->dim() || f.empty_fiber()) return;  // dimension-forced zero
        auto it = comps.find(f.degree);
        if (it == comps.end())
            comps.emplace(f.degree, std::move(f));
        else
            it->second += f;
    }

    GradedField& operator+=(const GradedField& o) {
        for (const auto& [d, f] : o.comps) add(f);
        return *this;
    }
    GradedField& operator-=(const GradedField& o) {
        for (const auto& [d, f] : o.comps) add(-1.0 * f);
        return *this;
    }
    GradedField& operator*=(double s) {
        for (auto& [d, f] : comps) f *= s;
        return *this;
    }

    double sup_norm() const {
        double m = 0.0;
        for (const auto& [d, f] : comps) m = std::max(m, f.sup_norm());
        return m;
    }

    /// Drops numerically absent components (exact zero data).
    void prune() {
        for (auto it = comps.begin(); it != comps.end();) {
            bool zero = true;
            for (double v : it->second.data)
                if (v != 0.0) {
                    zero = false;
                    break;
                }
            it = zero ? comps.erase(it) : std::next(it);
        }
    }
};

inline GradedField operator+(GradedField a, const GradedField& b) { return a += b; }
inline GradedField operator-(GradedField a, const GradedField& b) { return a -= b; }
inline GradedField operator*(double s, GradedField a) { return a *= s; }

inline double l2_inner(const GradedField& a, const GradedField& b) {
    double acc = 0.0;
    for (const auto& [d, f] : a.comps) {
        auto it = b.comps.find(d);
        if (it != b.comps.end()) acc += l2_inner(f, it->second);
    }
    return acc;
}

inline double l2_norm(const GradedField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

inline GradedField dnabla(const GradedField& g, DegreeMask mask = DegreeMask::none()) {
    GradedField out(*g.geom);
    for (const auto& [d, f] : g.comps) out.add(dnabla(f, mask));
    return out;
}

inline GradedField codifferential(const GradedField& g, DegreeMask mask = DegreeMask::none()) {
    GradedField out(*g.geom);
    for (const auto& [d, f] : g.comps)
        if (d >= 1) out.add(codifferential(f, mask));
    return out;
}

}  // namespace bvf
