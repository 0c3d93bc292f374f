#pragma once

#include <functional>
#include <random>

#include "bvf/geometry.hpp"
#include "bvf/parallel.hpp"
#include "bvf/products.hpp"

namespace bvf {

/// A bundle-valued form sampled over a chart grid. `margin` counts boundary
/// layers of non-periodic axes whose samples are not meaningful (they grow as
/// finite differences are applied); such nodes hold zeros and are skipped by
/// norms.
struct FormField {
    const ChartGeometry* geom = nullptr;
    int degree = 0;
    ValueKind kind = ValueKind::scalar;
    int q = 0;
    int margin = 0;
    std::vector<double> data;  // node * ncomp * fdim

    FormField() = default;
    FormField(const ChartGeometry& g, int degree_, ValueKind kind_, int q_ = 0, int margin_ = 0)
        : geom(&g), degree(degree_), kind(kind_), q(q_), margin(margin_) {
        data.assign(static_cast<std::size_t>(geom->nodes()) * ncomp() * fdim(), 0.0);
    }

    int n() const { return geom->dim(); }
    int ncomp() const { return static_cast<int>(binomial(n(), degree)); }
    int fdim() const { return fiber_dim(n(), kind, q); }
    long stride() const { return static_cast<long>(ncomp()) * fdim(); }
    bool empty_fiber() const { return stride() == 0; }

    double* node_data(long p) { return data.data() + p * stride(); }
    const double* node_data(long p) const { return data.data() + p * stride(); }

    double& at(long p, int comp, int fib) { return data[p * stride() + static_cast<long>(comp) * fdim() + fib]; }
    double at(long p, int comp, int fib) const { return data[p * stride() + static_cast<long>(comp) * fdim() + fib]; }

    PointForm point(long p) const {
        PointForm f(n(), degree, kind, q);
        const double* src = node_data(p);
        std::copy(src, src + stride(), f.data.begin());
        return f;
    }
    void set_point(long p, const PointForm& f) {
        std::copy(f.data.begin(), f.data.end(), node_data(p));
    }

    double sup_norm() const {
        double m = 0.0;
        const long N = geom->nodes();
        for (long p = 0; p < N; ++p) {
            if (!geom->grid.node_valid(p, margin)) continue;
            const double* d = node_data(p);
            for (long i = 0; i < stride(); ++i) m = std::max(m, std::abs(d[i]));
        }
        return m;
    }

    FormField& operator+=(const FormField& o) {
        require_same_shape(o);
        margin = std::max(margin, o.margin);
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    FormField& operator-=(const FormField& o) {
        require_same_shape(o);
        margin = std::max(margin, o.margin);
        for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
        return *this;
    }
    FormField& operator*=(double s) {
        for (double& v : data) v *= s;
        return *this;
    }

    void require_same_shape(const FormField& o) const {
        if (geom != o.geom || degree != o.degree || kind != o.kind ||
            (kind == ValueKind::poly && q != o.q))
            throw std::invalid_argument("FormField: shape or geometry mismatch");
    }
};

inline FormField operator+(FormField a, const FormField& b) { return a += b; }
inline FormField operator-(FormField a, const FormField& b) { return a -= b; }
inline FormField operator*(double s, FormField a) { return a *= s; }

/// Applies a pointwise operation node by node. All inputs must share one
/// geometry; the output inherits the widest margin.
template <class Op>
FormField lift(Op&& op, const std::vector<const FormField*>& fields) {
    if (fields.empty()) throw std::invalid_argument("lift: no operands");
    const ChartGeometry* geom = fields.front()->geom;
    int margin = 0;
    for (const FormField* f : fields) {
        if (f->geom != geom) throw std::invalid_argument("lift: geometry mismatch between operands");
        margin = std::max(margin, f->margin);
    }
    const long N = geom->nodes();
    FormField out;
    // shape from node 0
    {
        std::vector<PointForm> args;
        args.reserve(fields.size());
        for (const FormField* f : fields) args.push_back(f->point(0));
        PointForm r = op(args);
        out = FormField(*geom, r.degree, r.kind, r.q, margin);
        out.set_point(0, r);
    }
    parallel_for(N, [&](long p) {
        if (p == 0) return;
        std::vector<PointForm> args;
        args.reserve(fields.size());
        for (const FormField* f : fields) args.push_back(f->point(p));
        out.set_point(p, op(args));
    });
    return out;
}

inline FormField f_wedge_scalar(const FormField& a, const FormField& b) {
    return lift([](const std::vector<PointForm>& v) { return wedge_scalar(v[0], v[1]); }, {&a, &b});
}
inline FormField f_wedge_end(const FormField& a, const FormField& b) {
    return lift([](const std::vector<PointForm>& v) { return wedge_end(v[0], v[1]); }, {&a, &b});
}
inline FormField f_wedge_poly(const FormField& a, const FormField& b) {
    return lift([](const std::vector<PointForm>& v) { return wedge_poly(v[0], v[1]); }, {&a, &b});
}
inline FormField f_act_end(const FormField& a, const FormField& b) {
    return lift([](const std::vector<PointForm>& v) { return act_end(v[0], v[1]); }, {&a, &b});
}
inline FormField f_act_poly(const FormField& a, const FormField& b) {
    return lift([](const std::vector<PointForm>& v) { return act_poly(v[0], v[1]); }, {&a, &b});
}

/// Smooth random field built from a few low-frequency Fourier modes, so that
/// samples at different resolutions come from one fixed function.
inline FormField random_smooth_field(const ChartGeometry& geo, int degree, ValueKind kind, int q,
                                     std::uint64_t seed, int modes = 3, double amplitude = 1.0,
                                     int max_freq = 1) {
    FormField out(geo, degree, kind, q);
    if (out.empty_fiber()) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(-max_freq, max_freq);
    const int n = geo.dim();
    const int nc = out.ncomp(), fd = out.fdim();
    struct Mode {
        std::array<int, kMaxDim> k;
        double a, b;
    };
    std::vector<std::vector<Mode>> all(static_cast<std::size_t>(nc) * fd);
    for (auto& m : all) {
        m.resize(modes);
        for (auto& mode : m) {
            for (int a = 0; a < n; ++a) mode.k[a] = freq(rng);
            mode.a = amplitude * coef(rng);
            mode.b = amplitude * coef(rng);
        }
    }
    const long N = geo.nodes();
    parallel_for(N, [&](long p) {
        auto x = geo.grid.position(p);
        double* dst = out.node_data(p);
        for (int c = 0; c < nc; ++c)
            for (int v = 0; v < fd; ++v) {
                double acc = 0.0;
                for (const Mode& m : all[static_cast<std::size_t>(c) * fd + v]) {
                    double phase = 0.0;
                    for (int a = 0; a < n; ++a) phase += m.k[a] * x[a];
                    acc += m.a * std::cos(phase) + m.b * std::sin(phase);
                }
                dst[static_cast<long>(c) * fd + v] = acc;
            }
    });
    return out;
}

}  // namespace bvf
