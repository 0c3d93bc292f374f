#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvf/combinatorics.hpp"

namespace bvf {

enum class ValueKind { scalar, tangent, endo, poly };

inline const char* kind_name(ValueKind k) {
    switch (k) {
        case ValueKind::scalar: return "scalar";
        case ValueKind::tangent: return "tangent";
        case ValueKind::endo: return "endomorphism";
        case ValueKind::poly: return "polyvector";
    }
    return "?";
}

inline int fiber_dim(int n, ValueKind kind, int q) {
    switch (kind) {
        case ValueKind::scalar: return 1;
        case ValueKind::tangent: return n;
        case ValueKind::endo: return n * n;
        case ValueKind::poly: return static_cast<int>(binomial(n, q));
    }
    return 0;
}

/// Polyvector order of a value that can sit on the right of the polyvector
/// products: tangent values count as order 1.
inline int poly_order(ValueKind kind, int q) {
    if (kind == ValueKind::tangent) return 1;
    if (kind == ValueKind::poly) return q;
    throw std::invalid_argument("poly_order: value kind is not polyvector-like");
}

/// A single alternating form with values in a fixed fiber, stored densely over
/// the sorted multi-indices. Degrees above n (or polyvector orders above n)
/// have no components and represent the canonical zero form.
struct PointForm {
    int n = 0;
    int degree = 0;
    ValueKind kind = ValueKind::scalar;
    int q = 0;  // polyvector order, meaningful for kind == poly
    std::vector<double> data;  // ncomp() x fdim()

    PointForm() = default;
    PointForm(int n_, int degree_, ValueKind kind_, int q_ = 0)
        : n(n_), degree(degree_), kind(kind_), q(q_) {
        if (kind == ValueKind::poly && q > 2 && q <= n)
            throw std::invalid_argument("PointForm: polyvector order " + std::to_string(q) +
                                        " unsupported (only 1 and 2 are stored)");
        data.assign(static_cast<std::size_t>(ncomp()) * fdim(), 0.0);
    }

    int ncomp() const { return static_cast<int>(binomial(n, degree)); }
    int fdim() const { return fiber_dim(n, kind, q); }
    bool empty() const { return data.empty(); }

    double& operator()(int comp, int fib) { return data[static_cast<std::size_t>(comp) * fdim() + fib]; }
    double operator()(int comp, int fib) const { return data[static_cast<std::size_t>(comp) * fdim() + fib]; }

    std::span<double> fiber(int comp) {
        return {data.data() + static_cast<std::size_t>(comp) * fdim(), static_cast<std::size_t>(fdim())};
    }
    std::span<const double> fiber(int comp) const {
        return {data.data() + static_cast<std::size_t>(comp) * fdim(), static_cast<std::size_t>(fdim())};
    }

    /// Alternating extension: evaluates the form on `degree` vectors of R^n.
    /// Returns the fiber value.
    std::vector<double> eval(const std::vector<std::vector<double>>& args) const {
        if (static_cast<int>(args.size()) != degree)
            throw std::invalid_argument("PointForm::eval: wrong number of arguments");
        std::vector<double> out(fdim(), 0.0);
        const IndexTable& tab = index_table(n, degree);
        std::vector<double> minor(static_cast<std::size_t>(degree) * degree);
        for (int c = 0; c < tab.count(); ++c) {
            const auto& I = tab.tuple(c);
            for (int a = 0; a < degree; ++a)
                for (int b = 0; b < degree; ++b)
                    minor[a * degree + b] = args[b][I[a]];
            double det = det_small(minor.data(), degree);
            if (det == 0.0) continue;
            auto f = fiber(c);
            for (int v = 0; v < fdim(); ++v) out[v] += det * f[v];
        }
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data) m = std::max(m, std::abs(v));
        return m;
    }

    PointForm& operator+=(const PointForm& o) {
        assert(data.size() == o.data.size());
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    PointForm& operator-=(const PointForm& o) {
        assert(data.size() == o.data.size());
        for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
        return *this;
    }
    PointForm& operator*=(double s) {
        for (double& v : data) v *= s;
        return *this;
    }

};

inline PointForm operator+(PointForm a, const PointForm& b) { return a += b; }
inline PointForm operator-(PointForm a, const PointForm& b) { return a -= b; }
inline PointForm operator*(double s, PointForm a) { return a *= s; }

inline bool same_shape(const PointForm& a, const PointForm& b) {
    return a.n == b.n && a.degree == b.degree && a.kind == b.kind &&
           (a.kind != ValueKind::poly || a.q == b.q);
}

}  // namespace bvf
