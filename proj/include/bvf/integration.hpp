#pragma once

#include "bvf/calculus.hpp"

namespace bvf {

namespace detail {

/// det(g[P,Q]) for sorted index tuples P, Q (covariant Gram of Lambda^p T).
inline double gram_minor(const double* g, int n, const std::vector<int>& P, const std::vector<int>& Q) {
    const int p = static_cast<int>(P.size());
    double buf[36];
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) buf[a * p + b] = g[P[a] * n + Q[b]];
    return det_small(buf, p);
}

/// Fiber pairing of two value vectors at one node.
inline double value_pairing(const ChartGeometry& geo, long node, ValueKind kind, int q,
                            const double* u, const double* v) {
    const int n = geo.dim();
    switch (kind) {
        case ValueKind::scalar: return u[0] * v[0];
        case ValueKind::tangent: {
            if (geo.identity_metric) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i) acc += u[i] * v[i];
                return acc;
            }
            const double* g = geo.g.data() + node * n * n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) acc += g[i * n + j] * u[i] * v[j];
            return acc;
        }
        case ValueKind::poly: {
            const IndexTable& tab = index_table(n, q);
            if (geo.identity_metric) {
                double acc = 0.0;
                for (int c = 0; c < tab.count(); ++c) acc += u[c] * v[c];
                return acc;
            }
            const double* g = geo.g.data() + node * n * n;
            double acc = 0.0;
            for (int a = 0; a < tab.count(); ++a)
                for (int b = 0; b < tab.count(); ++b)
                    acc += gram_minor(g, n, tab.tuple(a), tab.tuple(b)) * u[a] * v[b];
            return acc;
        }
        case ValueKind::endo:
            throw std::invalid_argument("value_pairing: endomorphism values have no metric pairing here");
    }
    return 0.0;
}

}  // namespace detail

/// Per-node Gram matrices of the induced metric on Lambda^p T in the sorted
/// polyvector basis, entries det(g(v_i, w_j)).
struct FiberGram {
    const ChartGeometry* geom = nullptr;
    int p = 1;
    int dim = 0;
    std::vector<double> data;  // node * dim * dim

    Eigen::Map<const Eigen::MatrixXd> at(long node) const {
        return {data.data() + static_cast<long>(node) * dim * dim, dim, dim};
    }
};

inline FiberGram make_fiber_gram(const ChartGeometry& geo, int p) {
    if (p < 1 || p > 2) throw std::invalid_argument("make_fiber_gram: order must be 1 or 2");
    FiberGram out;
    out.geom = &geo;
    out.p = p;
    const int n = geo.dim();
    const IndexTable& tab = index_table(n, p);
    out.dim = tab.count();
    out.data.resize(geo.nodes() * static_cast<long>(out.dim) * out.dim);
    parallel_for(geo.nodes(), [&](long node) {
        const double* g = geo.g.data() + node * n * n;
        double* dst = out.data.data() + node * static_cast<long>(out.dim) * out.dim;
        for (int a = 0; a < out.dim; ++a)
            for (int b = 0; b < out.dim; ++b)
                dst[a * out.dim + b] = detail::gram_minor(g, n, tab.tuple(a), tab.tuple(b));
    });
    return out;
}

/// Per-node frame E with E^T g E = Id (Cholesky based) and its inverse.
struct OrthonormalFrame {
    const ChartGeometry* geom = nullptr;
    std::vector<double> frame;      // node * n * n, columns are frame vectors
    std::vector<double> frame_inv;  // node * n * n

    Eigen::Map<const Eigen::MatrixXd> at(long node) const {
        const int n = geom->dim();
        return {frame.data() + node * n * n, n, n};
    }
    Eigen::Map<const Eigen::MatrixXd> inv_at(long node) const {
        const int n = geom->dim();
        return {frame_inv.data() + node * n * n, n, n};
    }
};

inline OrthonormalFrame make_orthonormal_frame(const ChartGeometry& geo) {
    OrthonormalFrame out;
    out.geom = &geo;
    const int n = geo.dim();
    out.frame.resize(geo.nodes() * static_cast<long>(n) * n);
    out.frame_inv.resize(geo.nodes() * static_cast<long>(n) * n);
    parallel_for(geo.nodes(), [&](long p) {
        Eigen::Map<const Eigen::MatrixXd> G(geo.g.data() + p * n * n, n, n);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        Eigen::MatrixXd L = llt.matrixL();
        Eigen::MatrixXd E = L.transpose().inverse();
        Eigen::Map<Eigen::MatrixXd>(out.frame.data() + p * n * n, n, n) = E;
        Eigen::Map<Eigen::MatrixXd>(out.frame_inv.data() + p * n * n, n, n) = E.inverse();
    });
    return out;
}

/// alpha wedge_g beta: scalar wedge of the component forms weighted by the
/// induced metric on the polyvector value basis.
inline FormField wedge_g(const FormField& a, const FormField& b) {
    if (a.geom != b.geom) throw std::invalid_argument("wedge_g: geometry mismatch");
    const int pa = poly_order(a.kind, a.q), pb = poly_order(b.kind, b.q);
    if (pa != pb) throw std::invalid_argument("wedge_g: polyvector order mismatch");
    const ChartGeometry& geo = *a.geom;
    const int n = geo.dim();
    FormField out(geo, a.degree + b.degree, ValueKind::scalar, 0, std::max(a.margin, b.margin));
    if (out.empty_fiber() || a.empty_fiber() || b.empty_fiber()) return out;
    const IndexTable& tab_out = index_table(n, out.degree);
    const IndexTable& val_tab = index_table(n, pa);
    const int vd = val_tab.count();
    parallel_for(geo.nodes(), [&](long node) {
        const double* g = geo.g.data() + node * n * n;
        // value-basis Gram at this node
        double gram[225];
        if (geo.identity_metric) {
            for (int u = 0; u < vd; ++u)
                for (int v = 0; v < vd; ++v) gram[u * vd + v] = (u == v) ? 1.0 : 0.0;
        } else {
            for (int u = 0; u < vd; ++u)
                for (int v = 0; v < vd; ++v)
                    gram[u * vd + v] = detail::gram_minor(g, n, val_tab.tuple(u), val_tab.tuple(v));
        }
        for (int r = 0; r < tab_out.count(); ++r) {
            const auto& R = tab_out.tuple(r);
            double acc = 0.0;
            for_each_split(n, R, a.degree, [&](int ra, int rb, int sign) {
                const double* fa = a.node_data(node) + static_cast<long>(ra) * vd;
                const double* fb = b.node_data(node) + static_cast<long>(rb) * vd;
                double s = 0.0;
                for (int u = 0; u < vd; ++u)
                    for (int v = 0; v < vd; ++v) s += gram[u * vd + v] * fa[u] * fb[v];
                acc += sign * s;
            });
            out.at(node, r, 0) = acc;
        }
    });
    return out;
}

/// Pointwise fiber inner product <a, b>_g as a scalar 0-form.
inline FormField fiber_inner(const FormField& a, const FormField& b) {
    if (a.geom != b.geom) throw std::invalid_argument("fiber_inner: geometry mismatch");
    if (a.degree != b.degree) throw std::invalid_argument("fiber_inner: degree mismatch");
    if (a.kind != b.kind || (a.kind == ValueKind::poly && a.q != b.q))
        throw std::invalid_argument("fiber_inner: value kind mismatch");
    const ChartGeometry& geo = *a.geom;
    const int n = geo.dim();
    FormField out(geo, 0, ValueKind::scalar, 0, std::max(a.margin, b.margin));
    if (a.empty_fiber()) return out;
    const IndexTable& tab = index_table(n, a.degree);
    const int fd = a.fdim();
    parallel_for(geo.nodes(), [&](long node) {
        double acc = 0.0;
        if (geo.identity_metric) {
            const double* fa = a.node_data(node);
            const double* fb = b.node_data(node);
            for (long i = 0; i < a.stride(); ++i) acc += fa[i] * fb[i];
        } else {
            const double* ginv = geo.g_inv.data() + node * n * n;
            for (int ci = 0; ci < tab.count(); ++ci)
                for (int cj = 0; cj < tab.count(); ++cj) {
                    const double w = detail::gram_minor(ginv, n, tab.tuple(ci), tab.tuple(cj));
                    if (w == 0.0) continue;
                    acc += w * detail::value_pairing(geo, node, a.kind, a.q,
                                                     a.node_data(node) + static_cast<long>(ci) * fd,
                                                     b.node_data(node) + static_cast<long>(cj) * fd);
                }
        }
        out.at(node, 0, 0) = acc;
    });
    return out;
}

/// Extended Hodge star: the scalar star on the form part, the identity on the
/// value part. Satisfies a wedge_g (star b) = <a, b>_g vol_g.
inline FormField hodge_star(const FormField& f) {
    const ChartGeometry& geo = *f.geom;
    const int n = geo.dim();
    const int k = f.degree;
    if (k < 0 || k > n) throw std::invalid_argument("hodge_star: degree out of range");
    FormField out(geo, n - k, f.kind, f.q, f.margin);
    if (f.empty_fiber()) return out;
    const IndexTable& tab_in = index_table(n, k);
    const IndexTable& tab_out = index_table(n, n - k);
    const int fd = f.fdim();

    // star coefficients: (star f)_K = sqrtg * eps(K^c, K) * sum_J det(ginv[K^c, J]) f_J
    std::vector<int> eps(tab_out.count());
    std::vector<int> comp_rank(tab_out.count());
    for (int r = 0; r < tab_out.count(); ++r) {
        const auto& K = tab_out.tuple(r);
        std::vector<int> Kc = complement_tuple(n, K);
        int mask = 0;
        eps[r] = merge_sign(Kc, K, mask);
        int cmask = 0;
        for (int v : Kc) cmask |= 1 << v;
        comp_rank[r] = tab_in.rank(cmask);
    }
    parallel_for(geo.nodes(), [&](long node) {
        double* dst = out.node_data(node);
        if (geo.identity_metric) {
            for (int r = 0; r < tab_out.count(); ++r) {
                const double s = eps[r];
                const double* src = f.node_data(node) + static_cast<long>(comp_rank[r]) * fd;
                for (int v = 0; v < fd; ++v) dst[r * fd + v] = s * src[v];
            }
            return;
        }
        const double* ginv = geo.g_inv.data() + node * n * n;
        const double sg = geo.sqrtg[node];
        for (int r = 0; r < tab_out.count(); ++r) {
            const auto& Kc = tab_in.tuple(comp_rank[r]);
            for (int j = 0; j < tab_in.count(); ++j) {
                const double w = sg * eps[r] * detail::gram_minor(ginv, n, Kc, tab_in.tuple(j));
                if (w == 0.0) continue;
                const double* src = f.node_data(node) + static_cast<long>(j) * fd;
                for (int v = 0; v < fd; ++v) dst[r * fd + v] += w * src[v];
            }
        }
    });
    return out;
}

/// Degree-wise L2 inner product over an all-periodic chart:
/// integral of <a, b>_g vol_g by the trapezoid rule (node order fixed).
inline double l2_inner(const FormField& a, const FormField& b) {
    const ChartGeometry& geo = *a.geom;
    const double w = geo.node_weight();
    FormField dens = fiber_inner(a, b);
    double acc = 0.0;
    for (long p = 0; p < geo.nodes(); ++p) acc += dens.at(p, 0, 0) * geo.sqrtg[p];
    return acc * w;
}

inline double l2_norm(const FormField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

/// Codifferential -star d star (n even), the formal adjoint of the covariant
/// exterior derivative for metric connections. Masked output degrees vanish.
inline FormField codifferential(const FormField& f, DegreeMask mask = DegreeMask::none()) {
    const ChartGeometry& geo = *f.geom;
    if (geo.connection != ConnectionKind::levi_civita)
        throw std::runtime_error("codifferential: formal adjoint implemented for metric connections only");
    const int k = f.degree;
    if (k <= 0) return FormField(geo, 0, f.kind, f.q, f.margin);
    if (mask.zeroes(k - 1)) return FormField(geo, k - 1, f.kind, f.q, f.margin);
    return -1.0 * hodge_star(dnabla(hodge_star(f)));
}

}  // namespace bvf
