#pragma once

#include "bvf/field.hpp"

namespace bvf {

/// Degrees on which the covariant exterior derivative is forced to vanish.
/// The bracket notation [k] zeroes input degree k-1; [1,3] zeroes 0 and 2.
struct DegreeMask {
    std::uint32_t zeroed = 0;

    static DegreeMask none() { return {}; }
    static DegreeMask zero_on(std::initializer_list<int> degrees) {
        DegreeMask m;
        for (int d : degrees) m.zeroed |= 1u << d;
        return m;
    }
    static DegreeMask brackets(std::initializer_list<int> ks) {
        DegreeMask m;
        for (int k : ks) {
            if (k < 1) throw std::invalid_argument("DegreeMask: bracket index must be >= 1");
            m.zeroed |= 1u << (k - 1);
        }
        return m;
    }
    bool zeroes(int degree) const { return degree >= 0 && (zeroed >> degree) & 1u; }
    bool operator==(const DegreeMask&) const = default;
};

/// Componentwise central difference along one axis. Boundary nodes of
/// non-periodic axes are zeroed and the margin grows by one.
inline FormField partial(const FormField& f, int axis) {
    if (axis < 0 || axis >= f.n()) throw std::invalid_argument("partial: axis out of range");
    FormField out(*f.geom, f.degree, f.kind, f.q, f.margin + 1);
    const long N = f.geom->nodes();
    const long S = f.stride();
    const double inv2h = 1.0 / (2.0 * f.geom->grid.h[axis]);
    parallel_for(N, [&](long p) {
        bool okm = false, okp = false;
        long pm = f.geom->grid.shifted(p, axis, -1, okm);
        long pp = f.geom->grid.shifted(p, axis, +1, okp);
        if (!okm || !okp) return;
        const double* a = f.node_data(pm);
        const double* b = f.node_data(pp);
        double* dst = out.node_data(p);
        for (long i = 0; i < S; ++i) dst[i] = (b[i] - a[i]) * inv2h;
    });
    return out;
}

/// [X,Y]^c = X^a d_a Y^c - Y^a d_a X^c for vector fields (degree-0 tangent).
inline FormField lie_bracket(const FormField& X, const FormField& Y) {
    if (X.degree != 0 || Y.degree != 0 || X.kind != ValueKind::tangent || Y.kind != ValueKind::tangent)
        throw std::invalid_argument("lie_bracket: expects two vector fields");
    X.require_same_shape(Y);
    const int n = X.n();
    const ChartGeometry& geo = *X.geom;
    FormField out(geo, 0, ValueKind::tangent, 0, std::max(X.margin, Y.margin) + 1);
    const long N = geo.nodes();
    parallel_for(N, [&](long p) {
        double* dst = out.node_data(p);
        for (int a = 0; a < n; ++a) {
            bool okm = false, okp = false;
            long pm = geo.grid.shifted(p, a, -1, okm);
            long pp = geo.grid.shifted(p, a, +1, okp);
            if (!okm || !okp) {
                for (int c = 0; c < n; ++c) dst[c] = 0.0;
                return;
            }
            const double inv2h = 1.0 / (2.0 * geo.grid.h[a]);
            const double xa = X.at(p, 0, a);
            const double ya = Y.at(p, 0, a);
            for (int c = 0; c < n; ++c) {
                const double dYc = (Y.at(pp, 0, c) - Y.at(pm, 0, c)) * inv2h;
                const double dXc = (X.at(pp, 0, c) - X.at(pm, 0, c)) * inv2h;
                dst[c] += xa * dYc - ya * dXc;
            }
        }
    });
    return out;
}

namespace detail {

/// Connection action on the value fiber: tangent values get Gamma_a applied;
/// order-2 polyvectors get the induced (Leibniz) action; scalars are inert.
inline void value_connection(const ChartGeometry& geo, long p, int a, ValueKind kind, int n,
                             const IndexTable& pair_tab, const double* src, double* dst) {
    if (kind == ValueKind::tangent) {
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int d = 0; d < n; ++d) acc += geo.christoffel(p, c, a, d) * src[d];
            dst[c] += acc;
        }
    } else if (kind == ValueKind::poly) {
        for (int ck = 0; ck < pair_tab.count(); ++ck) {
            const auto& K = pair_tab.tuple(ck);
            const double v = src[ck];
            if (v == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                // nabla'_a (e_k1 ^ e_k2) = Gamma^c_{a k1} e_c ^ e_k2 + Gamma^c_{a k2} e_k1 ^ e_c
                if (c != K[1]) {
                    const int mask = (1 << c) | (1 << K[1]);
                    const double s = (c < K[1]) ? 1.0 : -1.0;
                    dst[pair_tab.rank(mask)] += s * geo.christoffel(p, c, a, K[0]) * v;
                }
                if (c != K[0]) {
                    const int mask = (1 << K[0]) | (1 << c);
                    const double s = (K[0] < c) ? 1.0 : -1.0;
                    dst[pair_tab.rank(mask)] += s * geo.christoffel(p, c, a, K[1]) * v;
                }
            }
        }
    }
}

}  // namespace detail

/// Covariant exterior derivative in the coordinate frame:
/// (d gamma)_R = sum_j (-1)^j (nabla_{R[j]} gamma)_{R minus R[j]}.
/// Scalar values reduce to the de Rham differential; order-2 polyvector values
/// use the induced connection. Masked input degrees map to zero.
inline FormField dnabla(const FormField& f, DegreeMask mask = DegreeMask::none()) {
    if (f.kind == ValueKind::endo)
        throw std::invalid_argument("dnabla: endomorphism-valued forms are not supported");
    const ChartGeometry& geo = *f.geom;
    const int n = f.n();
    const int k = f.degree;
    if (mask.zeroes(k)) return FormField(geo, k + 1, f.kind, f.q, f.margin);
    FormField out(geo, k + 1, f.kind, f.q, f.margin + 1);
    if (out.empty_fiber() || f.empty_fiber()) return out;

    const IndexTable& tab_in = index_table(n, k);
    const IndexTable& tab_out = index_table(n, k + 1);
    const IndexTable& pair_tab = index_table(n, 2);
    const int nc_in = tab_in.count();
    const int fd = f.fdim();
    const bool with_connection = f.kind != ValueKind::scalar;
    const long N = geo.nodes();

    parallel_for(N, [&](long p) {
        // nabla_a gamma, all axes at this node
        std::vector<double> nab(static_cast<std::size_t>(n) * nc_in * fd, 0.0);
        std::vector<int> scratch;
        for (int a = 0; a < n; ++a) {
            bool okm = false, okp = false;
            long pm = geo.grid.shifted(p, a, -1, okm);
            long pp = geo.grid.shifted(p, a, +1, okp);
            if (!okm || !okp) return;  // boundary: stays zero, masked by margin
            const double inv2h = 1.0 / (2.0 * geo.grid.h[a]);
            const double* fm = f.node_data(pm);
            const double* fp = f.node_data(pp);
            double* na = nab.data() + static_cast<std::size_t>(a) * nc_in * fd;
            for (int i = 0; i < nc_in * fd; ++i) na[i] = (fp[i] - fm[i]) * inv2h;
            if (!with_connection) continue;
            const double* fc = f.node_data(p);
            for (int ci = 0; ci < nc_in; ++ci)
                detail::value_connection(geo, p, a, f.kind, n, pair_tab, fc + ci * fd, na + ci * fd);
            // index connection: -(Gamma^d_{a i_m}) gamma_{I with i_m -> d}
            for (int ci = 0; ci < nc_in; ++ci) {
                const auto& I = tab_in.tuple(ci);
                for (int m = 0; m < k; ++m)
                    for (int d = 0; d < n; ++d) {
                        const double G = geo.christoffel(p, d, a, I[m]);
                        if (G == 0.0) continue;
                        scratch.assign(I.begin(), I.end());
                        scratch[m] = d;
                        int sg = canonicalize(scratch, n);
                        if (sg == 0) continue;
                        int mask_t = 0;
                        for (int v : scratch) mask_t |= 1 << v;
                        const double* srcf = fc + static_cast<std::size_t>(tab_in.rank(mask_t)) * fd;
                        double* dstf = na + static_cast<std::size_t>(ci) * fd;
                        for (int v = 0; v < fd; ++v) dstf[v] -= sg * G * srcf[v];
                    }
            }
        }
        double* dst = out.node_data(p);
        for (int r = 0; r < tab_out.count(); ++r) {
            const auto& R = tab_out.tuple(r);
            double* dr = dst + static_cast<std::size_t>(r) * fd;
            for (int j = 0; j <= k; ++j) {
                int mask_rm = 0;
                for (int t = 0; t <= k; ++t)
                    if (t != j) mask_rm |= 1 << R[t];
                const double* src =
                    nab.data() + (static_cast<std::size_t>(R[j]) * nc_in + tab_in.rank(mask_rm)) * fd;
                const double s = (j & 1) ? -1.0 : 1.0;
                for (int v = 0; v < fd; ++v) dr[v] += s * src[v];
            }
        }
    });
    return out;
}

/// Samples of nabla A for a degree-1 tangent field, laid out as
/// (nabla_i A)^c_j at [((p*n + i)*n + j)*n + c].
struct Rank3Field {
    const ChartGeometry* geom = nullptr;
    int margin = 0;
    std::vector<double> data;

    double at(long p, int i, int j, int c) const {
        const int n = geom->dim();
        return data[((p * n + i) * static_cast<long>(n) + j) * n + c];
    }
    double sup_norm() const {
        double m = 0.0;
        const int n = geom->dim();
        const long block = static_cast<long>(n) * n * n;
        for (long p = 0; p < geom->nodes(); ++p) {
            if (!geom->grid.node_valid(p, margin)) continue;
            for (long i = 0; i < block; ++i) m = std::max(m, std::abs(data[p * block + i]));
        }
        return m;
    }
};

inline Rank3Field cov_derivative(const FormField& A) {
    if (A.degree != 1 || A.kind != ValueKind::tangent)
        throw std::invalid_argument("cov_derivative: expects a degree-1 tangent field");
    const ChartGeometry& geo = *A.geom;
    const int n = A.n();
    Rank3Field out;
    out.geom = &geo;
    out.margin = A.margin + 1;
    out.data.assign(geo.nodes() * static_cast<long>(n) * n * n, 0.0);
    const long N = geo.nodes();
    parallel_for(N, [&](long p) {
        for (int i = 0; i < n; ++i) {
            bool okm = false, okp = false;
            long pm = geo.grid.shifted(p, i, -1, okm);
            long pp = geo.grid.shifted(p, i, +1, okp);
            if (!okm || !okp) return;
            const double inv2h = 1.0 / (2.0 * geo.grid.h[i]);
            for (int j = 0; j < n; ++j)
                for (int c = 0; c < n; ++c) {
                    double v = (A.at(pp, j, c) - A.at(pm, j, c)) * inv2h;
                    for (int d = 0; d < n; ++d) {
                        v += geo.christoffel(p, c, i, d) * A.at(p, j, d);
                        v -= geo.christoffel(p, d, i, j) * A.at(p, d, c);
                    }
                    out.data[((p * n + i) * static_cast<long>(n) + j) * n + c] = v;
                }
        }
    });
    return out;
}

/// N(X,Y) = [AX, AY] - A([AX,Y] + [X,AY]) - [X,Y] for vector fields X, Y.
inline FormField nijenhuis(const FormField& A, const FormField& X, const FormField& Y) {
    if (A.degree != 1 || A.kind != ValueKind::tangent)
        throw std::invalid_argument("nijenhuis: A must be a degree-1 tangent field");
    auto apply_A = [&](const FormField& V) {
        FormField out(*A.geom, 0, ValueKind::tangent, 0, std::max(A.margin, V.margin));
        const int n = A.n();
        parallel_for(A.geom->nodes(), [&](long p) {
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i) acc += A.at(p, i, c) * V.at(p, 0, i);
                out.at(p, 0, c) = acc;
            }
        });
        return out;
    };
    FormField AX = apply_A(X), AY = apply_A(Y);
    FormField t1 = lie_bracket(AX, AY);
    FormField t2 = apply_A(lie_bracket(AX, Y) + lie_bracket(X, AY));
    FormField t3 = lie_bracket(X, Y);
    return t1 - t2 - t3;
}

/// Nijenhuis tensor assembled on coordinate pairs:
/// N_{ij} = [A_i, A_j] - A(d_i A_j - d_j A_i), A_i the i-th column field.
inline FormField nijenhuis_tensor(const FormField& A) {
    if (A.degree != 1 || A.kind != ValueKind::tangent)
        throw std::invalid_argument("nijenhuis_tensor: expects a degree-1 tangent field");
    const ChartGeometry& geo = *A.geom;
    const int n = A.n();
    FormField out(geo, 2, ValueKind::tangent, 0, A.margin + 1);
    const IndexTable& tab = index_table(n, 2);
    const long N = geo.nodes();
    parallel_for(N, [&](long p) {
        // dA[a][j][c] = d_a A^c_j
        std::vector<double> dA(static_cast<std::size_t>(n) * n * n);
        for (int a = 0; a < n; ++a) {
            bool okm = false, okp = false;
            long pm = geo.grid.shifted(p, a, -1, okm);
            long pp = geo.grid.shifted(p, a, +1, okp);
            if (!okm || !okp) return;
            const double inv2h = 1.0 / (2.0 * geo.grid.h[a]);
            for (int j = 0; j < n; ++j)
                for (int c = 0; c < n; ++c)
                    dA[(a * n + j) * static_cast<std::size_t>(n) + c] =
                        (A.at(pp, j, c) - A.at(pm, j, c)) * inv2h;
        }
        for (int r = 0; r < tab.count(); ++r) {
            const int i = tab.tuple(r)[0], j = tab.tuple(r)[1];
            for (int c = 0; c < n; ++c) {
                double v = 0.0;
                for (int a = 0; a < n; ++a) {
                    // [A_i, A_j]^c
                    v += A.at(p, i, a) * dA[(a * n + j) * static_cast<std::size_t>(n) + c];
                    v -= A.at(p, j, a) * dA[(a * n + i) * static_cast<std::size_t>(n) + c];
                    // - A(d_i A_j - d_j A_i)^c
                    v -= A.at(p, a, c) * (dA[(i * n + j) * static_cast<std::size_t>(n) + a] -
                                          dA[(j * n + i) * static_cast<std::size_t>(n) + a]);
                }
                out.at(p, r, c) = v;
            }
        }
    });
    return out;
}

}  // namespace bvf
