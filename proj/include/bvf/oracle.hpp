#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "bvf/point_form.hpp"

namespace bvf::oracle {

/// Reference implementations of the graded products as literal sums over all
/// (k+l)! permutations on dense multilinear tensors, with no canonical-storage
/// shortcuts. Slow by construction; used to cross-check the shuffle-based
/// products and by the algebra verification suite.

/// Dense k-linear alternating tensor with a flat value fiber: entry(args, v)
/// for every tuple in [0,n)^k.
struct DenseForm {
    int n = 0, k = 0, fdim = 0;
    std::vector<double> data;  // n^k * fdim

    DenseForm(int n_, int k_, int fdim_) : n(n_), k(k_), fdim(fdim_) {
        std::size_t sz = fdim;
        for (int i = 0; i < k; ++i) sz *= n;
        data.assign(sz, 0.0);
    }
    std::size_t offset(const std::vector<int>& idx) const {
        std::size_t o = 0;
        for (int i = 0; i < k; ++i) o = o * n + idx[i];
        return o * fdim;
    }
    double* at(const std::vector<int>& idx) { return data.data() + offset(idx); }
    const double* at(const std::vector<int>& idx) const { return data.data() + offset(idx); }
};

/// Expands canonical storage to the dense alternating extension.
inline DenseForm densify(const PointForm& f) {
    DenseForm out(f.n, f.degree, std::max(1, f.fdim()));
    if (f.empty()) return out;
    std::vector<int> idx(f.degree, 0);
    const IndexTable& tab = index_table(f.n, f.degree);
    while (true) {
        std::vector<int> sorted = idx;
        int sign = canonicalize(sorted, f.n);
        if (sign != 0) {
            int mask = 0;
            for (int v : sorted) mask |= 1 << v;
            auto src = f.fiber(tab.rank(mask));
            double* dst = out.at(idx);
            for (int v = 0; v < f.fdim(); ++v) dst[v] = sign * src[v];
        }
        int a = f.degree - 1;
        while (a >= 0 && ++idx[a] == f.n) idx[a--] = 0;
        if (a < 0) break;
    }
    return out;
}

inline int perm_sign(const std::vector<int>& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

inline double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// Literal permutation-sum product. `combine(fa, fb, out, scale)` accumulates
/// the value combination of the two dense fibers. Evaluates only on sorted
/// output tuples, which determines the alternating result.
template <class Combine>
PointForm permutation_product(const PointForm& a, const PointForm& b, ValueKind out_kind, int out_q,
                              double normalization, Combine&& combine) {
    const int n = a.n;
    const int deg = a.degree + b.degree;
    PointForm out(n, deg, out_kind, out_q);
    if (out.empty() || a.empty() || b.empty()) return out;
    DenseForm da = densify(a), db = densify(b);
    const IndexTable& tab = index_table(n, deg);
    std::vector<int> perm(deg), args_a(a.degree), args_b(b.degree);
    for (int r = 0; r < tab.count(); ++r) {
        const auto& R = tab.tuple(r);
        std::iota(perm.begin(), perm.end(), 0);
        auto dst = out.fiber(r);
        do {
            const int sg = perm_sign(perm);
            for (int i = 0; i < a.degree; ++i) args_a[i] = R[perm[i]];
            for (int i = 0; i < b.degree; ++i) args_b[i] = R[perm[a.degree + i]];
            combine(da.at(args_a), db.at(args_b), dst, sg * normalization);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return out;
}

inline PointForm wedge_scalar(const PointForm& beta, const PointForm& B) {
    const double norm = 1.0 / (factorial(beta.degree) * factorial(B.degree));
    return permutation_product(beta, B, B.kind, B.q, norm,
                               [&](const double* fa, const double* fb, std::span<double> dst, double s) {
                                   for (std::size_t v = 0; v < dst.size(); ++v) dst[v] += s * fa[0] * fb[v];
                               });
}

inline PointForm wedge_end(const PointForm& a, const PointForm& b) {
    const int n = a.n;
    const double norm = 1.0 / (factorial(a.degree) * factorial(b.degree));
    return permutation_product(a, b, ValueKind::endo, 0, norm,
                               [n](const double* fa, const double* fb, std::span<double> dst, double s) {
                                   for (int i = 0; i < n; ++i)
                                       for (int j = 0; j < n; ++j) {
                                           double acc = 0.0;
                                           for (int l = 0; l < n; ++l) acc += fa[i * n + l] * fb[l * n + j];
                                           dst[i * n + j] += s * acc;
                                       }
                               });
}

inline PointForm act_end(const PointForm& a, const PointForm& rho) {
    const int n = a.n;
    const double norm = 1.0 / (factorial(a.degree) * factorial(rho.degree));
    return permutation_product(a, rho, ValueKind::tangent, 0, norm,
                               [n](const double* fa, const double* fb, std::span<double> dst, double s) {
                                   for (int i = 0; i < n; ++i) {
                                       double acc = 0.0;
                                       for (int l = 0; l < n; ++l) acc += fa[i * n + l] * fb[l];
                                       dst[i] += s * acc;
                                   }
                               });
}

/// Dense polyvector wedge of order-1 values, producing the dense order-2
/// antisymmetric array.
inline PointForm wedge_poly(const PointForm& a, const PointForm& b) {
    const int n = a.n;
    const int qa = poly_order(a.kind, a.q), qb = poly_order(b.kind, b.q);
    if (qa != 1 || qb != 1) throw std::invalid_argument("oracle::wedge_poly: order-1 factors only");
    if (a.degree + b.degree > n || qa + qb > n)
        return PointForm(n, std::min(a.degree + b.degree, n + 1), ValueKind::poly, qa + qb);
    const IndexTable& pairs = index_table(n, 2);
    const double norm = 0.5 / (factorial(a.degree) * factorial(b.degree));
    return permutation_product(a, b, ValueKind::poly, 2, norm,
                               [&](const double* fa, const double* fb, std::span<double> dst, double s) {
                                   for (int c = 0; c < pairs.count(); ++c) {
                                       const auto& K = pairs.tuple(c);
                                       dst[c] += s * (fa[K[0]] * fb[K[1]] - fa[K[1]] * fb[K[0]]);
                                   }
                               });
}

/// Right action: contracts the trailing j slots of the dense rho against the
/// dense antisymmetric value of gamma, via the double-sum pairing
/// psi(x) = (1/j!) sum_{p_1..p_j} psi_{p...} x_{p...}.
inline PointForm act_poly(const PointForm& rho, const PointForm& gamma) {
    const int n = rho.n;
    const int j = poly_order(gamma.kind, gamma.q);
    const int s = rho.degree;
    if (s < j) return PointForm(n, 0, ValueKind::tangent);
    const int out_deg = s - j + gamma.degree;
    PointForm out(n, out_deg, ValueKind::tangent, 0);
    if (out.empty() || rho.empty() || gamma.empty()) return out;

    DenseForm drho = densify(rho);
    DenseForm dg = densify(gamma);  // fiber over sorted value tuples
    const IndexTable& val_tab = index_table(n, j);
    const IndexTable& tab = index_table(n, out_deg);
    const double norm = 1.0 / (factorial(s - j) * factorial(gamma.degree));
    const double val_norm = 1.0 / factorial(j);
    std::vector<int> perm(out_deg), args_first(s - j), args_g(gamma.degree), full(s), K(j);
    for (int r = 0; r < tab.count(); ++r) {
        const auto& R = tab.tuple(r);
        std::iota(perm.begin(), perm.end(), 0);
        auto dst = out.fiber(r);
        do {
            const int sg = perm_sign(perm);
            for (int i = 0; i < s - j; ++i) args_first[i] = R[perm[i]];
            for (int i = 0; i < gamma.degree; ++i) args_g[i] = R[perm[s - j + i]];
            const double* gval = dg.at(args_g);  // sorted-tuple components
            // fully dense pairing psi(x) = (1/j!) sum over all value tuples
            std::fill(K.begin(), K.end(), 0);
            while (true) {
                std::vector<int> Ks = K;
                const int ks = canonicalize(Ks, n);
                if (ks != 0) {
                    int kmask = 0;
                    for (int v : Ks) kmask |= 1 << v;
                    const double xval = ks * gval[val_tab.rank(kmask)];  // alternating extension
                    std::copy(args_first.begin(), args_first.end(), full.begin());
                    std::copy(K.begin(), K.end(), full.begin() + (s - j));
                    const double* rv = drho.at(full);
                    const double c = sg * norm * val_norm * xval;
                    for (int v = 0; v < n; ++v) dst[v] += c * rv[v];
                }
                int a = j - 1;
                while (a >= 0 && ++K[a] == n) K[a--] = 0;
                if (a < 0) break;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return out;
}

inline PointForm random_form(std::mt19937_64& rng, int n, int degree, ValueKind kind, int q = 0) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    PointForm f(n, degree, kind, q);
    for (double& v : f.data) v = dist(rng);
    return f;
}

}  // namespace bvf::oracle
