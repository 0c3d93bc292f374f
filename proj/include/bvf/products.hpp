#pragma once

#include "bvf/point_form.hpp"

namespace bvf {

namespace detail {

inline void check_same_n(const PointForm& a, const PointForm& b, const char* op) {
    if (a.n != b.n) throw std::invalid_argument(std::string(op) + ": ambient dimension mismatch");
}

/// Shuffle-sum skeleton shared by all graded products: for every sorted output
/// index R of degree ka+kb, accumulates sign * combine(fiber_a, fiber_b, out)
/// over the (ka, kb) shuffles of R. The per-block permutations of the literal
/// sum over S_{ka+kb} collapse against the 1/ka!kb! normalization because both
/// factors are alternating.
template <class Combine>
PointForm shuffle_product(const PointForm& a, const PointForm& b, ValueKind out_kind, int out_q,
                          Combine&& combine) {
    PointForm out(a.n, a.degree + b.degree, out_kind, out_q);
    if (out.empty() || a.empty() || b.empty()) return out;
    const IndexTable& tab_out = index_table(a.n, out.degree);
    for (int r = 0; r < tab_out.count(); ++r) {
        const auto& R = tab_out.tuple(r);
        auto dst = out.fiber(r);
        for_each_split(a.n, R, a.degree, [&](int ra, int rb, int sign) {
            combine(a.fiber(ra), b.fiber(rb), sign, dst);
        });
    }
    return out;
}

}  // namespace detail

/// beta ^ B for a scalar-valued form beta: values of B are scaled by the
/// values of beta.
inline PointForm wedge_scalar(const PointForm& beta, const PointForm& B) {
    detail::check_same_n(beta, B, "wedge_scalar");
    if (beta.kind != ValueKind::scalar) throw std::invalid_argument("wedge_scalar: left factor must be scalar-valued");
    return detail::shuffle_product(beta, B, B.kind, B.q,
                                   [](std::span<const double> fb, std::span<const double> fB, int sign,
                                      std::span<double> dst) {
                                       const double s = sign * fb[0];
                                       for (std::size_t v = 0; v < dst.size(); ++v) dst[v] += s * fB[v];
                                   });
}

/// Product of endomorphism-valued forms; values combine by composition.
inline PointForm wedge_end(const PointForm& a, const PointForm& b) {
    detail::check_same_n(a, b, "wedge_end");
    if (a.kind != ValueKind::endo || b.kind != ValueKind::endo)
        throw std::invalid_argument("wedge_end: both factors must be endomorphism-valued");
    const int n = a.n;
    return detail::shuffle_product(a, b, ValueKind::endo, 0,
                                   [n](std::span<const double> fa, std::span<const double> fb, int sign,
                                       std::span<double> dst) {
                                       for (int i = 0; i < n; ++i)
                                           for (int j = 0; j < n; ++j) {
                                               double acc = 0.0;
                                               for (int l = 0; l < n; ++l) acc += fa[i * n + l] * fb[l * n + j];
                                               dst[i * n + j] += sign * acc;
                                           }
                                   });
}

/// Product of polyvector-valued forms (tangent values count as order-1
/// polyvectors). Carries the extra 1/2 normalization; values combine by the
/// polyvector wedge. Only outputs of order <= 2 are representable; whenever
/// either grading overflows the dimension the zero form comes back.
inline PointForm wedge_poly(const PointForm& a, const PointForm& b) {
    detail::check_same_n(a, b, "wedge_poly");
    const int ja = poly_order(a.kind, a.q);
    const int jb = poly_order(b.kind, b.q);
    const int n = a.n;
    const int out_q = ja + jb;
    if (out_q > n || a.degree + b.degree > n)
        return PointForm(n, std::min(a.degree + b.degree, n + 1), ValueKind::poly, out_q);
    if (ja != 1 || jb != 1)
        throw std::invalid_argument("wedge_poly: only order-1 factors are supported");
    const IndexTable& pairs = index_table(n, 2);
    return detail::shuffle_product(
        a, b, ValueKind::poly, 2,
        [&](std::span<const double> fa, std::span<const double> fb, int sign, std::span<double> dst) {
            for (int c = 0; c < pairs.count(); ++c) {
                const auto& K = pairs.tuple(c);
                dst[c] += 0.5 * sign * (fa[K[0]] * fb[K[1]] - fa[K[1]] * fb[K[0]]);
            }
        });
}

/// Left action of endomorphism-valued forms on tangent-valued ones.
inline PointForm act_end(const PointForm& a, const PointForm& rho) {
    detail::check_same_n(a, rho, "act_end");
    if (a.kind != ValueKind::endo || rho.kind != ValueKind::tangent)
        throw std::invalid_argument("act_end: expects endomorphism acting on tangent values");
    const int n = a.n;
    return detail::shuffle_product(a, rho, ValueKind::tangent, 0,
                                   [n](std::span<const double> fa, std::span<const double> fr, int sign,
                                       std::span<double> dst) {
                                       for (int i = 0; i < n; ++i) {
                                           double acc = 0.0;
                                           for (int l = 0; l < n; ++l) acc += fa[i * n + l] * fr[l];
                                           dst[i] += sign * acc;
                                       }
                                   });
}

/// Right action of a polyvector-valued form on a tangent-valued form rho of
/// degree s: the last j slots of rho contract against the order-j values.
/// Zero when s < j.
inline PointForm act_poly(const PointForm& rho, const PointForm& gamma) {
    detail::check_same_n(rho, gamma, "act_poly");
    if (rho.kind != ValueKind::tangent) throw std::invalid_argument("act_poly: left operand must be tangent-valued");
    const int n = rho.n;
    const int j = poly_order(gamma.kind, gamma.q);
    const int s = rho.degree;
    if (s < j) return PointForm(n, 0, ValueKind::tangent);
    const int out_deg = s - j + gamma.degree;
    PointForm out(n, out_deg, ValueKind::tangent);
    if (out.empty() || rho.empty() || gamma.empty()) return out;

    const IndexTable& tab_out = index_table(n, out_deg);
    const IndexTable& tab_rho = index_table(n, s);
    const IndexTable& tab_first = index_table(n, s - j);
    const IndexTable& tab_val = index_table(n, j);

    for (int r = 0; r < tab_out.count(); ++r) {
        const auto& R = tab_out.tuple(r);
        auto dst = out.fiber(r);
        for_each_split(n, R, s - j, [&](int ri, int rj, int sign) {
            const auto& I = tab_first.tuple(ri);
            auto fg = gamma.fiber(rj);
            // contract rho(e_I, e_K) against the K component of gamma's value
            for (int ck = 0; ck < tab_val.count(); ++ck) {
                const auto& K = tab_val.tuple(ck);
                int mask = 0;
                int msign = merge_sign(I, K, mask);
                if (msign == 0) continue;
                auto frho = rho.fiber(tab_rho.rank(mask));
                const double c = sign * msign * fg[ck];
                for (int v = 0; v < n; ++v) dst[v] += c * frho[v];
            }
        });
    }
    return out;
}

}  // namespace bvf
