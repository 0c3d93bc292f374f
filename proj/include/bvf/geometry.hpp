#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>

#include "bvf/grid.hpp"

namespace bvf {

enum class ConnectionKind { levi_civita, injected };

/// A chart-sampled manifold: grid, metric, torsion-free connection and volume
/// density. Immutable once built; shared read-only by every field living on it.
struct ChartGeometry {
    Grid grid;
    bool identity_metric = false;
    ConnectionKind connection = ConnectionKind::levi_civita;
    std::vector<double> g;       // node * n*n, row-major symmetric
    std::vector<double> g_inv;   // node * n*n
    std::vector<double> sqrtg;   // node
    std::vector<double> gamma;   // node * n*n*n, Gamma^k_{ij} at ((k*n)+i)*n+j

    int dim() const { return grid.n; }
    long nodes() const { return grid.node_count(); }

    Eigen::Map<const Eigen::MatrixXd> g_at(long node) const {
        return {g.data() + node * dim() * dim(), dim(), dim()};
    }
    Eigen::Map<const Eigen::MatrixXd> g_inv_at(long node) const {
        return {g_inv.data() + node * dim() * dim(), dim(), dim()};
    }
    double christoffel(long node, int k, int i, int j) const {
        const int n = dim();
        return gamma[((node * n + k) * n + i) * n + j];
    }

    /// Quadrature weight of one node (all-periodic grids only).
    double node_weight() const {
        if (!grid.all_periodic())
            throw std::runtime_error("integration unsupported on non-periodic chart");
        double w = 1.0;
        for (int a = 0; a < dim(); ++a) w *= grid.h[a];
        return w;
    }

    bool integrable() const { return grid.all_periodic(); }
};

namespace detail {

inline void derive_metric_data(ChartGeometry& geo) {
    const int n = geo.dim();
    const long N = geo.nodes();
    geo.g_inv.resize(N * n * n);
    geo.sqrtg.resize(N);
    for (long p = 0; p < N; ++p) {
        Eigen::Map<const Eigen::MatrixXd> G(geo.g.data() + p * n * n, n, n);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("ChartGeometry: metric not positive definite at a node");
        Eigen::MatrixXd Ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        Eigen::Map<Eigen::MatrixXd>(geo.g_inv.data() + p * n * n, n, n) = Ginv;
        double det = G.determinant();
        geo.sqrtg[p] = std::sqrt(det);
    }
}

}  // namespace detail

/// Flat torus [0, 2pi)^n with the identity metric.
inline ChartGeometry make_flat_torus(int n, int res) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("make_flat_torus: dimension must be even and >= 2");
    if (n > 6) throw std::invalid_argument("make_flat_torus: dimension capped at 6");
    if (res < 4) throw std::invalid_argument("make_flat_torus: resolution must be >= 4");
    ChartGeometry geo;
    geo.grid.n = n;
    for (int a = 0; a < n; ++a) {
        geo.grid.res[a] = res;
        geo.grid.periodic[a] = true;
        geo.grid.lo[a] = 0.0;
        geo.grid.hi[a] = 2.0 * M_PI;
    }
    geo.grid.finalize();
    geo.identity_metric = true;
    const long N = geo.nodes();
    geo.g.assign(N * n * n, 0.0);
    for (long p = 0; p < N; ++p)
        for (int i = 0; i < n; ++i) geo.g[p * n * n + i * n + i] = 1.0;
    geo.gamma.assign(N * n * n * n, 0.0);
    detail::derive_metric_data(geo);
    return geo;
}

/// Conformally flat periodic metric g = e^{2 phi} delta with
/// phi = amplitude * sin(x0) cos(x1); Christoffel symbols are analytic.
inline ChartGeometry make_warped_torus(int n, int res, double amplitude) {
    ChartGeometry geo = make_flat_torus(n, res);
    geo.identity_metric = false;
    const long N = geo.nodes();
    for (long p = 0; p < N; ++p) {
        auto x = geo.grid.position(p);
        const double phi = amplitude * std::sin(x[0]) * std::cos(x[1]);
        const double e2 = std::exp(2.0 * phi);
        std::array<double, kMaxDim> dphi{};
        dphi[0] = amplitude * std::cos(x[0]) * std::cos(x[1]);
        dphi[1] = -amplitude * std::sin(x[0]) * std::sin(x[1]);
        for (int i = 0; i < n; ++i) geo.g[p * n * n + i * n + i] = e2;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = 0.0;
                    if (i == k) v += dphi[j];
                    if (j == k) v += dphi[i];
                    if (i == j) v -= dphi[k];
                    geo.gamma[((p * n + k) * n + i) * n + j] = v;
                }
    }
    detail::derive_metric_data(geo);
    return geo;
}

/// Stereographic chart of the round unit sphere on the box
/// center + [-cutoff, cutoff]^n: g_ij = 4 delta_ij / (1+|x|^2)^2 with its
/// analytic Levi-Civita symbols. Single chart, so no global quadrature.
inline ChartGeometry make_sphere_chart(int n, int res, double cutoff,
                                       std::array<double, kMaxDim> center = {}) {
    if (n != 2 && n != 6) throw std::invalid_argument("make_sphere_chart: dimension must be 2 or 6");
    if (res < 3) throw std::invalid_argument("make_sphere_chart: resolution must be >= 3");
    if (cutoff <= 0.0) throw std::invalid_argument("make_sphere_chart: cutoff must be positive");
    ChartGeometry geo;
    geo.grid.n = n;
    for (int a = 0; a < n; ++a) {
        geo.grid.res[a] = res;
        geo.grid.periodic[a] = false;
        geo.grid.lo[a] = center[a] - cutoff;
        geo.grid.hi[a] = center[a] + cutoff;
    }
    geo.grid.finalize();
    const long N = geo.nodes();
    geo.g.assign(N * n * n, 0.0);
    geo.gamma.assign(N * n * n * n, 0.0);
    for (long p = 0; p < N; ++p) {
        auto x = geo.grid.position(p);
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += x[a] * x[a];
        const double D = 1.0 + s;
        const double gd = 4.0 / (D * D);
        for (int i = 0; i < n; ++i) geo.g[p * n * n + i * n + i] = gd;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = 0.0;
                    if (i == k) v += x[j];
                    if (j == k) v += x[i];
                    if (i == j) v -= x[k];
                    geo.gamma[((p * n + k) * n + i) * n + j] = -2.0 * v / D;
                }
    }
    detail::derive_metric_data(geo);
    return geo;
}

/// Levi-Civita symbols recomputed from the metric samples by central
/// differences: Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
/// Boundary nodes of non-periodic axes are left zero.
inline std::vector<double> christoffel_from_metric(const ChartGeometry& geo) {
    const int n = geo.dim();
    const long N = geo.nodes();
    std::vector<double> out(N * n * n * n, 0.0);
    std::vector<double> dg(n * n * n);  // d_a g_ij
    for (long p = 0; p < N; ++p) {
        if (!geo.grid.node_valid(p, 1)) continue;
        bool ok_m = false, ok_p = false;
        for (int a = 0; a < n; ++a) {
            long pm = geo.grid.shifted(p, a, -1, ok_m);
            long pp = geo.grid.shifted(p, a, +1, ok_p);
            const double inv2h = 1.0 / (2.0 * geo.grid.h[a]);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dg[(a * n + i) * n + j] =
                        (geo.g[pp * n * n + i * n + j] - geo.g[pm * n * n + i * n + j]) * inv2h;
        }
        Eigen::Map<const Eigen::MatrixXd> Ginv(geo.g_inv.data() + p * n * n, n, n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (int l = 0; l < n; ++l)
                        acc += Ginv(k, l) * (dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] -
                                             dg[(l * n + i) * n + j]);
                    out[((p * n + k) * n + i) * n + j] = 0.5 * acc;
                }
    }
    return out;
}

/// Replaces the connection with user-supplied samples (symmetrized in the
/// lower indices). The geometry then no longer represents a metric connection.
inline void inject_connection(ChartGeometry& geo, const std::vector<double>& gamma_samples) {
    if (gamma_samples.size() != geo.gamma.size())
        throw std::invalid_argument("inject_connection: sample array has the wrong shape");
    const int n = geo.dim();
    const long N = geo.nodes();
    for (long p = 0; p < N; ++p)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    geo.gamma[((p * n + k) * n + i) * n + j] =
                        0.5 * (gamma_samples[((p * n + k) * n + i) * n + j] +
                               gamma_samples[((p * n + k) * n + j) * n + i]);
    geo.connection = ConnectionKind::injected;
}

}  // namespace bvf
