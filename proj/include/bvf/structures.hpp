#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "bvf/calculus.hpp"

namespace bvf {

/// Seven-dimensional cross product of imaginary octonions, from the Fano
/// triples (i, i+1, i+3) mod 7.
inline std::array<double, 7> octonion_cross(const std::array<double, 7>& a,
                                            const std::array<double, 7>& b) {
    static const auto table = [] {
        std::array<std::array<int, 7>, 7> sign{};  // sign[i][j], result axis in axis[i][j]
        std::array<std::array<int, 7>, 7> axis{};
        for (auto& row : axis) row.fill(-1);
        for (int i = 0; i < 7; ++i) {
            const int t[3] = {i, (i + 1) % 7, (i + 3) % 7};
            for (int r = 0; r < 3; ++r) {
                int u = t[r], v = t[(r + 1) % 3], w = t[(r + 2) % 3];
                axis[u][v] = w;
                sign[u][v] = 1;
                axis[v][u] = w;
                sign[v][u] = -1;
            }
        }
        return std::pair(sign, axis);
    }();
    std::array<double, 7> out{};
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            const int k = table.second[i][j];
            if (k >= 0) out[k] += table.first[i][j] * a[i] * b[j];
        }
    return out;
}

/// Max over nodes of the operator norm of A o A + Id.
inline double check_ac(const FormField& A) {
    if (A.degree != 1 || A.kind != ValueKind::tangent)
        throw std::invalid_argument("check_ac: expects a degree-1 tangent field");
    const int n = A.n();
    double worst = 0.0;
    Eigen::MatrixXd J(n, n), R(n, n);
    for (long p = 0; p < A.geom->nodes(); ++p) {
        if (!A.geom->grid.node_valid(p, A.margin)) continue;
        for (int c = 0; c < n; ++c)
            for (int i = 0; i < n; ++i) J(c, i) = A.at(p, i, c);
        R = J * J + Eigen::MatrixXd::Identity(n, n);
        worst = std::max(worst, R.jacobiSvd().singularValues()(0));
    }
    return worst;
}

/// An almost-complex structure: degree-1 tangent field with A o A = -Id,
/// accepted when the pointwise residual stays below tolerance.
struct ACStructure {
    FormField A;
    double residual = 0.0;

    static constexpr double acceptance_tol = 1e-10;

    explicit ACStructure(FormField field) : A(std::move(field)) {
        residual = check_ac(A);
        if (residual > acceptance_tol)
            throw std::runtime_error("ACStructure: A o A + Id residual " + std::to_string(residual));
    }
};

inline ACStructure make_constant_ac(const ChartGeometry& geo, const Eigen::MatrixXd& J0) {
    const int n = geo.dim();
    if (J0.rows() != n || J0.cols() != n) throw std::invalid_argument("make_constant_ac: matrix size mismatch");
    const double r = (J0 * J0 + Eigen::MatrixXd::Identity(n, n)).norm();
    if (r > 1e-12)
        throw std::runtime_error("make_constant_ac: J0^2 != -Id, residual " + std::to_string(r));
    FormField A(geo, 1, ValueKind::tangent);
    parallel_for(geo.nodes(), [&](long p) {
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) A.at(p, i, c) = J0(c, i);
    });
    return ACStructure(std::move(A));
}

/// Block-diagonal standard structure diag([[0,-1],[1,0]], ...).
inline Eigen::MatrixXd standard_complex_matrix(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b + 1 < n; b += 2) {
        J(b, b + 1) = -1.0;
        J(b + 1, b) = 1.0;
    }
    return J;
}

/// The octonionic almost-complex structure of the six-sphere pulled back to a
/// stereographic chart: at p(x), v -> p x v, conjugated by the chart Jacobian.
inline ACStructure make_s6_octonionic_ac(const ChartGeometry& geo) {
    const int n = geo.dim();
    if (n != 6) throw std::invalid_argument("make_s6_octonionic_ac: needs a 6-dimensional chart");
    FormField A(geo, 1, ValueKind::tangent);
    parallel_for(geo.nodes(), [&](long p) {
        auto x = geo.grid.position(p);
        double s = 0.0;
        for (int a = 0; a < 6; ++a) s += x[a] * x[a];
        const double D = 1.0 + s;
        // inverse stereographic point and chart Jacobian F = dp/dx (7 x 6)
        std::array<double, 7> pt{};
        for (int a = 0; a < 6; ++a) pt[a] = 2.0 * x[a] / D;
        pt[6] = (s - 1.0) / D;
        double F[7][6];
        for (int a = 0; a < 6; ++a) {
            for (int i = 0; i < 6; ++i) F[a][i] = (a == i ? 2.0 / D : 0.0) - 4.0 * x[a] * x[i] / (D * D);
        }
        for (int i = 0; i < 6; ++i) F[6][i] = 4.0 * x[i] / (D * D);
        // A = (D^2/4) F^T C_p F, using F^T F = (4/D^2) Id
        const double scale = D * D / 4.0;
        for (int i = 0; i < 6; ++i) {
            std::array<double, 7> col{};
            for (int a = 0; a < 7; ++a) col[a] = F[a][i];
            std::array<double, 7> cr = octonion_cross(pt, col);
            for (int c = 0; c < 6; ++c) {
                double acc = 0.0;
                for (int a = 0; a < 7; ++a) acc += F[a][c] * cr[a];
                A.at(p, i, c) = scale * acc;
            }
        }
    });
    return ACStructure(std::move(A));
}

/// Conjugation fixture exp(-eps S(x)) J0 exp(eps S(x)) with S a smooth random
/// periodic matrix field; preserves A o A = -Id pointwise.
inline ACStructure make_perturbed_ac(const ChartGeometry& geo, const Eigen::MatrixXd& J0, double epsilon,
                                     std::uint64_t seed) {
    const int n = geo.dim();
    if (J0.rows() != n || J0.cols() != n) throw std::invalid_argument("make_perturbed_ac: matrix size mismatch");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(-1, 1);
    struct Mode {
        std::array<int, kMaxDim> k;
        double a, b;
    };
    std::vector<std::array<Mode, 2>> modes(n * n);
    for (auto& m : modes)
        for (auto& mode : m) {
            for (int a = 0; a < n; ++a) mode.k[a] = freq(rng);
            mode.a = coef(rng);
            mode.b = coef(rng);
        }
    FormField A(geo, 1, ValueKind::tangent);
    parallel_for(geo.nodes(), [&](long p) {
        auto x = geo.grid.position(p);
        Eigen::MatrixXd S(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (const Mode& m : modes[r * n + c]) {
                    double phase = 0.0;
                    for (int a = 0; a < n; ++a) phase += m.k[a] * x[a];
                    acc += m.a * std::cos(phase) + m.b * std::sin(phase);
                }
                S(r, c) = acc;
            }
        const Eigen::MatrixXd E = (epsilon * S).exp();
        const Eigen::MatrixXd Em = (-epsilon * S).exp();
        const Eigen::MatrixXd J = Em * J0 * E;
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) A.at(p, i, c) = J(c, i);
    });
    return ACStructure(std::move(A));
}

/// Auxiliary d-closed, non-trivial scalar 1-form.
struct AuxiliaryOneForm {
    FormField alpha;
    double closedness_residual = 0.0;

    explicit AuxiliaryOneForm(FormField f) : alpha(std::move(f)) {
        if (alpha.degree != 1 || alpha.kind != ValueKind::scalar)
            throw std::invalid_argument("AuxiliaryOneForm: expects a scalar 1-form");
        if (alpha.sup_norm() == 0.0) throw std::runtime_error("AuxiliaryOneForm: form is identically zero");
        FormField d = dnabla(alpha);
        closedness_residual = d.sup_norm();
        const double h = alpha.geom->grid.max_h();
        if (closedness_residual > 10.0 * h * h)
            throw std::runtime_error("AuxiliaryOneForm: dalpha residual " +
                                     std::to_string(closedness_residual) + " exceeds tolerance");
    }
};

/// alpha = dx_axis (closed, non-exact on the torus).
inline AuxiliaryOneForm make_alpha_axis(const ChartGeometry& geo, int axis) {
    if (axis < 0 || axis >= geo.dim()) throw std::invalid_argument("make_alpha_axis: axis out of range");
    FormField f(geo, 1, ValueKind::scalar);
    parallel_for(geo.nodes(), [&](long p) { f.at(p, axis, 0) = 1.0; });
    return AuxiliaryOneForm(std::move(f));
}

/// alpha = df for a sampled smooth function.
inline AuxiliaryOneForm make_alpha_gradient(const ChartGeometry& geo,
                                            const std::function<double(std::span<const double>)>& fn) {
    FormField f0(geo, 0, ValueKind::scalar);
    parallel_for(geo.nodes(), [&](long p) {
        auto x = geo.grid.position(p);
        f0.at(p, 0, 0) = fn(std::span<const double>(x.data(), geo.dim()));
    });
    return AuxiliaryOneForm(dnabla(f0));
}

}  // namespace bvf
