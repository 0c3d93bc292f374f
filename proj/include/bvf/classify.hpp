#pragma once

#include <functional>
#include <optional>

#include "bvf/variational.hpp"

namespace bvf {

struct DecompositionResult {
    double decomposition_residual = 0.0;  // I_{alpha,A} vs 1/3 I^{alpha}_A - 2/3 alpha^dA
    double eq1_residual = 0.0;            // alpha^(dA^(A^A)) vs 1/3 (alpha^dA)^(A^A)
};

/// Residuals of the one-third identity and the induced decomposition, with a
/// single shared d^nabla A. Both residuals vanish for special structures; for
/// generic ones they are O(1), since the identity is not multilinear in the
/// canonical products. Reported as defined.
inline DecompositionResult decomposition_check(const FormField& A, const FormField& alpha) {
    DecompositionResult out;
    FormField dA = dnabla(A);
    FormField AA = f_wedge_poly(A, A);
    FormField adA = f_wedge_scalar(alpha, dA);
    FormField cubic = f_act_poly(dA, AA);             // deg 2
    FormField lhs1 = f_wedge_scalar(alpha, cubic);    // alpha ^ (dA ^ (A^A))
    FormField rhs1 = f_act_poly(adA, AA);             // (alpha ^ dA) ^ (A^A)
    out.eq1_residual = (lhs1 - (1.0 / 3.0) * rhs1).sup_norm();
    FormField i_alpha_a = lhs1 - adA;                 // alpha ^ I_A
    FormField quasi = rhs1 - adA;                     // I^{alpha}_A
    out.decomposition_residual = (i_alpha_a - ((1.0 / 3.0) * quasi - (2.0 / 3.0) * adA)).sup_norm();
    return out;
}

struct ClassificationReport {
    // sup-norm residuals (chart coefficients)
    double special = 0.0;
    double alpha_special = 0.0;
    double integrable = 0.0;
    double alpha_integrable = 0.0;
    double quasi_alpha = 0.0;
    double kahler = 0.0;
    double orthogonal = 0.0;
    // L2 residuals; present only on integrable geometries
    std::optional<double> special_l2, integrable_l2;
    double tolerance = 0.0;
    // verdicts at tolerance
    bool v_special = false, v_alpha_special = false, v_integrable = false;
    bool v_alpha_integrable = false, v_quasi_alpha = false, v_kahler = false, v_orthogonal = false;
    bool lattice_ok = false;
};

/// Computes the seven residuals and their verdicts, then asserts the
/// implication lattice on the verdicts.
inline ClassificationReport classify(const ACStructure& ac, const AuxiliaryOneForm& aux,
                                     double tol_constant = 0.1) {
    const FormField& A = ac.A;
    const FormField& alpha = aux.alpha;
    const ChartGeometry& geo = *A.geom;
    ClassificationReport r;

    FormField dA = dnabla(A);
    FormField AA = f_wedge_poly(A, A);
    FormField adA = f_wedge_scalar(alpha, dA);
    FormField plain_i = f_act_poly(dA, AA) - dA;
    FormField alpha_i = f_wedge_scalar(alpha, f_act_poly(dA, AA)) - adA;
    FormField quasi_i = f_act_poly(adA, AA) - adA;

    r.special = dA.sup_norm();
    r.alpha_special = adA.sup_norm();
    r.integrable = plain_i.sup_norm();
    r.alpha_integrable = alpha_i.sup_norm();
    r.quasi_alpha = quasi_i.sup_norm();
    r.kahler = cov_derivative(A).sup_norm();

    // g(A.,A.) - g, max abs entry over valid nodes
    {
        const int n = geo.dim();
        double worst = 0.0;
        Eigen::MatrixXd J(n, n);
        for (long p = 0; p < geo.nodes(); ++p) {
            if (!geo.grid.node_valid(p, A.margin)) continue;
            for (int c = 0; c < n; ++c)
                for (int i = 0; i < n; ++i) J(c, i) = A.at(p, i, c);
            Eigen::Map<const Eigen::MatrixXd> G(geo.g.data() + p * n * n, n, n);
            worst = std::max(worst, (J.transpose() * G * J - G).cwiseAbs().maxCoeff());
        }
        r.orthogonal = worst;
    }

    if (geo.integrable()) {
        r.special_l2 = l2_norm(dA);
        r.integrable_l2 = l2_norm(plain_i);
    }

    const double h = geo.grid.max_h();
    r.tolerance = std::max(1e-8, tol_constant * h * h);
    r.v_special = r.special <= r.tolerance;
    r.v_alpha_special = r.alpha_special <= r.tolerance;
    r.v_integrable = r.integrable <= r.tolerance;
    r.v_alpha_integrable = r.alpha_integrable <= r.tolerance;
    r.v_quasi_alpha = r.quasi_alpha <= r.tolerance;
    r.v_kahler = r.kahler <= r.tolerance;
    r.v_orthogonal = r.orthogonal <= r.tolerance;

    const bool imp1 = !r.v_special || (r.v_alpha_special && r.v_quasi_alpha && r.v_integrable &&
                                       r.v_alpha_integrable);
    const bool imp2 = !r.v_alpha_special || (r.v_quasi_alpha && r.v_alpha_integrable);
    const bool imp3 = !(r.v_quasi_alpha && r.v_alpha_integrable) || r.v_alpha_special;
    const bool imp4 = !r.v_integrable || r.v_alpha_integrable;
    r.lattice_ok = imp1 && imp2 && imp3 && imp4;
    return r;
}

struct ProbeRow {
    double t = 0.0;
    double value = 0.0;
    double derivative = 0.0;
};

struct ProbeResult {
    std::vector<ProbeRow> rows;
    int tail_trend = 0;  // sign of the last derivative estimate
};

class ProbePathError : public std::runtime_error {
  public:
    double t;
    ProbePathError(double t_, const std::string& why)
        : std::runtime_error("probe path invalid at t = " + std::to_string(t_) + ": " + why), t(t_) {}
};

/// Evaluates the variant's functional along a path of almost-complex
/// structures, each extended canonically (degree 1 only, which lies in every
/// restricted domain), with central-difference derivative estimates in t.
/// Exploratory: reports the tail trend as data, not as a stability claim.
/// Note that a functional is blind to the degree-1 part when the degrees it
/// pairs that part against are zero, as they are in the restricted domains,
/// so canonical extensions produce constant columns; the table is the
/// audit trail for that fact.
inline ProbeResult stability_probe(const std::function<ACStructure(double)>& path,
                                   const FunctionalVariant& variant, const FormField* alpha,
                                   const std::vector<double>& t_samples) {
    if (t_samples.size() < 2) throw std::invalid_argument("stability_probe: need at least two samples");
    ProbeResult out;
    std::vector<double> values;
    for (double t : t_samples) {
        ACStructure a = [&] {
            try {
                return path(t);
            } catch (const std::exception& e) {
                throw ProbePathError(t, e.what());
            }
        }();
        GradedField g = GradedField::from(a.A);
        values.push_back(functional_value(g, variant, alpha));
    }
    const std::size_t m = t_samples.size();
    for (std::size_t i = 0; i < m; ++i) {
        ProbeRow row;
        row.t = t_samples[i];
        row.value = values[i];
        if (i == 0)
            row.derivative = (values[1] - values[0]) / (t_samples[1] - t_samples[0]);
        else if (i + 1 == m)
            row.derivative = (values[m - 1] - values[m - 2]) / (t_samples[m - 1] - t_samples[m - 2]);
        else
            row.derivative = (values[i + 1] - values[i - 1]) / (t_samples[i + 1] - t_samples[i - 1]);
        out.rows.push_back(row);
    }
    const double last = out.rows.back().derivative;
    out.tail_trend = (std::abs(last) <= 1e-12) ? 0 : (last > 0 ? 1 : -1);
    return out;
}

}  // namespace bvf
