#pragma once

#include "bvf/graded.hpp"
#include "bvf/structures.hpp"

namespace bvf {

enum class Family { plain, quasi_alpha, alpha };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::plain: return "plain";
        case Family::quasi_alpha: return "quasi_alpha";
        case Family::alpha: return "alpha";
    }
    return "?";
}

/// A functional together with its licensed degree mask. The plain family only
/// exists in masked form ([1] or [1,3]); the alpha families take none or [5].
struct FunctionalVariant {
    Family family = Family::plain;
    DegreeMask mask = DegreeMask::brackets({1});

    static FunctionalVariant quasi_alpha(bool mask5 = false) {
        return {Family::quasi_alpha, mask5 ? DegreeMask::brackets({5}) : DegreeMask::none()};
    }
    static FunctionalVariant alpha(bool mask5 = false) {
        return {Family::alpha, mask5 ? DegreeMask::brackets({5}) : DegreeMask::none()};
    }
    static FunctionalVariant plain(bool mask13 = false) {
        return {Family::plain, mask13 ? DegreeMask::brackets({1, 3}) : DegreeMask::brackets({1})};
    }

    bool needs_alpha() const { return family != Family::plain; }
    std::string name() const {
        std::string s = family_name(family);
        if (mask == DegreeMask::none()) return s;
        if (mask == DegreeMask::brackets({5})) return s + "[5]";
        if (mask == DegreeMask::brackets({1})) return s + "[1]";
        if (mask == DegreeMask::brackets({1, 3})) return s + "[1,3]";
        return s + "[custom]";
    }
};

namespace detail {

inline void require_alpha(Family fam, const FormField* alpha) {
    if (fam != Family::plain && alpha == nullptr)
        throw std::invalid_argument("integrability: auxiliary 1-form required for alpha variants");
}

}  // namespace detail

/// The integrability quantity of a homogeneous tangent-valued form. Output is
/// graded: the cubic part and the linear part live in different degrees unless
/// deg(rho) = 1.
inline GradedField integrability_form(const FormField& rho, Family fam, const FormField* alpha,
                                      DegreeMask mask = DegreeMask::none()) {
    detail::require_alpha(fam, alpha);
    const int k = rho.degree;
    GradedField out(*rho.geom);
    FormField d = dnabla(rho, mask);
    switch (fam) {
        case Family::plain: {
            if (k % 2 == 1 && 3 * k - 1 <= rho.n())
                out.add(f_act_poly(d, f_wedge_poly(rho, rho)));
            out.add(-1.0 * d);
            break;
        }
        case Family::quasi_alpha: {
            FormField ad = f_wedge_scalar(*alpha, d);
            if (k % 2 == 1 && 3 * k <= rho.n()) out.add(f_act_poly(ad, f_wedge_poly(rho, rho)));
            out.add(-1.0 * ad);
            break;
        }
        case Family::alpha: {
            if (k % 2 == 1 && 3 * k <= rho.n())
                out.add(f_wedge_scalar(*alpha, f_act_poly(d, f_wedge_poly(rho, rho))));
            out.add(-1.0 * f_wedge_scalar(*alpha, d));
            break;
        }
    }
    return out;
}

/// Same quantity without the even-degree shortcut: the cubic term is computed
/// for every degree (it cancels exactly in even degree). Cross-check path.
inline GradedField integrability_form_direct(const FormField& rho, Family fam, const FormField* alpha,
                                             DegreeMask mask = DegreeMask::none()) {
    detail::require_alpha(fam, alpha);
    const int k = rho.degree;
    GradedField out(*rho.geom);
    FormField d = dnabla(rho, mask);
    FormField p2 = f_wedge_poly(rho, rho);
    switch (fam) {
        case Family::plain: {
            if (3 * k - 1 <= rho.n() && 3 * k - 1 >= 0) out.add(f_act_poly(d, p2));
            out.add(-1.0 * d);
            break;
        }
        case Family::quasi_alpha: {
            FormField ad = f_wedge_scalar(*alpha, d);
            if (3 * k <= rho.n()) out.add(f_act_poly(ad, p2));
            out.add(-1.0 * ad);
            break;
        }
        case Family::alpha: {
            if (3 * k <= rho.n()) out.add(f_wedge_scalar(*alpha, f_act_poly(d, p2)));
            out.add(-1.0 * f_wedge_scalar(*alpha, d));
            break;
        }
    }
    return out;
}

/// Degree-wise integrability of a graded field.
inline GradedField graded_integrability(const GradedField& g, const FunctionalVariant& variant,
                                        const FormField* alpha, bool direct_path = false) {
    detail::require_alpha(variant.family, alpha);
    GradedField out(*g.geom);
    for (const auto& [k, f] : g.comps) {
        GradedField piece = direct_path ? integrability_form_direct(f, variant.family, alpha, variant.mask)
                                        : integrability_form(f, variant.family, alpha, variant.mask);
        out += piece;
    }
    return out;
}

inline double functional_value(const GradedField& g, const FunctionalVariant& variant,
                               const FormField* alpha) {
    if (!g.geom->integrable())
        throw std::runtime_error("functional_value: integration unsupported on non-periodic chart");
    return l2_inner(graded_integrability(g, variant, alpha), g);
}

namespace detail {

/// Applies the L2-adjoint of a pointwise linear bundle map. `op` maps a source
/// PointForm (shape src_*) to the shape of `eta` at the given node; the result
/// satisfies <op(B), eta>_g = <B, result>_g pointwise, hence under quadrature.
template <class NodeOp>
FormField pointwise_adjoint(const ChartGeometry& geo, int src_degree, ValueKind src_kind, int src_q,
                            int margin, const FormField& eta, NodeOp&& op_at) {
    FormField out(geo, src_degree, src_kind, src_q, std::max(margin, eta.margin));
    const int n = geo.dim();
    const int ds = static_cast<int>(binomial(n, src_degree)) * fiber_dim(n, src_kind, src_q);
    if (ds == 0 || eta.empty_fiber()) return out;
    const int dt = static_cast<int>(eta.stride());
    const IndexTable& src_tab = index_table(n, src_degree);
    const IndexTable& tgt_tab = index_table(n, eta.degree);
    const int src_fd = fiber_dim(n, src_kind, src_q);
    const int tgt_fd = eta.fdim();

    parallel_for(geo.nodes(), [&](long node) {
        PointForm basis(n, src_degree, src_kind, src_q);
        Eigen::MatrixXd A(dt, ds);
        for (int c = 0; c < ds; ++c) {
            std::fill(basis.data.begin(), basis.data.end(), 0.0);
            basis.data[c] = 1.0;
            PointForm img = op_at(node, basis);
            for (int r = 0; r < dt; ++r) A(r, c) = img.data[r];
        }
        Eigen::Map<const Eigen::VectorXd> etav(eta.node_data(node), dt);
        Eigen::VectorXd u;
        if (geo.identity_metric) {
            u = A.transpose() * etav;
        } else {
            // weight by the target fiber Gram, pull back through the source Gram
            const double* ginv = geo.g_inv.data() + node * n * n;
            auto gram = [&](const IndexTable& tab, ValueKind kind, int q, int fd) {
                const int nc = tab.count();
                Eigen::MatrixXd G(nc * fd, nc * fd);
                for (int ci = 0; ci < nc; ++ci)
                    for (int cj = 0; cj < nc; ++cj) {
                        const double w = gram_minor(ginv, n, tab.tuple(ci), tab.tuple(cj));
                        for (int u1 = 0; u1 < fd; ++u1)
                            for (int v1 = 0; v1 < fd; ++v1) {
                                double vp = 0.0;
                                if (kind == ValueKind::scalar)
                                    vp = (u1 == v1) ? 1.0 : 0.0;
                                else if (kind == ValueKind::tangent)
                                    vp = geo.g[node * n * n + u1 * n + v1];
                                else {
                                    const IndexTable& vt = index_table(n, q);
                                    vp = gram_minor(geo.g.data() + node * n * n, n, vt.tuple(u1),
                                                    vt.tuple(v1));
                                }
                                G(ci * fd + u1, cj * fd + v1) = w * vp;
                            }
                    }
                return G;
            };
            Eigen::MatrixXd Gt = gram(tgt_tab, eta.kind, eta.q, tgt_fd);
            Eigen::MatrixXd Gs = gram(src_tab, src_kind, src_q, src_fd);
            u = Gs.llt().solve(A.transpose() * (Gt * etav));
        }
        std::copy(u.data(), u.data() + ds, out.node_data(node));
    });
    return out;
}

struct ElTermShapes {
    int lsrc_degree;  // argument degree of the L map (j + 1)
    int tgt_degree;   // degree paired against (3j or 3j-1)
};

}  // namespace detail

/// Euler-Lagrange derivative of the variant's functional: the exact gradient
/// of the discrete functional on an all-periodic flat chart, assembled from
/// the integrability form, pointwise adjoints of the cubic-term maps, and the
/// codifferential.
inline GradedField el_derivative(const GradedField& gamma, const FunctionalVariant& variant,
                                 const FormField* alpha) {
    detail::require_alpha(variant.family, alpha);
    const ChartGeometry& geo = *gamma.geom;
    if (!geo.integrable())
        throw std::runtime_error("el_derivative: integration unsupported on non-periodic chart");
    const int n = geo.dim();
    const DegreeMask mask = variant.mask;

    GradedField el = graded_integrability(gamma, variant, alpha);

    for (int j = 0; j <= n; ++j) {
        // cubic-term adjoints, odd source degrees only
        if (j % 2 == 1 && gamma.has(j)) {
            const int tgt = (variant.family == Family::plain) ? 3 * j - 1 : 3 * j;
            if (tgt <= n && gamma.has(tgt)) {
                const FormField& gj = gamma.at(j);
                const FormField& eta = gamma.at(tgt);
                FormField dgj = dnabla(gj, mask);
                FormField p2 = f_wedge_poly(gj, gj);
                FormField adgj = (variant.family == Family::quasi_alpha) ? f_wedge_scalar(*alpha, dgj)
                                                                         : dgj;
                const int marg = std::max({gj.margin, dgj.margin, p2.margin});
                // L(B): B of degree j+1
                auto l_op = [&](long node, const PointForm& B) {
                    PointForm p2p = p2.point(node);
                    switch (variant.family) {
                        case Family::plain: return act_poly(B, p2p);
                        case Family::quasi_alpha: {
                            PointForm ab = wedge_scalar(alpha->point(node), B);
                            return act_poly(ab, p2p);
                        }
                        case Family::alpha: {
                            PointForm r = act_poly(B, p2p);
                            return wedge_scalar(alpha->point(node), r);
                        }
                    }
                    return PointForm();
                };
                FormField lstar = detail::pointwise_adjoint(geo, j + 1, ValueKind::tangent, 0, marg, eta, l_op);
                el.add(codifferential(lstar, mask));
                // M(b): b of degree j
                auto m_op = [&](long node, const PointForm& b) {
                    PointForm bg = wedge_poly(b, gj.point(node));
                    switch (variant.family) {
                        case Family::plain: {
                            PointForm r = act_poly(dgj.point(node), bg);
                            return 2.0 * r;
                        }
                        case Family::quasi_alpha: {
                            PointForm r = act_poly(adgj.point(node), bg);
                            return 2.0 * r;
                        }
                        case Family::alpha: {
                            PointForm r = act_poly(dgj.point(node), bg);
                            return 2.0 * wedge_scalar(alpha->point(node), r);
                        }
                    }
                    return PointForm();
                };
                el.add(detail::pointwise_adjoint(geo, j, ValueKind::tangent, 0, marg, eta, m_op));
            }
        }
        // linear-term adjoints
        if (variant.family == Family::plain) {
            if (gamma.has(j + 1)) el.add(-1.0 * codifferential(gamma.at(j + 1), mask));
        } else {
            if (gamma.has(j + 2)) {
                const FormField& eta = gamma.at(j + 2);
                auto n_op = [&](long node, const PointForm& x) {
                    return wedge_scalar(alpha->point(node), x);
                };
                FormField nstar =
                    detail::pointwise_adjoint(geo, j + 1, ValueKind::tangent, 0, alpha->margin, eta, n_op);
                el.add(-1.0 * codifferential(nstar, mask));
            }
        }
    }
    return el;
}

struct FirstVariationResult {
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

/// Compares <<EL(gamma), beta>> against a Richardson-extrapolated central
/// difference of t -> C(gamma + t beta). The discrete functional is a quartic
/// polynomial in t, so three step sizes extrapolate it exactly.
inline FirstVariationResult first_variation_check(const GradedField& gamma, const GradedField& beta,
                                                  const FunctionalVariant& variant, const FormField* alpha,
                                                  std::vector<double> steps = {0.1, 0.05, 0.025}) {
    FirstVariationResult out;
    out.analytic = l2_inner(el_derivative(gamma, variant, alpha), beta);
    std::vector<double> x(steps.size()), d(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double t = steps[i];
        GradedField plus = gamma + t * beta;
        GradedField minus = gamma + (-t) * beta;
        d[i] = (functional_value(plus, variant, alpha) - functional_value(minus, variant, alpha)) / (2.0 * t);
        x[i] = t * t;
    }
    // Neville extrapolation to t^2 = 0
    for (std::size_t m = 1; m < d.size(); ++m)
        for (std::size_t i = d.size() - 1; i >= m; --i)
            d[i] = d[i] + (d[i] - d[i - 1]) * x[i] / (x[i - m] - x[i]);
    out.numeric = d.back();
    out.rel_err = std::abs(out.analytic - out.numeric) /
                  std::max({std::abs(out.analytic), std::abs(out.numeric), 1e-12});
    return out;
}

struct FlowStepResult {
    GradedField next;
    double functional = 0.0;  // value at the incoming field
    double el_norm = 0.0;     // L2 norm of the gradient at the incoming field
};

class FlowDivergenceError : public std::runtime_error {
  public:
    int step;
    explicit FlowDivergenceError(int step_)
        : std::runtime_error("gradient flow diverged at step " + std::to_string(step_)), step(step_) {}
};

/// One explicit Euler step of the formal gradient flow.
inline FlowStepResult flow_step(const GradedField& gamma, const FunctionalVariant& variant,
                                const FormField* alpha, double dt, int step_index = -1) {
    if (dt < 0.0) throw std::invalid_argument("flow_step: dt must be non-negative");
    FlowStepResult out;
    GradedField el = el_derivative(gamma, variant, alpha);
    out.functional = functional_value(gamma, variant, alpha);
    out.el_norm = l2_norm(el);
    out.next = gamma + (-dt) * el;
    for (const auto& [deg, f] : out.next.comps)
        for (double v : f.data)
            if (!std::isfinite(v)) throw FlowDivergenceError(step_index);
    return out;
}

/// Zeroes the variant's forbidden degrees and projects the co-closedness
/// constrained component onto ker(delta) by CG on the normal equations.
inline GradedField restrict_domain(const GradedField& gamma, const FunctionalVariant& variant,
                                   double tol = 1e-8, int max_iter = 200) {
    GradedField out = gamma;
    const bool masked = variant.mask == DegreeMask::brackets({5}) ||
                        variant.mask == DegreeMask::brackets({1, 3});
    std::vector<int> zero_degrees;
    int coclosed_degree = -1;
    if (variant.family == Family::plain) {
        zero_degrees = {2};
        if (!masked) coclosed_degree = 3;
    } else {
        zero_degrees = {3, 9};
        if (!masked) coclosed_degree = 5;
    }
    for (int d : zero_degrees) out.comps.erase(d);
    if (coclosed_degree >= 0 && out.has(coclosed_degree)) {
        FormField& gk = out.comps.at(coclosed_degree);
        FormField r = codifferential(gk);
        if (l2_norm(r) > tol) {
            // solve delta d psi = delta gk, then subtract d psi
            FormField psi(*gamma.geom, coclosed_degree - 1, ValueKind::tangent);
            FormField res = r;  // residual of the normal equations at psi = 0
            FormField p = res;
            double rs = l2_inner(res, res);
            int it = 0;
            for (; it < max_iter; ++it) {
                if (std::sqrt(rs) <= tol) break;
                FormField Ap = codifferential(dnabla(p));
                const double alpha_cg = rs / l2_inner(p, Ap);
                psi += alpha_cg * p;
                res -= alpha_cg * Ap;
                const double rs_new = l2_inner(res, res);
                p = res + (rs_new / rs) * p;
                rs = rs_new;
            }
            if (std::sqrt(rs) > tol)
                throw std::runtime_error("restrict_domain: CG stalled, residual " +
                                         std::to_string(std::sqrt(rs)));
            gk -= dnabla(psi);
        }
    }
    return out;
}

}  // namespace bvf
