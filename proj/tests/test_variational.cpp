#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace bvf;
using bvf::testing::apply_structure;
using bvf::testing::order_estimate;
using bvf::testing::random_graded;

namespace {

struct Fixture {
    ChartGeometry geo = make_flat_torus(4, 6);
    AuxiliaryOneForm alpha = make_alpha_axis(geo, 0);
    ACStructure special = make_constant_ac(geo, standard_complex_matrix(4));
    ACStructure perturbed = make_perturbed_ac(geo, standard_complex_matrix(4), 0.1, 42);

    std::vector<FunctionalVariant> variants() const {
        return {FunctionalVariant::quasi_alpha(false), FunctionalVariant::quasi_alpha(true),
                FunctionalVariant::alpha(false),       FunctionalVariant::alpha(true),
                FunctionalVariant::plain(false),       FunctionalVariant::plain(true)};
    }
};

}  // namespace

TEST_CASE("integrability forms vanish on special structures") {
    Fixture fx;
    for (auto fam : {Family::plain, Family::quasi_alpha, Family::alpha}) {
        GradedField i = integrability_form(fx.special.A, fam, &fx.alpha.alpha);
        CHECK(i.sup_norm() == 0.0);
    }
    CHECK_THROWS_AS(integrability_form(fx.special.A, Family::alpha, nullptr), std::invalid_argument);
}

TEST_CASE("even-degree quasi integrability form is exact") {
    auto run = [](int res) {
        auto geo = make_flat_torus(4, res);
        auto alpha = make_alpha_gradient(
            geo, [](std::span<const double> x) { return std::sin(x[0]) * std::cos(x[1]); });
        FormField rho = random_smooth_field(geo, 2, ValueKind::tangent, 0, 7, 2, 0.5);
        GradedField i = integrability_form(rho, Family::quasi_alpha, &alpha.alpha);
        REQUIRE(i.comps.size() == 1);
        // I = d(alpha ^ rho) for even degrees
        FormField want = dnabla(f_wedge_scalar(alpha.alpha, rho));
        return l2_norm(i.at(4) - want);
    };
    const double e1 = run(16), e2 = run(32);
    CHECK(order_estimate(e1, e2) >= 1.9);
}

TEST_CASE("integrability of the octonionic structure tracks the Nijenhuis tensor") {
    auto geo = make_sphere_chart(6, 5, 0.8);
    auto ac = make_s6_octonionic_ac(geo);
    GradedField i = integrability_form(ac.A, Family::plain, nullptr);
    FormField N = nijenhuis_tensor(ac.A);
    CHECK(i.at(2).sup_norm() > 0.1);
    // composed with the structure, the bundle form reproduces the tensor
    FormField recon = apply_structure(ac.A, i.at(2));
    const double h = geo.grid.max_h();
    CHECK((N - recon).sup_norm() <= 20.0 * h * h);
}

TEST_CASE("one-third identities do not survive the canonical contraction") {
    // pinned witness: the argument-threaded derivation is not multilinear, so
    // these residuals are O(1) rather than zero; vanishing still holds for
    // special structures
    Fixture fx;
    auto special = decomposition_check(fx.special.A, fx.alpha.alpha);
    CHECK(special.eq1_residual == 0.0);
    CHECK(special.decomposition_residual == 0.0);
    auto perturbed = decomposition_check(fx.perturbed.A, fx.alpha.alpha);
    CHECK(perturbed.eq1_residual > 1e-3);
    CHECK(perturbed.decomposition_residual > 1e-3);
}

TEST_CASE("graded integrability splits degreewise") {
    Fixture fx;
    GradedField g = random_graded(fx.geo, {1, 2, 3}, 900);
    for (auto v : fx.variants()) {
        GradedField direct = graded_integrability(g, v, &fx.alpha.alpha, true);
        GradedField split = graded_integrability(g, v, &fx.alpha.alpha, false);
        CHECK((direct - split).sup_norm() <= 1e-12);
        // degree-by-degree assembly oracle
        GradedField manual(fx.geo);
        for (const auto& [k, f] : g.comps) manual += integrability_form(f, v.family, &fx.alpha.alpha, v.mask);
        CHECK((split - manual).sup_norm() == 0.0);
    }
    // even-only graded field reduces to the linear terms
    GradedField even = random_graded(fx.geo, {0, 2}, 901);
    GradedField i = graded_integrability(even, FunctionalVariant::quasi_alpha(false), &fx.alpha.alpha);
    for (const auto& [k, f] : even.comps) {
        FormField lin = -1.0 * f_wedge_scalar(fx.alpha.alpha, dnabla(f));
        CHECK((i.at(k + 2) - lin).sup_norm() == 0.0);
    }
}

TEST_CASE("functional values on reference structures") {
    Fixture fx;
    GradedField gj = GradedField::from(fx.special.A);
    for (auto v : fx.variants())
        CHECK(functional_value(gj, v, &fx.alpha.alpha) == 0.0);

    GradedField zero(fx.geo);
    CHECK(functional_value(zero, FunctionalVariant::plain(), nullptr) == 0.0);

    // a degree-1-only field always evaluates to zero: the integrability form
    // lives in degrees 2 and 3 and the pairing is degreewise
    GradedField gp = GradedField::from(fx.perturbed.A);
    CHECK(functional_value(gp, FunctionalVariant::quasi_alpha(), &fx.alpha.alpha) == 0.0);
    CHECK(functional_value(gp, FunctionalVariant::plain(), nullptr) == 0.0);

    // with higher-degree content the value is nonzero and bit-reproducible;
    // on a 4-manifold the quasi family needs degree-4 content because every
    // degree-3 form is fixed by the right action of A^A when A o A = -Id
    GradedField rich = gp;
    rich.add(random_smooth_field(fx.geo, 2, ValueKind::tangent, 0, 77, 2, 0.4));
    rich.add(random_smooth_field(fx.geo, 3, ValueKind::tangent, 0, 78, 2, 0.4));
    rich.add(random_smooth_field(fx.geo, 4, ValueKind::tangent, 0, 79, 2, 0.4));
    const double vp = functional_value(rich, FunctionalVariant::plain(), nullptr);
    CHECK(std::abs(vp) > 1e-6);
    const double v1 = functional_value(rich, FunctionalVariant::quasi_alpha(), &fx.alpha.alpha);
    const double v2 = functional_value(rich, FunctionalVariant::quasi_alpha(), &fx.alpha.alpha);
    CHECK(std::abs(v1) > 1e-6);
    CHECK(v1 == v2);  // deterministic reductions, bit for bit

    // the 4-dimensional fixed-point accident, pinned
    GradedField i1 = integrability_form(fx.perturbed.A, Family::quasi_alpha, &fx.alpha.alpha);
    CHECK(i1.sup_norm() <= 1e-12);
    auto sphere = make_sphere_chart(6, 5, 0.8);
    auto ac6 = make_s6_octonionic_ac(sphere);
    auto alpha6 = make_alpha_gradient(sphere, [](std::span<const double> x) { return x[1]; });
    GradedField i6 = integrability_form(ac6.A, Family::quasi_alpha, &alpha6.alpha);
    CHECK(i6.sup_norm() > 0.1);
}

TEST_CASE("pointwise adjoints satisfy the quadrature identity") {
    // the metric is warped, so the Gram-weighted transpose is exercised
    auto geo = make_warped_torus(4, 6, 0.25);
    auto alpha = make_alpha_axis(geo, 0);
    FormField gj = random_smooth_field(geo, 1, ValueKind::tangent, 0, 910, 2, 0.5);
    FormField dgj = dnabla(gj);
    FormField p2 = f_wedge_poly(gj, gj);
    FormField eta = random_smooth_field(geo, 3, ValueKind::tangent, 0, 911);

    // L(B) = (alpha ^ B) ^ (gj ^ gj)
    auto l_op = [&](long node, const PointForm& B) {
        return act_poly(wedge_scalar(alpha.alpha.point(node), B), p2.point(node));
    };
    FormField lstar = bvf::detail::pointwise_adjoint(geo, 2, ValueKind::tangent, 0, 1, eta, l_op);
    FormField B = random_smooth_field(geo, 2, ValueKind::tangent, 0, 912);
    FormField LB(geo, 3, ValueKind::tangent, 0, 1);
    for (long p = 0; p < geo.nodes(); ++p) LB.set_point(p, l_op(p, B.point(p)));
    CHECK(std::abs(l2_inner(LB, eta) - l2_inner(B, lstar)) <=
          1e-9 * std::max(1.0, std::abs(l2_inner(LB, eta))));

    // M(b) = 2 (alpha ^ dgj) ^ (b ^ gj)
    FormField adgj = f_wedge_scalar(alpha.alpha, dgj);
    auto m_op = [&](long node, const PointForm& b) {
        PointForm r = act_poly(adgj.point(node), wedge_poly(b, gj.point(node)));
        return 2.0 * r;
    };
    FormField mstar = bvf::detail::pointwise_adjoint(geo, 1, ValueKind::tangent, 0, 1, eta, m_op);
    FormField b1 = random_smooth_field(geo, 1, ValueKind::tangent, 0, 913);
    FormField Mb(geo, 3, ValueKind::tangent, 0, 1);
    for (long p = 0; p < geo.nodes(); ++p) Mb.set_point(p, m_op(p, b1.point(p)));
    CHECK(std::abs(l2_inner(Mb, eta) - l2_inner(b1, mstar)) <=
          1e-9 * std::max(1.0, std::abs(l2_inner(Mb, eta))));

    // N(x) = alpha ^ x
    FormField eta2 = random_smooth_field(geo, 2, ValueKind::tangent, 0, 914);
    auto n_op = [&](long node, const PointForm& x) { return wedge_scalar(alpha.alpha.point(node), x); };
    FormField nstar = bvf::detail::pointwise_adjoint(geo, 1, ValueKind::tangent, 0, 0, eta2, n_op);
    FormField x1 = random_smooth_field(geo, 1, ValueKind::tangent, 0, 915);
    FormField Nx(geo, 2, ValueKind::tangent);
    for (long p = 0; p < geo.nodes(); ++p) Nx.set_point(p, n_op(p, x1.point(p)));
    CHECK(std::abs(l2_inner(Nx, eta2) - l2_inner(x1, nstar)) <=
          1e-9 * std::max(1.0, std::abs(l2_inner(Nx, eta2))));
}

TEST_CASE("first variation matches the extrapolated difference quotient") {
    Fixture fx;
    GradedField gamma(fx.geo);
    gamma.add(fx.perturbed.A);
    gamma.add(random_smooth_field(fx.geo, 2, ValueKind::tangent, 0, 920, 2, 0.3));
    gamma.add(random_smooth_field(fx.geo, 3, ValueKind::tangent, 0, 921, 2, 0.3));
    GradedField beta = random_graded(fx.geo, {1, 2, 3}, 922);
    for (auto v : fx.variants()) {
        auto r = first_variation_check(gamma, beta, v, &fx.alpha.alpha);
        INFO(v.name());
        CHECK(r.rel_err <= 1e-5);
    }
    // zero direction
    GradedField zero(fx.geo);
    auto r0 = first_variation_check(gamma, zero, FunctionalVariant::plain(), nullptr);
    CHECK(r0.analytic == 0.0);
    CHECK(r0.numeric == 0.0);
    CHECK(r0.rel_err == 0.0);
    // direction supported in a masked degree: the masked terms contribute
    // nothing analytically and the quotient agrees
    GradedField masked_dir(fx.geo);
    masked_dir.add(random_smooth_field(fx.geo, 2, ValueKind::tangent, 0, 923, 2, 0.5));
    auto rm = first_variation_check(gamma, masked_dir, FunctionalVariant::plain(true), nullptr);
    CHECK(rm.rel_err <= 1e-5);
}

TEST_CASE("special structures are critical points in every variant") {
    Fixture fx;
    GradedField gj = GradedField::from(fx.special.A);
    for (auto v : fx.variants()) {
        GradedField el = el_derivative(gj, v, &fx.alpha.alpha);
        INFO(v.name());
        CHECK(el.sup_norm() <= 1e-8);
    }
    GradedField gp = GradedField::from(fx.perturbed.A);
    CHECK(l2_norm(el_derivative(gp, FunctionalVariant::plain(), nullptr)) > 1e-3);
}

TEST_CASE("flow stepping") {
    Fixture fx;
    GradedField gj = GradedField::from(fx.special.A);
    auto r = flow_step(gj, FunctionalVariant::quasi_alpha(), &fx.alpha.alpha, 1e-2);
    CHECK((r.next - gj).sup_norm() <= 1e-10);  // critical point stays put
    CHECK(r.el_norm <= 1e-10);

    GradedField gp = GradedField::from(fx.perturbed.A);
    auto r0 = flow_step(gp, FunctionalVariant::plain(), nullptr, 0.0);
    CHECK((r0.next - gp).sup_norm() == 0.0);  // dt = 0 is the identity

    // descent over twenty steps at a calibrated step size
    const double dt = 2e-3;
    GradedField g = restrict_domain(gp, FunctionalVariant::plain());
    double prev = functional_value(g, FunctionalVariant::plain(), nullptr);
    double worst_rise = 0.0;
    for (int s = 0; s < 20; ++s) {
        auto rs = flow_step(g, FunctionalVariant::plain(), nullptr, dt, s);
        g = rs.next;
        const double now = functional_value(g, FunctionalVariant::plain(), nullptr);
        worst_rise = std::max(worst_rise, now - prev);
        prev = now;
    }
    CHECK(worst_rise <= 10.0 * dt * dt);

    // grossly oversized steps blow up and carry the step index
    GradedField bad = GradedField::from(fx.perturbed.A);
    bool diverged = false;
    try {
        for (int s = 0; s < 50; ++s) bad = flow_step(bad, FunctionalVariant::plain(), nullptr, 50.0, s).next;
    } catch (const FlowDivergenceError& e) {
        diverged = true;
        CHECK(e.step >= 0);
    }
    CHECK(diverged);
}

TEST_CASE("restrict_domain zeroes and projects") {
    Fixture fx;
    GradedField g1 = GradedField::from(fx.perturbed.A);
    GradedField r1 = restrict_domain(g1, FunctionalVariant::quasi_alpha());
    CHECK((r1 - g1).sup_norm() == 0.0);  // degree-1 only: constraints vacuous

    GradedField g(fx.geo);
    g.add(fx.perturbed.A);
    g.add(random_smooth_field(fx.geo, 3, ValueKind::tangent, 0, 930, 2, 0.5));
    GradedField rq = restrict_domain(g, FunctionalVariant::quasi_alpha());
    CHECK_FALSE(rq.has(3));  // gamma_3 = 0 in the quasi domain

    GradedField rp = restrict_domain(g, FunctionalVariant::plain());
    REQUIRE(rp.has(3));
    CHECK(l2_norm(codifferential(rp.at(3))) <= 1e-8);  // co-closed after projection
    GradedField rp13 = restrict_domain(g, FunctionalVariant::plain(true));
    CHECK((rp13.at(3) - g.at(3)).sup_norm() == 0.0);  // mask drops the constraint

    GradedField g2(fx.geo);
    g2.add(fx.perturbed.A);
    g2.add(random_smooth_field(fx.geo, 2, ValueKind::tangent, 0, 931));
    CHECK_FALSE(restrict_domain(g2, FunctionalVariant::plain()).has(2));
}

TEST_CASE("classification on the three reference fixtures") {
    Fixture fx;
    auto r1 = classify(fx.special, fx.alpha);
    CHECK(r1.v_special);
    CHECK(r1.v_kahler);
    CHECK(r1.v_integrable);
    CHECK(r1.v_orthogonal);
    CHECK(r1.lattice_ok);
    CHECK(r1.special <= 1e-12);
    REQUIRE(r1.special_l2.has_value());

    auto r2 = classify(fx.perturbed, fx.alpha);
    CHECK_FALSE(r2.v_special);
    CHECK(r2.lattice_ok);

    auto sphere = make_sphere_chart(6, 6, 1.0);
    auto alpha6 = make_alpha_gradient(sphere, [](std::span<const double> x) { return x[1]; });
    auto r3 = classify(make_s6_octonionic_ac(sphere), alpha6);
    CHECK_FALSE(r3.v_integrable);
    CHECK(r3.orthogonal <= 1e-9);
    CHECK(r3.lattice_ok);
    CHECK_FALSE(r3.special_l2.has_value());
}

TEST_CASE("stability probe") {
    Fixture fx;
    const FunctionalVariant plain = FunctionalVariant::plain();
    std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};

    auto constant_path = [&](double) { return make_constant_ac(fx.geo, standard_complex_matrix(4)); };
    auto pr = stability_probe(constant_path, plain, nullptr, ts);
    for (const auto& row : pr.rows) {
        CHECK(row.value == 0.0);
        CHECK(row.derivative == 0.0);
    }
    CHECK(pr.tail_trend == 0);

    // conjugation path: completes, deterministic across reruns
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Eigen::MatrixXd S(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) S(r, c) = coef(rng);
    auto conj_path = [&](double t) {
        Eigen::MatrixXd P = (0.3 * t * S).exp();
        Eigen::MatrixXd Pm = (-0.3 * t * S).exp();
        return make_constant_ac(fx.geo, Pm * standard_complex_matrix(4) * P);
    };
    auto p1 = stability_probe(conj_path, plain, nullptr, ts);
    auto p2 = stability_probe(conj_path, plain, nullptr, ts);
    REQUIRE(p1.rows.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(p1.rows[i].value == p2.rows[i].value);
        CHECK(p1.rows[i].derivative == p2.rows[i].derivative);
    }

    // a path that leaves the space of almost-complex structures reports t
    auto drift = [&](double t) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Constant(4, 4, 0.4);
        return make_constant_ac(fx.geo, standard_complex_matrix(4) + t * B);
    };
    CHECK_THROWS_AS(stability_probe(drift, plain, nullptr, ts), ProbePathError);
}

TEST_CASE("masked and unmasked functionals coincide without degree-4 content") {
    Fixture fx;
    GradedField g = random_graded(fx.geo, {1, 2, 3}, 940);
    const double c0 = functional_value(g, FunctionalVariant::quasi_alpha(false), &fx.alpha.alpha);
    const double c5 = functional_value(g, FunctionalVariant::quasi_alpha(true), &fx.alpha.alpha);
    CHECK(c0 == c5);
}
