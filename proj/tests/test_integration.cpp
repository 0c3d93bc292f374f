#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace bvf;
using bvf::testing::order_estimate;

namespace {

// independent double-sum oracle for the metric pairing of polyvector-valued
// forms at one node
double pairing_oracle(const ChartGeometry& geo, long p, const FormField& a, const FormField& b) {
    const int n = geo.dim();
    const int q = poly_order(a.kind, a.q);
    const IndexTable& ft = index_table(n, a.degree);
    const IndexTable& vt = index_table(n, q);
    Eigen::Map<const Eigen::MatrixXd> G(geo.g.data() + p * n * n, n, n);
    Eigen::Map<const Eigen::MatrixXd> Gi(geo.g_inv.data() + p * n * n, n, n);
    double acc = 0.0;
    for (int ci = 0; ci < ft.count(); ++ci)
        for (int cj = 0; cj < ft.count(); ++cj) {
            Eigen::MatrixXd m(a.degree, a.degree);
            for (int r = 0; r < a.degree; ++r)
                for (int c = 0; c < a.degree; ++c) m(r, c) = Gi(ft.tuple(ci)[r], ft.tuple(cj)[c]);
            const double w_form = a.degree == 0 ? 1.0 : m.determinant();
            for (int u = 0; u < vt.count(); ++u)
                for (int v = 0; v < vt.count(); ++v) {
                    Eigen::MatrixXd mv(q, q);
                    for (int r = 0; r < q; ++r)
                        for (int c = 0; c < q; ++c) mv(r, c) = G(vt.tuple(u)[r], vt.tuple(v)[c]);
                    acc += w_form * mv.determinant() * a.at(p, ci, u) * b.at(p, cj, v);
                }
        }
    return acc;
}

}  // namespace

TEST_CASE("wedge_g on the flat two-torus") {
    auto geo = make_flat_torus(2, 6);
    FormField a(geo, 1, ValueKind::tangent), b(geo, 1, ValueKind::tangent);
    for (long p = 0; p < geo.nodes(); ++p) {
        a.at(p, 0, 0) = 1.0;  // dx0 (x) d0
        b.at(p, 1, 0) = 1.0;  // dx1 (x) d0
    }
    FormField w = wedge_g(a, b);
    for (long p = 0; p < geo.nodes(); ++p) CHECK(w.at(p, 0, 0) == Catch::Approx(1.0));

    FormField c(geo, 1, ValueKind::tangent);
    for (long p = 0; p < geo.nodes(); ++p) c.at(p, 1, 1) = 1.0;  // dx1 (x) d1
    FormField z = wedge_g(a, c);
    CHECK(z.sup_norm() == 0.0);

    CHECK_THROWS(wedge_g(a, f_wedge_poly(a, c)));
}

TEST_CASE("fiber inner product against the double-sum oracle") {
    auto geo = make_warped_torus(4, 6, 0.25);
    double worst = 0.0;
    for (int k : {0, 1, 2}) {
        FormField a = random_smooth_field(geo, k, ValueKind::tangent, 0, 101 + k);
        FormField b = random_smooth_field(geo, k, ValueKind::tangent, 0, 104 + k);
        FormField dens = fiber_inner(a, b);
        std::mt19937_64 rng(55);
        std::uniform_int_distribution<long> node(0, geo.nodes() - 1);
        for (int rep = 0; rep < 40; ++rep) {
            long p = node(rng);
            worst = std::max(worst, std::abs(dens.at(p, 0, 0) - pairing_oracle(geo, p, a, b)));
        }
        CHECK(fiber_inner(a, a).at(0, 0, 0) >= 0.0);
    }
    CHECK(worst <= 1e-11);
    {
        FormField a1 = random_smooth_field(geo, 1, ValueKind::tangent, 0, 321);
        FormField a2 = random_smooth_field(geo, 2, ValueKind::tangent, 0, 322);
        CHECK_THROWS_AS(fiber_inner(a1, a2), std::invalid_argument);
    }
    // flat normalization
    auto flat = make_flat_torus(2, 6);
    FormField u(flat, 1, ValueKind::tangent);
    for (long p = 0; p < flat.nodes(); ++p) u.at(p, 0, 0) = 1.0;
    CHECK(fiber_inner(u, u).at(0, 0, 0) == Catch::Approx(1.0));
}

TEST_CASE("hodge star basics on the flat two-torus") {
    auto geo = make_flat_torus(2, 6);
    FormField f(geo, 0, ValueKind::tangent);
    for (long p = 0; p < geo.nodes(); ++p) f.at(p, 0, 0) = 1.0;  // 1 (x) d0
    FormField s = hodge_star(f);
    CHECK(s.degree == 2);
    for (long p = 0; p < geo.nodes(); ++p) {
        CHECK(s.at(p, 0, 0) == Catch::Approx(1.0));  // dx0^dx1 (x) d0
        CHECK(s.at(p, 0, 1) == 0.0);
    }
}

TEST_CASE("hodge star sign law and defining property") {
    for (bool warped : {false, true}) {
        auto geo = warped ? make_warped_torus(4, 6, 0.25) : make_flat_torus(4, 6);
        double sign_law = 0.0, defining = 0.0;
        std::uint64_t seed = warped ? 200 : 300;
        for (int k = 0; k <= 4; ++k) {
            for (int rep = 0; rep < 7; ++rep) {
                FormField a = random_smooth_field(geo, k, ValueKind::tangent, 0, seed++);
                FormField b = random_smooth_field(geo, k, ValueKind::tangent, 0, seed++);
                FormField sb = hodge_star(b);
                FormField ssb = hodge_star(sb);
                const double sg = ((k * (4 - k)) % 2 == 0) ? 1.0 : -1.0;
                for (std::size_t i = 0; i < ssb.data.size(); ++i)
                    sign_law = std::max(sign_law, std::abs(ssb.data[i] - sg * b.data[i]));
                FormField top = wedge_g(a, sb);
                FormField dens = fiber_inner(a, b);
                for (long p = 0; p < geo.nodes(); ++p)
                    defining = std::max(defining,
                                        std::abs(top.at(p, 0, 0) - dens.at(p, 0, 0) * geo.sqrtg[p]));
            }
        }
        CHECK(sign_law <= 1e-10);
        CHECK(defining <= 1e-10);
    }
}

TEST_CASE("hodge star acts on the form part only, any value kind") {
    auto geo = make_warped_torus(4, 6, 0.25);
    FormField u = random_smooth_field(geo, 1, ValueKind::tangent, 0, 871);
    FormField v = random_smooth_field(geo, 1, ValueKind::tangent, 0, 872);
    FormField p2 = f_wedge_poly(u, v);  // degree 2, order-2 polyvector values
    FormField ss = hodge_star(hodge_star(p2));
    double worst = 0.0;
    for (std::size_t i = 0; i < ss.data.size(); ++i)
        worst = std::max(worst, std::abs(ss.data[i] - p2.data[i]));  // (-1)^{k(n-k)} = +1
    CHECK(worst <= 1e-10);
    FormField top = wedge_g(p2, hodge_star(p2));
    FormField dens = fiber_inner(p2, p2);
    double defect = 0.0;
    for (long p = 0; p < geo.nodes(); ++p)
        defect = std::max(defect, std::abs(top.at(p, 0, 0) - dens.at(p, 0, 0) * geo.sqrtg[p]));
    CHECK(defect <= 1e-10);
}

TEST_CASE("L2 inner product of the standard torus structure") {
    auto geo = make_flat_torus(2, 16);
    auto j = make_constant_ac(geo, standard_complex_matrix(2));
    // <J,J>_g = tr(J^T J) = 2 pointwise, integrated over (2 pi)^2
    CHECK(l2_inner(j.A, j.A) == Catch::Approx(8.0 * M_PI * M_PI).epsilon(1e-12));

    FormField a = random_smooth_field(geo, 1, ValueKind::tangent, 0, 401);
    FormField b = random_smooth_field(geo, 1, ValueKind::tangent, 0, 402);
    CHECK(l2_inner(a, b) == Catch::Approx(l2_inner(b, a)).margin(1e-12));
    FormField z(geo, 1, ValueKind::tangent);
    CHECK(l2_inner(z, z) == 0.0);
    CHECK(l2_inner(a, a) > 0.0);
}

TEST_CASE("two evaluation routes for the degree pairing agree") {
    auto geo = make_warped_torus(4, 6, 0.25);
    double worst = 0.0;
    for (int k = 0; k <= 3; ++k) {
        FormField a = random_smooth_field(geo, k, ValueKind::tangent, 0, 501 + k);
        FormField b = random_smooth_field(geo, k, ValueKind::tangent, 0, 511 + k);
        FormField top = wedge_g(a, hodge_star(b));
        double star_route = 0.0;
        for (long p = 0; p < geo.nodes(); ++p) star_route += top.at(p, 0, 0);
        star_route *= geo.node_weight();
        const double direct = l2_inner(a, b);
        worst = std::max(worst, std::abs(direct - star_route) / std::max(1.0, std::abs(direct)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("codifferential is the discrete adjoint") {
    // flat torus: the transpose is exact
    auto flat = make_flat_torus(4, 8);
    FormField a = random_smooth_field(flat, 1, ValueKind::tangent, 0, 601);
    FormField b = random_smooth_field(flat, 2, ValueKind::tangent, 0, 602);
    const double lhs = l2_inner(dnabla(a), b);
    const double rhs = l2_inner(a, codifferential(b));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));

    // warped torus: second order under h-halving
    auto defect = [](int res) {
        auto geo = make_warped_torus(4, res, 0.25);
        double worst = 0.0;
        for (int k = 1; k <= 2; ++k) {
            FormField u = random_smooth_field(geo, k - 1, ValueKind::tangent, 0, 611 + k);
            FormField v = random_smooth_field(geo, k, ValueKind::tangent, 0, 622 + k);
            worst = std::max(worst, std::abs(l2_inner(dnabla(u), v) - l2_inner(u, codifferential(v))) /
                                        std::max(1.0, std::abs(l2_inner(dnabla(u), v))));
        }
        return worst;
    };
    const double e1 = defect(8), e2 = defect(16);
    CHECK(e1 <= 2e-2);
    CHECK(order_estimate(e1, e2) >= 1.9);

    // constant-coefficient fields are co-closed on the flat torus
    auto j = make_constant_ac(flat, standard_complex_matrix(4));
    CHECK(codifferential(j.A).sup_norm() <= 1e-13);

    // masked codifferential kills its bracket degree and nothing else
    FormField f2 = random_smooth_field(flat, 2, ValueKind::tangent, 0, 633);
    CHECK(codifferential(f2, DegreeMask::brackets({2})).sup_norm() == 0.0);
    CHECK((codifferential(f2, DegreeMask::brackets({5})) - codifferential(f2)).sup_norm() == 0.0);

    // degree zero maps to the zero form
    FormField f0 = random_smooth_field(flat, 0, ValueKind::tangent, 0, 655);
    CHECK(codifferential(f0).sup_norm() == 0.0);

    // the adjoint is refused away from metric connections
    auto injected = make_flat_torus(4, 6);
    inject_connection(injected, std::vector<double>(injected.nodes() * 64, 0.0));
    FormField g2 = random_smooth_field(injected, 2, ValueKind::tangent, 0, 644);
    CHECK_THROWS_WITH(codifferential(g2), Catch::Matchers::ContainsSubstring("metric connections"));
}

TEST_CASE("fiber grams and orthonormal frames") {
    auto flat = make_flat_torus(4, 6);
    FiberGram gram = make_fiber_gram(flat, 2);
    for (long p = 0; p < flat.nodes(); ++p)
        CHECK((gram.at(p) - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

    auto warped = make_warped_torus(4, 6, 0.25);
    FiberGram wg = make_fiber_gram(warped, 2);
    for (long p : {0L, warped.nodes() / 2, warped.nodes() - 1}) {
        Eigen::MatrixXd G = wg.at(p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
    OrthonormalFrame fr = make_orthonormal_frame(warped);
    double dev = 0.0;
    for (long p = 0; p < warped.nodes(); ++p)
        dev = std::max(dev, (fr.at(p).transpose() * warped.g_at(p) * fr.at(p) -
                             Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff());
    CHECK(dev <= 1e-12);
}
