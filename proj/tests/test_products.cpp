#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace bvf;

namespace {

double pf_diff(const PointForm& a, const PointForm& b) {
    REQUIRE(a.data.size() == b.data.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

TEST_CASE("wedge_scalar degenerate and rank-one cases") {
    std::mt19937_64 rng(5);
    // degree-0 scalar acts by pointwise scaling
    auto f = oracle::random_form(rng, 3, 0, ValueKind::scalar);
    auto B = oracle::random_form(rng, 3, 2, ValueKind::tangent);
    auto scaled = wedge_scalar(f, B);
    for (int c = 0; c < B.ncomp(); ++c)
        for (int v = 0; v < B.fdim(); ++v)
            CHECK(scaled(c, v) == Catch::Approx(f(0, 0) * B(c, v)).margin(1e-15));

    // k = l = 1, n = 2: the two-term expansion
    auto beta = oracle::random_form(rng, 2, 1, ValueKind::scalar);
    auto T = oracle::random_form(rng, 2, 1, ValueKind::tangent);
    auto w = wedge_scalar(beta, T);
    for (int v = 0; v < 2; ++v)
        CHECK(w(0, v) == Catch::Approx(beta(0, 0) * T(1, v) - beta(1, 0) * T(0, v)).margin(1e-14));
}

TEST_CASE("wedge_end composes values") {
    std::mt19937_64 rng(6);
    const int n = 3;
    auto a = oracle::random_form(rng, n, 1, ValueKind::endo);
    auto b = oracle::random_form(rng, n, 1, ValueKind::endo);
    auto ab = wedge_end(a, b);
    // (a^b)(e0,e1) = a(e0) b(e1) - a(e1) b(e0) as matrix products
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double want = 0.0;
            for (int l = 0; l < n; ++l)
                want += a(0, i * n + l) * b(1, l * n + j) - a(1, i * n + l) * b(0, l * n + j);
            CHECK(ab(index_table(n, 2).rank(0b11), i * n + j) == Catch::Approx(want).margin(1e-14));
        }
    // identity-valued 0-form is a left unit
    PointForm id(n, 0, ValueKind::endo);
    for (int i = 0; i < n; ++i) id(0, i * n + i) = 1.0;
    auto c = oracle::random_form(rng, n, 2, ValueKind::endo);
    CHECK(pf_diff(wedge_end(id, c), c) == 0.0);
}

TEST_CASE("act_end applies endomorphisms to tangent values") {
    std::mt19937_64 rng(7);
    const int n = 4;
    PointForm id(n, 0, ValueKind::endo);
    for (int i = 0; i < n; ++i) id(0, i * n + i) = 1.0;
    auto rho = oracle::random_form(rng, n, 2, ValueKind::tangent);
    CHECK(pf_diff(act_end(id, rho), rho) == 0.0);

    auto a = oracle::random_form(rng, n, 1, ValueKind::endo);
    auto r1 = oracle::random_form(rng, n, 1, ValueKind::tangent);
    auto ar = act_end(a, r1);
    const IndexTable& t2 = index_table(n, 2);
    for (int c = 0; c < t2.count(); ++c) {
        const auto& R = t2.tuple(c);
        for (int v = 0; v < n; ++v) {
            double want = 0.0;
            for (int l = 0; l < n; ++l)
                want += a(R[0], v * n + l) * r1(R[1], l) - a(R[1], v * n + l) * r1(R[0], l);
            CHECK(ar(c, v) == Catch::Approx(want).margin(1e-13));
        }
    }
}

TEST_CASE("wedge_poly evaluates A^A on decomposables and kills even degrees") {
    std::mt19937_64 rng(8);
    const int n = 4;
    auto A = oracle::random_form(rng, n, 1, ValueKind::tangent);
    auto AA = wedge_poly(A, A);
    // (A^A)(X,Y) = A(X) wedge A(Y)
    std::vector<std::vector<double>> args(2, std::vector<double>(n));
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (auto& v : args)
        for (double& x : v) x = coef(rng);
    auto val = AA.eval(args);
    auto ax = A.eval({args[0]});
    auto ay = A.eval({args[1]});
    const IndexTable& pairs = index_table(n, 2);
    for (int c = 0; c < pairs.count(); ++c) {
        const auto& K = pairs.tuple(c);
        CHECK(val[c] == Catch::Approx(ax[K[0]] * ay[K[1]] - ax[K[1]] * ay[K[0]]).margin(1e-13));
    }
    // homogeneous even degree: exact cancellation
    auto even = oracle::random_form(rng, n, 2, ValueKind::tangent);
    CHECK(wedge_poly(even, even).max_abs() <= 1e-14);
    // degree overflow collapses to the empty zero form
    auto big = oracle::random_form(rng, 2, 2, ValueKind::tangent);
    CHECK(wedge_poly(big, big).empty());
}

TEST_CASE("act_poly contracts trailing slots and honors s < j") {
    std::mt19937_64 rng(9);
    const int n = 4;
    // s = 2, j = 2: full contraction of the value
    auto rho = oracle::random_form(rng, n, 2, ValueKind::tangent);
    auto A = oracle::random_form(rng, n, 1, ValueKind::tangent);
    auto AA = wedge_poly(A, A);
    auto out = act_poly(rho, AA);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<std::vector<double>> args(2, std::vector<double>(n));
    for (auto& v : args)
        for (double& x : v) x = coef(rng);
    auto got = out.eval(args);
    auto ax = A.eval({args[0]});
    auto ay = A.eval({args[1]});
    auto want = rho.eval({ax, ay});
    for (int v = 0; v < n; ++v) CHECK(got[v] == Catch::Approx(want[v]).margin(1e-12));

    // s < j gives the zero form
    auto rho1 = oracle::random_form(rng, n, 1, ValueKind::tangent);
    auto z = act_poly(rho1, AA);
    CHECK(z.degree == 0);
    CHECK(z.max_abs() == 0.0);
}

TEST_CASE("right action fails exactly one module axiom") {
    std::mt19937_64 rng(7);
    auto rho = oracle::random_form(rng, 3, 2, ValueKind::tangent);
    auto g1 = oracle::random_form(rng, 3, 1, ValueKind::tangent);
    auto g2 = oracle::random_form(rng, 3, 1, ValueKind::tangent);
    auto lhs = act_poly(rho, wedge_poly(g1, g2));
    auto rhs = act_poly(act_poly(rho, g1), g2);
    CHECK(pf_diff(lhs, rhs) > 1e-6);
}

TEST_CASE("all products match the literal permutation-sum oracle") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n)
        for (int k = 0; k <= 3; ++k)
            for (int l = 0; l <= 3; ++l)
                for (int rep = 0; rep < 10; ++rep) {
                    auto bs = oracle::random_form(rng, n, k, ValueKind::scalar);
                    auto tl = oracle::random_form(rng, n, l, ValueKind::tangent);
                    auto tk = oracle::random_form(rng, n, k, ValueKind::tangent);
                    auto ek = oracle::random_form(rng, n, k, ValueKind::endo);
                    auto el = oracle::random_form(rng, n, l, ValueKind::endo);
                    worst = std::max(worst, pf_diff(wedge_scalar(bs, tl), oracle::wedge_scalar(bs, tl)));
                    worst = std::max(worst, pf_diff(wedge_end(ek, el), oracle::wedge_end(ek, el)));
                    worst = std::max(worst, pf_diff(act_end(ek, tl), oracle::act_end(ek, tl)));
                    worst = std::max(worst, pf_diff(wedge_poly(tk, tl), oracle::wedge_poly(tk, tl)));
                    worst = std::max(worst, pf_diff(act_poly(tk, tl), oracle::act_poly(tk, tl)));
                }
    CHECK(worst <= 1e-12);
}

TEST_CASE("anti-commutation and bilinearity") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double anti = 0.0, bilin = 0.0;
    for (int i = 0; i <= 3; ++i)
        for (int k = 0; k <= 3; ++k)
            for (int rep = 0; rep < 10; ++rep) {
                auto g = oracle::random_form(rng, 4, i, ValueKind::tangent);
                auto t = oracle::random_form(rng, 4, k, ValueKind::tangent);
                auto gt = wedge_poly(g, t);
                auto tg = wedge_poly(t, g);
                const double sgn = ((i * k + 1) % 2 == 0) ? 1.0 : -1.0;
                for (std::size_t m = 0; m < gt.data.size(); ++m)
                    anti = std::max(anti, std::abs(gt.data[m] - sgn * tg.data[m]));
                auto g2 = oracle::random_form(rng, 4, i, ValueKind::tangent);
                const double a = coef(rng), b = coef(rng);
                bilin = std::max(bilin, pf_diff(wedge_poly(a * g + b * g2, t),
                                                a * wedge_poly(g, t) + b * wedge_poly(g2, t)));
            }
    CHECK(anti <= 1e-14);
    CHECK(bilin <= 1e-12);
}

TEST_CASE("evaluation is alternating and inverts canonical storage") {
    std::mt19937_64 rng(13);
    auto f = oracle::random_form(rng, 4, 3, ValueKind::tangent);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<std::vector<double>> args(3, std::vector<double>(4));
    for (auto& v : args)
        for (double& x : v) x = coef(rng);
    auto v1 = f.eval(args);
    std::swap(args[1], args[2]);
    auto v2 = f.eval(args);
    for (int v = 0; v < 4; ++v) CHECK(v1[v] == Catch::Approx(-v2[v]).margin(1e-12));

    // basis-tuple evaluation returns sign * stored coefficient
    std::vector<int> tuple{3, 0, 2};
    std::vector<std::vector<double>> basis;
    for (int idx : tuple) {
        std::vector<double> e(4, 0.0);
        e[idx] = 1.0;
        basis.push_back(e);
    }
    auto got = f.eval(basis);
    std::vector<int> sorted = tuple;
    int sg = canonicalize(sorted, 4);
    int mask = 0;
    for (int v : sorted) mask |= 1 << v;
    for (int v = 0; v < 4; ++v)
        CHECK(got[v] == Catch::Approx(sg * f(index_table(4, 3).rank(mask), v)).margin(1e-13));
}

TEST_CASE("lift applies pointwise operations over the grid") {
    auto geo = make_flat_torus(2, 6);
    FormField a = random_smooth_field(geo, 1, ValueKind::tangent, 0, 21);
    FormField b = random_smooth_field(geo, 1, ValueKind::tangent, 0, 22);
    FormField w = f_wedge_poly(a, b);
    // node-loop oracle
    double worst = 0.0;
    for (long p = 0; p < geo.nodes(); ++p) {
        PointForm want = wedge_poly(a.point(p), b.point(p));
        PointForm got = w.point(p);
        worst = std::max(worst, pf_diff(got, want));
    }
    CHECK(worst == 0.0);

    auto geo2 = make_flat_torus(2, 8);
    FormField c = random_smooth_field(geo2, 1, ValueKind::tangent, 0, 23);
    CHECK_THROWS_AS(f_wedge_poly(a, c), std::invalid_argument);
}
