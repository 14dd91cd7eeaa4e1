#include <cmath>

#include "doctest.h"
#include "trilinear.hpp"
#include "util.hpp"

using namespace nlslab;
using namespace nlslab::trilinear;

TEST_CASE("worked count example") {
    auto s = make_spec(1, 0, 2, 4, 6, 16, 18, 1);
    s.N13 = 10;
    s.N23 = 10;
    CHECK(count_A_set(s, 22, 340) == 1);
    CHECK(count_A_set_naive(s, 22, 340) == 1);
}

TEST_CASE("gain without enhancement") {
    TrilinearSpec g;
    g.I1 = {0, 2};
    g.I2 = {0, 4};
    g.I3 = {0, 60};
    g.J = 100;
    g.N23 = 50;
    auto G = enhanced_gain_K(g);
    CHECK(G.M == doctest::Approx(4.08));
    CHECK_FALSE(G.enhanced);
    CHECK(G.K == doctest::Approx(4.0));
}

TEST_CASE("equal short intervals are never enhanced") {
    TrilinearSpec g;
    g.I1 = {0, 1};
    g.I2 = {0, 1};
    g.I3 = {0, 1};
    g.J = 1;
    g.N23 = 1000;
    CHECK_FALSE(enhanced_gain_K(g).enhanced);
}

TEST_CASE("fast count equals the naive oracle") {
    auto rng = stream(21);
    std::uniform_int_distribution<int> lam(1, 4), lo(-6, 6), len(0, 4), tau(0, 400), cden(1, 3);
    int nonzero = 0;
    for (int i = 0; i < 100; ++i) {
        const std::int64_t L = lam(rng);
        int a1 = lo(rng), l1 = len(rng), a2 = lo(rng), l2 = l1 + len(rng), a3 = lo(rng) + 10, l3 = l2 + len(rng);
        auto s = make_spec(L, Rational(a1, L), Rational(a1 + l1, L), Rational(a2, L), Rational(a2 + l2, L),
                           Rational(a3, L), Rational(a3 + l3, L), Rational(cden(rng), cden(rng)));
        // centre the shell on a random triple so that most instances are nonempty
        std::int64_t x = a1 + len(rng) % (l1 + 1), y = a2 + len(rng) % (l2 + 1), z = a3 + len(rng) % (l3 + 1);
        Rational n(x + y + z, L);
        Rational t = Rational(x * x + y * y + z * z, L * L) + Rational(tau(rng) % 5 - 2, cden(rng));
        auto k = count_A_set(s, n, t);
        REQUIRE(k == count_A_set_naive(s, n, t));
        nonzero += k > 0;
    }
    CHECK(nonzero >= 10);
}

TEST_CASE("reflecting every interval and n leaves the count unchanged") {
    auto s = make_spec(4, 0, 1, 2, 4, 16, 20, 1);
    auto r = make_spec(4, -1, 0, -4, -2, -20, -16, 1);
    for (int k = 0; k < 20; ++k) {
        Rational n(72 + k, 4), tau(300 + 3 * k);
        CHECK(count_A_set(s, n, tau) == count_A_set(r, -n, tau));
    }
}

TEST_CASE("count is monotone in the shell tolerance") {
    auto s = make_spec(4, 0, 1, 2, 4, 16, 20, 1);
    Rational n(80, 4), tau(330);
    std::int64_t prev = -1;
    for (auto c : {Rational(1, 8), Rational(1, 2), Rational(1), Rational(4), Rational(16)}) {
        s.c_tol = c;
        auto k = count_A_set(s, n, tau);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("sup over all shells dominates grid sups") {
    auto s = make_spec(4, 0, 1, 2, 4, 16, 20, 1);
    auto sup = sup_count_A(s);
    CHECK(count_A_set(s, sup.arg_n, sup.arg_tau) == sup.sup);
    std::vector<Rational> ns, ts;
    for (int k = 72; k <= 100; k += 2) ns.push_back(Rational(k, 4));
    for (int t = 250; t <= 550; t += 5) ts.push_back(Rational(t));
    CHECK(sup_count_A_grid(s, ns, ts).sup <= sup.sup);
}

TEST_CASE("pair cap refusal") {
    auto s = make_spec(64, 0, 1, 2, 4, 16, 20, 1);
    CHECK_THROWS_AS(sup_count_A(s, 10), CapExceeded);
}

TEST_CASE("interval validation") {
    CHECK_THROWS_AS(make_spec(3, 0, Rational(1, 2), 0, 1, 2, 4, 1), ValidationError);
    CHECK_THROWS_AS(make_spec(2, 0, 2, 0, 1, 4, 8, 1), ValidationError);
}

TEST_CASE("uv completion of squares is exact") {
    CHECK(uv_residual(1, 2, 3, 4, 5) == Rational(0));
    auto rep = uv_change_of_variables_check(200, 3);
    CHECK(rep.samples == 200);
    CHECK(rep.max_abs_residual == Rational(0));
}

TEST_CASE("trilinear ratio on single modes") {
    fourier::FourierState a, b, c;
    for (auto* p : {&a, &b, &c}) p->lambda = p->base_lambda = 2;
    a.coeffs[0] = 1;
    b.coeffs[5] = 1;
    c.coeffs[40] = 1;
    auto sp = make_spec(2, 0, 1, 2, 4, 16, 20, 1);
    auto r = trilinear_l2_ratio(a, b, c, 0.7, sp);
    CHECK(r.ratio == doctest::Approx(std::sqrt(0.7) / 2 / (2 * M_PI)).epsilon(1e-12));
    c.coeffs[100] = 1;
    CHECK_THROWS_AS(trilinear_l2_ratio(a, b, c, 0.7, sp), ValidationError);
}
