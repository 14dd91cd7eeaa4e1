#include <cmath>

#include "doctest.h"
#include "fourier.hpp"
#include "util.hpp"

using namespace nlslab;
using namespace nlslab::fourier;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("closed-form L6 values") {
    FourierState one;
    one.coeffs[3] = cplx(0.6, -0.8) * 1.3;
    const double A = std::abs(one.coeffs[3]);
    CHECK(rel(l6_time_integral_exact(one, 0.4).value, 2 * M_PI * 0.4 * std::pow(A, 6)) < 1e-12);
    FourierState two;
    two.coeffs[0] = 1;
    two.coeffs[1] = 1;
    CHECK(rel(l6_time_integral_exact(two, 0.7).value, 40 * M_PI * 0.7) < 1e-12);
    CHECK(rel(l6_time_integral_bruteforce(two, 0.7), 40 * M_PI * 0.7) < 1e-12);
}

TEST_CASE("exact L6 agrees with brute force and quadrature") {
    for (std::uint64_t m = 0; m < 4; ++m) {
        auto s = random_state(3, 17, m, 0);
        for (double T : {0.1, 1.0}) {
            const double ex = l6_time_integral_exact(s, T).value;
            CHECK(rel(l6_time_integral_bruteforce(s, T), ex) < 1e-11);
            CHECK(rel(l6_norm_quadrature(s, T, min_spatial_points(s), 4097), ex) < 1e-6);
            CHECK(rel(l6_time_integral_gauss(s, T), ex) < 1e-9);
        }
    }
}

TEST_CASE("linear evolution preserves mass and composes") {
    auto s = random_state(5, 3, 0, 0);
    s.lambda = 2;
    auto a = evolve_linear(evolve_linear(s, 0.3), 0.4);
    auto b = evolve_linear(s, 0.7);
    CHECK(rel(a.l2_norm_sq(), s.l2_norm_sq()) < 1e-14);
    for (const auto& [j, c] : a.coeffs) CHECK(std::abs(c - b.coeffs.at(j)) < 1e-12);
}

TEST_CASE("torus rescaling preserves the L2 norm and composes") {
    auto s = random_state(4, 8, 1, 2);
    auto r = rescale(rescale(s, 2.0), 3.0);
    CHECK(r.lambda == doctest::Approx(6.0));
    CHECK(rel(r.l2_norm_sq(), s.l2_norm_sq()) < 1e-13);
    CHECK_THROWS_AS(rescale(s, 0.0), ValidationError);
}

TEST_CASE("sigma exponent") {
    CHECK(sigma_exponent(6, 6) == doctest::Approx(0.0));
    CHECK(sigma_exponent(2, 4) == doctest::Approx(0.5));
}

TEST_CASE("time kernel limits") {
    CHECK(time_kernel(0.0, 2.0) == cplx(2.0, 0.0));
    auto k = time_kernel(1e-9, 2.0);
    CHECK(std::abs(k - cplx(2.0, 0.0)) < 1e-8);
}

TEST_CASE("h spectrum matches brute force and sums correctly") {
    auto rng = stream(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::int64_t N : {1, 2, 4}) {
        std::map<std::int64_t, double> m;
        for (std::int64_t k = -N; k <= N; ++k) m[k] = u(rng);
        auto f = h_spectrum(m, N), b = h_spectrum_bruteforce(m, N);
        REQUIRE(f.values.size() == b.values.size());
        for (std::size_t t = 0; t < f.values.size(); ++t) {
            CHECK(f.values[t] == doctest::Approx(b.values[t]).epsilon(1e-12));
            CHECK(f.values[t] >= 0);
        }
    }
    std::map<std::int64_t, double> m01{{0, 1}, {1, 1}};
    auto h = h_spectrum(m01, 1);
    CHECK(h.at(0) == doctest::Approx(20));
}

TEST_CASE("h spectrum refuses N above its cap") {
    std::map<std::int64_t, double> m{{0, 1}};
    CHECK_THROWS_AS(h_spectrum(m, 32, 16), CapExceeded);
}

TEST_CASE("chain inequality ratio is finite and positive") {
    for (std::int64_t N : {4, 8, 16}) {
        std::map<std::int64_t, double> m;
        for (std::int64_t k = -N; k <= N; ++k) m[k] = 1.0;
        auto row = chain_inequality(m, N, 0.7);
        CHECK(std::isfinite(row.ratio));
        CHECK(row.ratio > 0);
        CHECK(row.rhs > 0);
    }
}

TEST_CASE("trilinear L2 of single modes") {
    FourierState a, b, c;
    a.coeffs[0] = 1;
    b.coeffs[2] = 1;
    c.coeffs[7] = 1;
    const double T = 0.3;
    // |e^{it..}|=1 pointwise: integral of (1/lambda)^6 over the torus and time
    CHECK(rel(trilinear_l2_sq(a, b, c, T).value, 2 * M_PI * T) < 1e-12);
}

TEST_CASE("least squares slope") {
    CHECK(least_squares_slope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
    CHECK(least_squares_slope({1}, {1}) == 0.0);
}

TEST_CASE("strichartz scan is deterministic") {
    auto a = strichartz_scan(0.7, {8, 16}, 2, true, 9);
    auto b = strichartz_scan(0.7, {8, 16}, 2, true, 9, 2);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].ratio == b.rows[i].ratio);
    CHECK(a.rows.size() == 6);
}
