#include <cmath>
#include <random>

#include "doctest.h"
#include "lattice.hpp"
#include "util.hpp"

using namespace nlslab;
using namespace nlslab::lattice;

namespace {

AnnulusSpec annulus(Rational cx, Rational cy, Rational r1, Rational r2, Boundary b = Boundary::ClosedClosed) {
    AnnulusSpec s;
    s.center = {cx, cy};
    s.r1sq = r1;
    s.r2sq = r2;
    s.boundary = b;
    return s;
}

}  // namespace

TEST_CASE("disk counts of the unit form") {
    CHECK(count_points(unit_form(), annulus(0, 0, 0, 25)) == 81);
    CHECK(count_points(unit_form(), annulus(0, 0, 0, 1)) == 5);
    CHECK(count_points(unit_form(), annulus(0, 0, 0, 0)) == 1);
    CHECK(count_points(unit_form(), annulus(Rational(1, 2), Rational(1, 2), 0, Rational(1, 2))) == 4);
}

TEST_CASE("hexagonal form: six neighbours and the deep hole") {
    CHECK(count_points(hex_form(), annulus(0, 0, 1, 1)) == 6);
    CHECK(count_points(hex_form(), annulus(0, 0, 0, 2, Boundary::ClosedOpen)) == 7);
    // nearest points to a deep hole sit at squared distance 1/3
    CHECK(count_points(hex_form(), annulus(Rational(1, 3), Rational(1, 3), 0, Rational(1, 3))) == 3);
    CHECK(count_points(hex_form(), annulus(Rational(1, 3), Rational(1, 3), 0, Rational(1, 3), Boundary::ClosedOpen)) ==
          0);
}

TEST_CASE("gram form of the hexagonal basis is x^2+xy+y^2") {
    auto g = gram_form(hex_basis());
    CHECK(g.a == Rational(1));
    CHECK(g.b == Rational(1));
    CHECK(g.c == Rational(1));
    auto u = gram_form(square_basis());
    CHECK(u.a == Rational(1));
    CHECK(u.b == Rational(0));
}

TEST_CASE("fast count equals the naive oracle on seeded instances") {
    auto rng = stream(99);
    std::uniform_int_distribution<int> cn(-12, 12), cd(1, 6), r(0, 300), coef(1, 4), bsel(0, 3);
    for (int i = 0; i < 120; ++i) {
        QuadraticForm2 q;
        do {
            q.a = Rational(coef(rng));
            q.c = Rational(coef(rng));
            q.b = Rational(cn(rng) % 4);
        } while (!q.positive_definite());
        Rational r1(r(rng), cd(rng)), r2(r(rng), cd(rng));
        if (r2 < r1) std::swap(r1, r2);
        auto s = annulus(Rational(cn(rng), cd(rng)), Rational(cn(rng), cd(rng)), r1, r2,
                         static_cast<Boundary>(bsel(rng)));
        REQUIRE(count_points(q, s) == count_points_naive(q, s));
    }
}

TEST_CASE("integer translations of the centre leave counts unchanged") {
    auto base = annulus(Rational(1, 7), Rational(2, 5), 30, 45);
    auto moved = annulus(Rational(1, 7) + Rational(3), Rational(2, 5) - Rational(5), 30, 45);
    CHECK(count_points(hex_form(), base) == count_points(hex_form(), moved));
}

TEST_CASE("boundary variants differ exactly by the circle points") {
    auto cc = annulus(0, 0, 25, 50);
    auto oo = annulus(0, 0, 25, 50, Boundary::OpenOpen);
    auto on1 = annulus(0, 0, 25, 25), on2 = annulus(0, 0, 50, 50);
    CHECK(count_points(unit_form(), cc) - count_points(unit_form(), oo) ==
          count_points(unit_form(), on1) + count_points(unit_form(), on2));
    CHECK(count_points(unit_form(), on1) == 12);
}

TEST_CASE("empty annulus and validation") {
    CHECK(count_points(unit_form(), annulus(0, 0, 5, 5, Boundary::ClosedOpen)) == 0);
    CHECK_THROWS_AS(count_points(unit_form(), annulus(0, 0, 9, 4)), ValidationError);
    QuadraticForm2 bad;
    bad.b = Rational(3);
    CHECK_THROWS_AS(count_points(bad, annulus(0, 0, 0, 4)), ValidationError);
}

TEST_CASE("gauss error is small relative to the area for large disks") {
    auto s = annulus(Rational(1, 3), Rational(1, 5), 0, 40000);
    double area = form_area(hex_form(), s.r1sq, s.r2sq);
    CHECK(area == doctest::Approx(2 * M_PI / std::sqrt(3.0) * 40000));
    CHECK(std::fabs(gauss_error(hex_form(), s)) < 0.01 * area);
}

TEST_CASE("hypothesis scan is deterministic and normalized") {
    CenterPolicy p;
    p.random = 4;
    auto a = scan_hypothesis_H(0.68, {16, 32}, p, 5);
    auto b = scan_hypothesis_H(0.68, {16, 32}, p, 5, 2);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].count == b.records[i].count);
        const auto& r = a.records[i];
        CHECK(r.normalized == doctest::Approx(r.count / std::pow(double(r.N), 0.68)).epsilon(1e-6));
    }
    CHECK(a.sup_count.size() == 2);
}
