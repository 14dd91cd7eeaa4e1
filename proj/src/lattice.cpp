#include "lattice.hpp"

#include <cmath>
#include <numbers>

#include "util.hpp"

namespace nlslab::lattice {

bool QuadraticForm2::positive_definite() const {
    return a > Rational(0) && discriminant() > Rational(0);
}

Rational QuadraticForm2::discriminant() const { return Rational(4) * a * c - b * b; }

double QuadraticForm2::value(double x, double y) const {
    return a.to_double() * x * x + b.to_double() * x * y + c.to_double() * y * y;
}

QuadraticForm2 unit_form() { return {Rational(1), Rational(0), Rational(1)}; }
QuadraticForm2 hex_form() { return {Rational(1), Rational(1), Rational(1)}; }

LatticeBasis2 square_basis() {
    LatticeBasis2 b;
    b.v1x.p = Rational(1);
    b.v2y.p = Rational(1);
    return b;
}

LatticeBasis2 hex_basis() {
    LatticeBasis2 b;
    b.radicand = Rational(3);
    b.v1x.p = Rational(1);
    b.v2x.p = Rational(1, 2);
    b.v2y.q = Rational(1, 2);
    return b;
}

namespace {

// Integer-scaled evaluation of Q(x - bx, y - by) against a rational threshold.
struct ScaledForm {
    i128 A, B, C;   // F * (a, b, c)
    i128 F;
    i128 D;         // common denominator of the center
    i128 Bx, By;    // D * center

    ScaledForm(const QuadraticForm2& q, const Vec2R& ctr) {
        std::int64_t f = lcm64(lcm64(q.a.den, q.b.den), q.c.den);
        F = f;
        A = i128(q.a.num) * (f / q.a.den);
        B = i128(q.b.num) * (f / q.b.den);
        C = i128(q.c.num) * (f / q.c.den);
        std::int64_t d = lcm64(ctr.x.den, ctr.y.den);
        D = d;
        Bx = i128(ctr.x.num) * (d / ctr.x.den);
        By = i128(ctr.y.num) * (d / ctr.y.den);
    }

    // F * D^2 * Q(x - cx, y - cy)
    i128 raw(std::int64_t x, std::int64_t y) const {
        i128 X = i128(x) * D - Bx, Y = i128(y) * D - By;
        return A * X * X + B * X * Y + C * Y * Y;
    }

    // sign of Q(x,y) - r
    int compare(std::int64_t x, std::int64_t y, const Rational& r) const {
        i128 lhs = raw(x, y) * r.den;
        i128 rhs = i128(r.num) * F * D * D;
        return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
};

void validate(const QuadraticForm2& form, const AnnulusSpec& region) {
    require(form.positive_definite(), "quadratic form is not positive definite");
    require(region.r1sq >= Rational(0), "r1sq must be nonnegative");
    require(region.r1sq <= region.r2sq, "r1sq must not exceed r2sq");
}

// Number of integers y in row x with Q < r (strict) or Q <= r.
std::int64_t row_count(const ScaledForm& sf, const QuadraticForm2& q, double cx, double cy, std::int64_t x,
                       const Rational& r, bool strict) {
    auto pred = [&](std::int64_t y) {
        int s = sf.compare(x, y, r);
        return strict ? s < 0 : s <= 0;
    };
    const long double a = q.a.to_double(), b = q.b.to_double(), c = q.c.to_double();
    const long double dx = static_cast<long double>(x) - cx;
    const long double rr = r.to_double();
    // c t^2 + b dx t + a dx^2 - r = 0 with t = y - cy
    long double disc = b * b * dx * dx - 4 * c * (a * dx * dx - rr);
    long double vert = -b * dx / (2 * c);
    long double half = disc > 0 ? std::sqrt(disc) / (2 * c) : 0;
    std::int64_t lo = static_cast<std::int64_t>(std::floor(cy + vert - half)) - 1;
    std::int64_t hi = static_cast<std::int64_t>(std::ceil(cy + vert + half)) + 1;
    while (lo <= hi && !pred(lo)) ++lo;
    if (lo > hi) return 0;
    while (!pred(hi)) --hi;
    while (pred(lo - 1)) --lo;
    while (pred(hi + 1)) ++hi;
    return hi - lo + 1;
}

}  // namespace

std::int64_t count_points(const QuadraticForm2& form, const AnnulusSpec& region) {
    validate(form, region);
    ScaledForm sf(form, region.center);
    const double cx = region.center.x.to_double(), cy = region.center.y.to_double();
    const double disc = form.discriminant().to_double();
    const double w = std::sqrt(4.0 * form.c.to_double() * region.r2sq.to_double() / disc);
    const std::int64_t x0 = static_cast<std::int64_t>(std::floor(cx - w)) - 2;
    const std::int64_t x1 = static_cast<std::int64_t>(std::ceil(cx + w)) + 2;
    const bool inner_open = region.boundary == Boundary::OpenClosed || region.boundary == Boundary::OpenOpen;
    const bool outer_open = region.boundary == Boundary::ClosedOpen || region.boundary == Boundary::OpenOpen;
    std::int64_t total = 0;
    for (std::int64_t x = x0; x <= x1; ++x) {
        std::int64_t outer = row_count(sf, form, cx, cy, x, region.r2sq, outer_open);
        if (outer == 0) continue;
        // points excluded from the inside: Q < r1 (closed inner) or Q <= r1 (open inner)
        std::int64_t inner = row_count(sf, form, cx, cy, x, region.r1sq, !inner_open);
        total += outer - inner;
    }
    return total;
}

std::int64_t count_points_naive(const QuadraticForm2& form, const AnnulusSpec& region) {
    validate(form, region);
    ScaledForm sf(form, region.center);
    const double cx = region.center.x.to_double(), cy = region.center.y.to_double();
    // Q >= lambda_min (x^2+y^2) bounds the search box
    const double a = form.a.to_double(), c = form.c.to_double(), b = form.b.to_double();
    const double lmin = 0.5 * (a + c - std::sqrt((a - c) * (a - c) + b * b));
    const double R = std::sqrt(region.r2sq.to_double() / lmin) + 2;
    std::int64_t total = 0;
    for (std::int64_t x = static_cast<std::int64_t>(std::floor(cx - R)); x <= std::ceil(cx + R); ++x)
        for (std::int64_t y = static_cast<std::int64_t>(std::floor(cy - R)); y <= std::ceil(cy + R); ++y) {
            int lo = sf.compare(x, y, region.r1sq), hi = sf.compare(x, y, region.r2sq);
            bool in_lo = (region.boundary == Boundary::OpenClosed || region.boundary == Boundary::OpenOpen) ? lo > 0 : lo >= 0;
            bool in_hi = (region.boundary == Boundary::ClosedOpen || region.boundary == Boundary::OpenOpen) ? hi < 0 : hi <= 0;
            if (in_lo && in_hi) ++total;
        }
    return total;
}

double form_area(const QuadraticForm2& form, const Rational& r1sq, const Rational& r2sq) {
    return 2.0 * std::numbers::pi * (r2sq - r1sq).to_double() / std::sqrt(form.discriminant().to_double());
}

double gauss_error(const QuadraticForm2& form, const AnnulusSpec& region) {
    return static_cast<double>(count_points(form, region)) - form_area(form, region.r1sq, region.r2sq);
}

QuadraticForm2 gram_form(const LatticeBasis2& basis) {
    const Rational d = basis.radicand;
    // (p1 + q1 s)(p2 + q2 s) with s^2 = d; the irrational part must cancel in every Gram entry
    auto mul = [&](const Surd& u, const Surd& v, Rational& irr) {
        irr = irr + u.p * v.q + u.q * v.p;
        return u.p * v.p + u.q * v.q * d;
    };
    Rational i11{0}, i12{0}, i22{0};
    Rational g11 = mul(basis.v1x, basis.v1x, i11) + mul(basis.v1y, basis.v1y, i11);
    Rational g12 = mul(basis.v1x, basis.v2x, i12) + mul(basis.v1y, basis.v2y, i12);
    Rational g22 = mul(basis.v2x, basis.v2x, i22) + mul(basis.v2y, basis.v2y, i22);
    if (d != Rational(0))
        require(i11 == Rational(0) && i12 == Rational(0) && i22 == Rational(0), "Gram form is not rational");
    QuadraticForm2 q{g11 * basis.scale_sq, Rational(2) * g12 * basis.scale_sq, g22 * basis.scale_sq};
    require(basis.scale_sq > Rational(0), "basis scale must be positive");
    require(q.discriminant() != Rational(0), "degenerate basis");
    return q;
}

Rational power_rational(std::int64_t N, double alpha) {
    const std::int64_t den = std::int64_t(1) << 24;
    long double v = std::pow(static_cast<long double>(N), static_cast<long double>(alpha));
    return Rational(static_cast<std::int64_t>(std::floor(v * den)), den);
}

std::vector<NamedCenter> sample_centers(const CenterPolicy& policy, std::uint64_t seed) {
    std::vector<NamedCenter> out;
    if (policy.origin) out.push_back({"origin", {Rational(0), Rational(0)}});
    if (policy.deep_holes) {
        out.push_back({"deep_hole", {Rational(1, 3), Rational(1, 3)}});
        out.push_back({"deep_hole", {Rational(2, 3), Rational(2, 3)}});
    }
    if (policy.edge_midpoints) {
        out.push_back({"edge_midpoint", {Rational(1, 2), Rational(0)}});
        out.push_back({"edge_midpoint", {Rational(0), Rational(1, 2)}});
        out.push_back({"edge_midpoint", {Rational(1, 2), Rational(1, 2)}});
    }
    auto rng = stream(seed, 0x48);
    const std::int64_t den = 1 << 16;
    std::uniform_int_distribution<std::int64_t> u(0, den - 1);
    for (std::size_t i = 0; i < policy.random; ++i) {
        std::int64_t px = u(rng), py = u(rng);
        out.push_back({"random", {Rational(px, den), Rational(py, den)}});
    }
    return out;
}

ScanResult scan_hypothesis_H(double alpha, const std::vector<std::int64_t>& N_list, const CenterPolicy& policy,
                             std::uint64_t seed, int threads) {
    require(!N_list.empty(), "N_list must not be empty");
    require(alpha > 0 && alpha < 2, "alpha must lie in (0,2)");
    for (auto N : N_list) require(N >= 1 && (N & (N - 1)) == 0, "N values must be dyadic");
    require(N_list.back() <= (std::int64_t(1) << 20), "N exceeds cap 2^20");
    const auto centers = sample_centers(policy, seed);
    require(!centers.empty(), "center policy selects no centers");
    const QuadraticForm2 q = hex_form();
    ScanResult res;
    res.records.resize(N_list.size() * centers.size());
    parallel_for(res.records.size(), threads, [&](std::size_t idx) {
        std::size_t ni = idx / centers.size(), ci = idx % centers.size();
        const std::int64_t N = N_list[ni];
        AnnulusSpec reg;
        reg.center = centers[ci].at;
        reg.r1sq = Rational(N * N);
        reg.r2sq = reg.r1sq + power_rational(N, alpha);
        CountRecord& r = res.records[idx];
        r.N = N;
        r.alpha = alpha;
        r.center_id = ci;
        r.center_kind = centers[ci].kind;
        r.center = reg.center;
        r.r1sq = reg.r1sq;
        r.r2sq = reg.r2sq;
        r.count = count_points(q, reg);
        r.normalized = static_cast<double>(r.count) / std::pow(static_cast<double>(N), alpha);
        r.seed = seed;
    });
    res.sup_count.assign(N_list.size(), 0);
    res.sup_normalized.assign(N_list.size(), 0.0);
    for (const auto& r : res.records) {
        std::size_t ni = &r - res.records.data();
        ni /= centers.size();
        res.sup_count[ni] = std::max(res.sup_count[ni], r.count);
        res.sup_normalized[ni] = std::max(res.sup_normalized[ni], r.normalized);
    }
    return res;
}

}  // namespace nlslab::lattice
