#include "trilinear.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace nlslab::trilinear {

namespace {

Rational rabs(const Rational& r) { return r < Rational(0) ? -r : r; }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational interval_distance(const Rational& a1, const Rational& b1, const Rational& a2, const Rational& b2) {
    return rmax(Rational(0), rmax(a2 - b1, a1 - b2));
}

std::int64_t to_grid(const Rational& v, std::int64_t lambda) {
    Rational s = v * Rational(lambda);
    require(s.den == 1, "interval endpoint " + v.str() + " is not on the 1/lambda grid");
    return s.num;
}

// |a - c| >= g  with a, c scaled by lambda and g real: (a-c)^2 >= (lambda g)^2, exactly
bool gap_ok(i128 diff, const Rational& g, std::int64_t lambda) {
    i128 d = diff < 0 ? -diff : diff;
    // d >= lambda * g.num / g.den  <=>  d * g.den >= lambda * g.num
    return d * g.den >= i128(lambda) * g.num;
}

// |T - S| <= c_tol * lambda^2 with T = lambda^2 tau
bool shell_ok(i128 T_num, std::int64_t T_den, i128 S, const TrilinearSpec& spec) {
    // |T_num/T_den - S| <= c.num/c.den * lambda^2
    i128 lhs = T_num - S * T_den;
    if (lhs < 0) lhs = -lhs;
    return lhs * spec.c_tol.den <= i128(spec.c_tol.num) * spec.lambda * spec.lambda * T_den;
}

void validate(const TrilinearSpec& s) {
    require(s.lambda >= 1, "lambda must be a positive integer");
    for (const auto* I : {&s.I1, &s.I2, &s.I3}) require(I->lo <= I->hi, "interval endpoints out of order");
    require(s.c_tol > Rational(0), "c_tol must be positive");
    require(s.N13 >= Rational(0) && s.N23 >= Rational(0), "gaps must be nonnegative");
}

}  // namespace

TrilinearSpec make_spec(std::int64_t lambda, const Rational& a1, const Rational& b1, const Rational& a2,
                        const Rational& b2, const Rational& a3, const Rational& b3, const Rational& c_tol) {
    TrilinearSpec s;
    s.lambda = lambda;
    s.I1 = {to_grid(a1, lambda), to_grid(b1, lambda)};
    s.I2 = {to_grid(a2, lambda), to_grid(b2, lambda)};
    s.I3 = {to_grid(a3, lambda), to_grid(b3, lambda)};
    s.N13 = interval_distance(a1, b1, a3, b3);
    s.N23 = interval_distance(a2, b2, a3, b3);
    s.J = rmax(rabs(a1 - b3), rabs(b1 - a3));
    s.c_tol = c_tol;
    validate(s);
    require(b1 - a1 <= b2 - a2 && b2 - a2 <= b3 - a3, "intervals must satisfy |I1| <= |I2| <= |I3|");
    return s;
}

Gain enhanced_gain_K(const TrilinearSpec& spec) {
    require(spec.N23 > Rational(0), "N23 must be positive");
    const double i1 = spec.length(spec.I1), i2 = spec.length(spec.I2);
    const double n23 = spec.N23.to_double();
    Gain g;
    g.M = i1 * (spec.J.to_double() + i1) / n23;
    g.enhanced = i1 <= i2 / spec.gg && g.M <= std::min(i2, n23) / spec.gg;
    g.K = g.enhanced ? std::max(g.M, i1) : i2;
    return g;
}

std::int64_t count_A_set(const TrilinearSpec& spec, const Rational& n, const Rational& tau) {
    validate(spec);
    const std::int64_t L = spec.lambda;
    Rational nl = n * Rational(L);
    if (nl.den != 1) return 0;
    const std::int64_t Nn = nl.num;
    Rational tl = tau * Rational(L * L);
    std::int64_t count = 0;
    for (std::int64_t a = spec.I1.lo; a <= spec.I1.hi; ++a) {
        // c = Nn - a - b must lie in I3, which bounds b
        std::int64_t blo = std::max(spec.I2.lo, Nn - a - spec.I3.hi);
        std::int64_t bhi = std::min(spec.I2.hi, Nn - a - spec.I3.lo);
        for (std::int64_t b = blo; b <= bhi; ++b) {
            std::int64_t c = Nn - a - b;
            if (!gap_ok(i128(a) - c, spec.N13, L) || !gap_ok(i128(b) - c, spec.N23, L)) continue;
            i128 S = i128(a) * a + i128(b) * b + i128(c) * c;
            if (shell_ok(tl.num, tl.den, S, spec)) ++count;
        }
    }
    return count;
}

std::int64_t count_A_set_naive(const TrilinearSpec& spec, const Rational& n, const Rational& tau) {
    validate(spec);
    const Rational L(spec.lambda);
    std::int64_t count = 0;
    for (std::int64_t a = spec.I1.lo; a <= spec.I1.hi; ++a)
        for (std::int64_t b = spec.I2.lo; b <= spec.I2.hi; ++b)
            for (std::int64_t c = spec.I3.lo; c <= spec.I3.hi; ++c) {
                Rational n1 = Rational(a) / L, n2 = Rational(b) / L, n3 = Rational(c) / L;
                if (n1 + n2 + n3 != n) continue;
                if (rabs(n1 - n3) < spec.N13 || rabs(n2 - n3) < spec.N23) continue;
                if (rabs(tau - n1 * n1 - n2 * n2 - n3 * n3) > spec.c_tol) continue;
                ++count;
            }
    return count;
}

SupResult sup_count_A(const TrilinearSpec& spec, std::uint64_t pair_cap) {
    validate(spec);
    const std::int64_t L = spec.lambda;
    require_cap(static_cast<std::uint64_t>(spec.I1.points()) * spec.I2.points() <= pair_cap,
                "interval product exceeds the pair cap");
    // shell half-width in integer units of lambda^2 tau
    const Rational wr = spec.c_tol * Rational(L * L);
    const std::int64_t w = wr.num / wr.den;
    SupResult best;
    std::vector<std::int64_t> S;
    for (std::int64_t Nn = spec.I1.lo + spec.I2.lo + spec.I3.lo; Nn <= spec.I1.hi + spec.I2.hi + spec.I3.hi; ++Nn) {
        S.clear();
        for (std::int64_t a = spec.I1.lo; a <= spec.I1.hi; ++a) {
            std::int64_t blo = std::max(spec.I2.lo, Nn - a - spec.I3.hi);
            std::int64_t bhi = std::min(spec.I2.hi, Nn - a - spec.I3.lo);
            for (std::int64_t b = blo; b <= bhi; ++b) {
                std::int64_t c = Nn - a - b;
                if (!gap_ok(i128(a) - c, spec.N13, L) || !gap_ok(i128(b) - c, spec.N23, L)) continue;
                S.push_back(a * a + b * b + c * c);
            }
        }
        if (S.empty()) continue;
        std::sort(S.begin(), S.end());
        std::size_t j = 0;
        for (std::size_t i = 0; i < S.size(); ++i) {
            if (j < i) j = i;
            while (j + 1 < S.size() && S[j + 1] <= S[i] + 2 * w) ++j;
            auto cnt = static_cast<std::int64_t>(j - i + 1);
            if (cnt > best.sup) {
                best.sup = cnt;
                best.arg_n = Rational(Nn, L);
                best.arg_tau = Rational(S[i] + w, L * L);
            }
        }
    }
    Gain g = enhanced_gain_K(spec);
    best.K = g.K;
    best.normalized = static_cast<double>(best.sup) /
                      (static_cast<double>(L * L) * g.K / spec.n_max() + static_cast<double>(L));
    return best;
}

SupResult sup_count_A_grid(const TrilinearSpec& spec, const std::vector<Rational>& n_grid,
                           const std::vector<Rational>& tau_grid) {
    SupResult best;
    for (const auto& n : n_grid)
        for (const auto& t : tau_grid) {
            std::int64_t c = count_A_set(spec, n, t);
            if (c > best.sup) {
                best.sup = c;
                best.arg_n = n;
                best.arg_tau = t;
            }
        }
    Gain g = enhanced_gain_K(spec);
    best.K = g.K;
    const double L = static_cast<double>(spec.lambda);
    best.normalized = static_cast<double>(best.sup) / (L * L * g.K / spec.n_max() + L);
    return best;
}

Rational uv_residual(const Rational& x, const Rational& y, const Rational& at, const Rational& bt, const Rational& lam) {
    Rational lhs = x * x + y * y + x * y + lam * (x * at + y * bt);
    Rational u = x - y, v = x + y, a = at - bt, b = (at + bt) / Rational(3);
    Rational q1 = u + lam * a, q2 = v + lam * b;
    Rational rhs = Rational(1, 4) * q1 * q1 + Rational(3, 4) * q2 * q2 - lam * lam * a * a / Rational(4) -
                   Rational(3) * lam * lam * b * b / Rational(4);
    return lhs - rhs;
}

UvReport uv_change_of_variables_check(std::size_t samples, std::uint64_t seed) {
    auto rng = stream(seed, 0x75);
    std::uniform_int_distribution<std::int64_t> num(-200, 200), den(1, 12);
    UvReport rep;
    for (std::size_t i = 0; i < samples; ++i) {
        Rational v[5];
        for (auto& r : v) r = Rational(num(rng), den(rng));
        Rational res = rabs(uv_residual(v[0], v[1], v[2], v[3], v[4]));
        rep.max_abs_residual = rmax(rep.max_abs_residual, res);
        ++rep.samples;
    }
    return rep;
}

RatioResult trilinear_l2_ratio(const fourier::FourierState& p1, const fourier::FourierState& p2,
                               const fourier::FourierState& p3, double T, const TrilinearSpec& spec) {
    const double n1 = p1.l2_norm_sq(), n2 = p2.l2_norm_sq(), n3 = p3.l2_norm_sq();
    require(n1 > 0 && n2 > 0 && n3 > 0, "trilinear ratio undefined for a zero state");
    auto in = [&](const fourier::FourierState& p, const GridInterval& I) {
        for (const auto& [j, a] : p.modes())
            if (j < I.lo || j > I.hi) return false;
        return true;
    };
    require(p1.lambda == static_cast<double>(spec.lambda), "state scale differs from the spec");
    require(in(p1, spec.I1) && in(p2, spec.I2) && in(p3, spec.I3), "state support lies outside its interval");
    RatioResult r;
    r.ratio = std::sqrt(fourier::trilinear_l2_sq(p1, p2, p3, T).value / (n1 * n2 * n3));
    Gain g = enhanced_gain_K(spec);
    r.reference = std::sqrt(1.0 / spec.lambda + g.K / spec.n_max());
    r.normalized = r.ratio / r.reference;
    return r;
}

fourier::FourierState random_on(const GridInterval& I, std::int64_t lambda, std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
    auto rng = stream(seed, a, b);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    fourier::FourierState s;
    s.lambda = s.base_lambda = static_cast<double>(lambda);
    for (std::int64_t j = I.lo; j <= I.hi; ++j) {
        double re = g(rng), im = g(rng);
        s.coeffs[j] = {re, im};
    }
    return s;
}

std::vector<Geometry> standard_geometries() {
    // base case (|I1| comparable to |I2|), an enhanced thin-I1 case, and a wide-gap case
    return {
        {"base", Rational(0), Rational(1), Rational(2), Rational(4), Rational(16), Rational(20)},
        {"thin", Rational(0), Rational(1, 4), Rational(0), Rational(8), Rational(40), Rational(48)},
        {"wide", Rational(0), Rational(1, 2), Rational(1), Rational(2), Rational(24), Rational(26)},
    };
}

}  // namespace nlslab::trilinear
