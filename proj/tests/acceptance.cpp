// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fourier.hpp"
#include "imethod.hpp"
#include "lattice.hpp"
#include "plane.hpp"
#include "trilinear.hpp"
#include "util.hpp"

using namespace nlslab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

double spread(const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) lo = std::min(lo, x), hi = std::max(hi, x);
    return lo > 0 ? hi / lo : INFINITY;
}

const int kThreads = default_threads();

Outcome c1_counting() {
    using namespace lattice;
    auto t0 = std::chrono::steady_clock::now();
    auto rng = stream(2024, 1);
    std::uniform_int_distribution<int> coef(1, 5), cross(-4, 4), num(-40, 40), den(1, 9), rad(0, 400), pick(0, 3),
        bnd(0, 3);
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
        QuadraticForm2 q;
        switch (pick(rng)) {
            case 0: q = hex_form(); break;
            case 1: q = unit_form(); break;
            default:
                do {
                    q.a = Rational(coef(rng), den(rng) % 3 + 1);
                    q.b = Rational(cross(rng), den(rng) % 3 + 1);
                    q.c = Rational(coef(rng), den(rng) % 3 + 1);
                } while (!q.positive_definite());
        }
        AnnulusSpec s;
        s.center = {Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
        s.r1sq = Rational(rad(rng), den(rng));
        s.r2sq = Rational(rad(rng), 1);
        if (s.r2sq < s.r1sq) std::swap(s.r1sq, s.r2sq);
        s.boundary = static_cast<Boundary>(bnd(rng));
        if (count_points(q, s) != count_points_naive(q, s)) ++mismatches;
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {mismatches == 0 && sec < 5, fmt("mismatches %.0f of 200, %.2f s (limit 5 s)", mismatches, sec)};
}

Outcome c2_reduction() {
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::int64_t> Ks{1, 2, 4, 8};
    auto cal = plane::calibrate_reduction(-6, 6, Ks, 200, kThreads);
    if (!cal.calibration) return {false, "calibration failed: " + cal.failure};
    const auto& c = *cal.calibration;
    auto rep = plane::verify_reduction(c, -30, 30, Ks, 900, kThreads);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto slice = plane::count_plane_slice({0, 0, 4, 900});
    lattice::AnnulusSpec disk;
    disk.r2sq = Rational(2);
    disk.boundary = lattice::Boundary::ClosedOpen;
    const auto hex = lattice::count_points(lattice::hex_form(), disk);
    const auto planar = plane::planar_count(c.radius_scale, c.offsets[0], 0, 4);
    bool ok = cal.unique && rep.failed == 0 && !rep.cells.empty() && slice == 7 && hex == 7 && planar == 7 && sec < 60;
    return {ok, "unique " + std::string(cal.unique ? "yes" : "no") + ", scale " + c.radius_scale.str() +
                    fmt(", cells %.0f passed %.0f failed %.0f", double(rep.cells.size()), double(rep.passed),
                        double(rep.failed)) +
                    fmt(", spot slice %.0f hex %.0f planar %.0f", double(slice), double(hex), double(planar)) +
                    fmt(", %.1f s (limit 60 s)", sec)};
}

Outcome c3_hypothesis() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::int64_t> Ns;
    for (int e = 4; e <= 12; ++e) Ns.push_back(std::int64_t(1) << e);
    lattice::CenterPolicy pol;
    pol.random = 64;
    auto res = lattice::scan_hypothesis_H(0.68, Ns, pol, 2024, kThreads);
    double top = 0, mid = 0;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (i + 3 >= Ns.size()) top = std::max(top, res.sup_normalized[i]);
        if (Ns[i] >= 128 && Ns[i] <= 512) mid = std::max(mid, res.sup_normalized[i]);
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double f = top / mid;
    return {f <= 2.5 && sec < 300,
            fmt("top-3 max %.4g, mid max %.4g, factor %.4g (limit 2.5), %.1f s", top, mid, f, sec)};
}

Outcome c4_l6() {
    using namespace fourier;
    double worst = 0;
    auto rng = stream(2024, 4);
    std::uniform_int_distribution<int> modes(1, 9), k(-6, 6);
    std::normal_distribution<double> g(0, 0.7);
    for (int i = 0; i < 32; ++i) {
        FourierState s;
        const int m = modes(rng);
        while (static_cast<int>(s.coeffs.size()) < m) s.coeffs[k(rng)] = cplx(g(rng), g(rng));
        for (double T : {0.1, 1.0}) {
            double ex = l6_time_integral_exact(s, T).value;
            double q = l6_norm_quadrature(s, T, min_spatial_points(s), 8193);
            worst = std::max(worst, rel(q, ex));
        }
    }
    FourierState one, two;
    one.coeffs[2] = cplx(0.8, 0.9);
    two.coeffs[0] = 1;
    two.coeffs[1] = 1;
    double e1 = rel(l6_time_integral_exact(one, 0.3).value, 2 * M_PI * 0.3 * std::pow(std::abs(one.coeffs[2]), 6));
    double e2 = rel(l6_time_integral_exact(two, 1.0).value, 40 * M_PI * 1.0);
    return {worst <= 1e-6 && e1 <= 1e-12 && e2 <= 1e-12,
            fmt("max rel quadrature gap %.3g (limit 1e-6), single mode %.3g, two-mode %.3g (limit 1e-12)", worst, e1,
                e2)};
}

Outcome c5_strichartz() {
    auto t0 = std::chrono::steady_clock::now();
    auto sc = fourier::strichartz_scan(0.7, {16, 32, 64, 128, 256, 512, 1024}, 32, true, 2024, kThreads);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {sc.slope <= 0.05 && sec < 600,
            fmt("slope %.4g (limit 0.05), max ratio at N=16 %.4g, at N=1024 %.4g, %.1f s", sc.slope, sc.max_ratio.front(),
                sc.max_ratio.back(), sec)};
}

Outcome c6_chain() {
    bool ok = true;
    std::string detail;
    for (int member = 0; member < 5; ++member) {
        std::vector<double> ratios;
        for (std::int64_t N : {4, 8, 16}) {
            std::map<std::int64_t, double> mags;
            auto rng = stream(2024, 6, member * 100 + N);
            std::uniform_real_distribution<double> u(0, 1);
            for (std::int64_t k = -N; k <= N; ++k) mags[k] = member == 0 ? 1.0 : u(rng);
            auto row = fourier::chain_inequality(mags, N, 0.7);
            if (!std::isfinite(row.ratio)) ok = false;
            ratios.push_back(row.ratio);
        }
        double s = spread(ratios);
        ok = ok && s < 2;
        detail += (member == 0 ? "constant" : "random" + std::to_string(member)) + fmt(" spread %.3g; ", s);
    }
    return {ok, detail + "limit 2"};
}

Outcome c7_trilinear() {
    using namespace trilinear;
    std::string detail;
    bool ok = true;
    for (const auto& g : standard_geometries()) {
        std::vector<double> x, y;
        for (std::int64_t L : {8, 16, 32, 64}) {
            auto s = make_spec(L, g.a1, g.b1, g.a2, g.b2, g.a3, g.b3, Rational(1));
            x.push_back(std::log(double(L)));
            y.push_back(sup_count_A(s).normalized);
        }
        double slope = fourier::least_squares_slope(x, y);
        ok = ok && slope <= 0.1;
        detail += g.name + fmt(" slope %.3g; ", slope);
    }
    auto rng = stream(2024, 7);
    std::uniform_int_distribution<int> lam(1, 4), lo(-8, 8), len(0, 5), off(-3, 3), cden(1, 4);
    int mism = 0, nonzero = 0;
    for (int i = 0; i < 100; ++i) {
        const std::int64_t L = lam(rng);
        int a1 = lo(rng), l1 = len(rng), a2 = lo(rng), l2 = l1 + len(rng), a3 = lo(rng) + 12, l3 = l2 + len(rng);
        auto s = make_spec(L, Rational(a1, L), Rational(a1 + l1, L), Rational(a2, L), Rational(a2 + l2, L),
                           Rational(a3, L), Rational(a3 + l3, L), Rational(cden(rng), cden(rng)));
        std::int64_t p = a1 + len(rng) % (l1 + 1), q = a2 + len(rng) % (l2 + 1), r = a3 + len(rng) % (l3 + 1);
        Rational n(p + q + r, L), tau = Rational(p * p + q * q + r * r, L * L) + Rational(off(rng), cden(rng));
        auto k = count_A_set(s, n, tau);
        mism += k != count_A_set_naive(s, n, tau);
        nonzero += k > 0;
    }
    auto uv = uv_change_of_variables_check(1000, 2024);
    ok = ok && mism == 0 && uv.max_abs_residual == Rational(0) && uv.samples == 1000;
    return {ok, detail + fmt("limit 0.1; oracle mismatches %.0f of 100 (%.0f nonempty); uv residual ", mism, nonzero) +
                    uv.max_abs_residual.str() + " on 1000 samples"};
}

Outcome c8_symbols() {
    using namespace imethod;
    double w2 = 0, w6 = 0;
    auto rng = stream(2024, 8);
    std::uniform_int_distribution<int> modes(2, 7), k(-24, 24), lam(1, 4);
    std::normal_distribution<double> g(0, 0.6);
    Thresholds th;
    for (int i = 0; i < 100; ++i) {
        FourierState u;
        u.lambda = u.base_lambda = lam(rng);
        const int m = modes(rng);
        while (static_cast<int>(u.coeffs.size()) < m) u.coeffs[k(rng)] = cplx(g(rng), g(rng));
        MultiplierParams p{1.0 + i % 6, 0.4};
        const int sign = i % 2 ? -1 : 1;
        std::vector<const FourierState*> two(2, &u), six(6, &u);
        auto Iu = apply_I(u, p);
        double kin = 0.5 * hdot_norm_sq(Iu, 1.0), pot = sign * l6_pow6_spatial(Iu) / 6.0;
        cplx l2 = lambda_n(make_symbol(SymbolId::Sigma2, u.lambda, p, th), two);
        cplx l6 = lambda_n(make_symbol(SymbolId::Sigma6, u.lambda, p, th, sign), six);
        w2 = std::max(w2, std::abs(l2 - kin) / std::fabs(kin));
        w6 = std::max(w6, std::abs(l6 - pot) / std::fabs(pot));
    }
    std::uniform_int_distribution<int> f(-500, 500);
    MultiplierParams big{2000, 0.4};
    int bad = 0, tested = 0;
    while (tested < 5000) {
        FreqTuple t;
        t.lambda = 1 + tested % 3;
        std::int64_t s = 0;
        for (int j = 0; j < 5; ++j) t.idx.push_back(f(rng)), s += t.idx.back();
        t.idx.push_back(-s);
        if (std::abs(s) > big.N * t.lambda || omega_scaled(t) == 0) continue;
        ++tested;
        bad += evaluate_symbol(SymbolId::Quotient, t, big, th) != 1.0;
    }
    return {w2 <= 1e-10 && w6 <= 1e-10 && bad == 0,
            fmt("max rel Lambda2 gap %.3g, Lambda6 gap %.3g (limit 1e-10); quotient != 1 on %.0f of %.0f tuples", w2, w6,
                bad, tested)};
}

// The stability claim is checked on three independent ensembles; a single ensemble's maximum is dominated by
// rare near-resonant samples.
Outcome c9_bounds() {
    using namespace imethod;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    std::size_t singular = 0;
    for (std::uint64_t seed : {2024, 2025, 2026}) {
        auto sc = bound_scan_symbols({1, 0.4}, 100000, {64, 256, 1024}, seed, Thresholds{}, 6, kThreads);
        std::map<std::string, std::vector<double>> by;
        for (const auto& r : sc.rows) {
            if (r.quantity.rfind("lambda6", 0) == 0) continue;
            by[r.quantity].push_back(r.max_ratio);
            singular += r.singular;
        }
        double worst_case = 0;
        for (const auto& [q, v] : by)
            if (q != "sigma6tilde") worst_case = std::max(worst_case, spread(v));
        const auto& st = by["sigma6tilde"];
        double s = spread(st);
        ok = ok && s < 2 && worst_case < 2;
        detail += fmt("seed %.0f: sigma6tilde %.4g/%.4g/%.4g", double(seed), st[0], st[1], st[2]) +
                  fmt(" spread %.3g, worst M6bar case spread %.3g; ", s, worst_case);
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {ok, detail + fmt("limit 2; singular samples %.0f; %.1f s", double(singular), sec)};
}

Outcome c10_ftc() {
    using namespace imethod;
    FourierState u;
    u.lambda = u.base_lambda = 4;
    u.coeffs = {{-37, {0.3, 0.1}}, {-24, {-0.2, 0.4}}, {21, {0.5, -0.3}}, {34, {0.1, 0.2}}};
    MultiplierParams p{4, 0.4};
    std::vector<double> res;
    double mass = 0, energy = 0, relative = 1;
    std::string detail;
    for (double dt : {0.004, 0.002, 0.001, 0.0005}) {
        auto tr = integrate_galerkin(u, 0.1, dt, 1);
        auto f = ftc_residual(tr, p, Thresholds{});
        res.push_back(std::fabs(f.residual));
        mass = std::max(mass, tr.mass_drift);
        energy = std::max(energy, tr.energy_drift);
        relative = f.relative;
        detail += fmt("dt %.4g rel %.3g; ", dt, f.relative);
    }
    double order = std::log2(res[res.size() - 2] / res.back());
    bool ok = relative <= 1e-6 && order >= 2 && mass <= 1e-8 && energy <= 1e-6;
    return {ok, detail + fmt("order %.3g (min 2), mass drift %.3g (limit 1e-8), energy drift %.3g (limit 1e-6)", order,
                             mass, energy)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"counting oracle equivalence", c1_counting},
        {"reduction lemma", c2_reduction},
        {"hypothesis H scan", c3_hypothesis},
        {"L6 oracle agreement", c4_l6},
        {"Strichartz constant growth", c5_strichartz},
        {"chain inequality", c6_chain},
        {"trilinear count bound", c7_trilinear},
        {"symbol identities", c8_symbols},
        {"symbol bounds", c9_bounds},
        {"FTC identity", c10_ftc},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("CRITERION %zu %s: %s | %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
