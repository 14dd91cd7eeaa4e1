#include "fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "util.hpp"

namespace nlslab::fourier {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
std::mutex fftw_plan_mutex;

struct PQHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
        return std::hash<std::int64_t>()(k.first * 0x9E3779B97F4A7C15LL ^ k.second);
    }
};

// Triple products grouped by (index sum, index square sum).
using PQMap = std::map<std::int64_t, std::vector<std::pair<std::int64_t, cplx>>>;

PQMap aggregate_triples(const std::vector<std::pair<std::int64_t, cplx>>& m1,
                        const std::vector<std::pair<std::int64_t, cplx>>& m2,
                        const std::vector<std::pair<std::int64_t, cplx>>& m3) {
    std::unordered_map<std::pair<std::int64_t, std::int64_t>, cplx, PQHash> acc;
    for (const auto& [a, ua] : m1)
        for (const auto& [b, ub] : m2) {
            cplx uab = ua * ub;
            for (const auto& [c, uc] : m3) acc[{a + b + c, a * a + b * b + c * c}] += uab * uc;
        }
    PQMap out;
    for (const auto& [k, v] : acc) out[k.first].push_back({k.second, v});
    for (auto& [p, vec] : out) std::sort(vec.begin(), vec.end(), [](auto& x, auto& y) { return x.first < y.first; });
    return out;
}

// 2*pi*lambda^-5 sum_p sum_{q,q'} c(p,q) conj(c(p,q')) kernel((q-q')/lambda^2)
L6Exact pair_sum(const PQMap& pq, double lambda, double T) {
    cplx total = 0;
    const double l2 = lambda * lambda;
    for (const auto& [p, vec] : pq) {
        cplx sub = 0;
        for (const auto& [q, c] : vec)
            for (const auto& [q2, c2] : vec) sub += c * std::conj(c2) * time_kernel(static_cast<double>(q - q2) / l2, T);
        total += sub;
    }
    const double pre = kTwoPi * std::pow(lambda, -5.0);
    L6Exact r;
    r.value = pre * total.real();
    r.imag_residue = pre * std::abs(total.imag());
    return r;
}
}  // namespace

double FourierState::amplitude_scale() const {
    return lambda == base_lambda ? 1.0 : std::sqrt(lambda / base_lambda);
}

cplx FourierState::amplitude(std::int64_t j) const {
    auto it = coeffs.find(j);
    return it == coeffs.end() ? cplx(0) : it->second * amplitude_scale();
}

std::vector<std::pair<std::int64_t, cplx>> FourierState::modes() const {
    std::vector<std::pair<std::int64_t, cplx>> out;
    const double s = amplitude_scale();
    for (const auto& [j, a] : coeffs)
        if (a != cplx(0)) out.push_back({j, a * s});
    return out;
}

double FourierState::l2_norm_sq() const {
    double acc = 0;
    for (const auto& [j, a] : modes()) acc += std::norm(a);
    return kTwoPi / lambda * acc;
}

std::int64_t FourierState::cutoff_index() const {
    std::int64_t m = 0;
    for (const auto& [j, a] : coeffs)
        if (a != cplx(0)) m = std::max(m, iabs(j));
    return m;
}

FourierState rescale(const FourierState& s, double nu) {
    require(nu > 0, "rescale factor must be positive");
    FourierState r = s;
    r.lambda = s.lambda * nu;
    return r;
}

double sigma_exponent(double p1, double p2) { return 2.0 / p2 + 1.0 / p1 - 0.5; }

FourierState evolve_linear(const FourierState& s, double t) {
    FourierState r = s;
    for (auto& [j, a] : r.coeffs) {
        double k = s.frequency(j);
        double ph = std::fmod(k * k * t, kTwoPi);
        a *= std::polar(1.0, -ph);
    }
    return r;
}

cplx time_kernel(double omega, double T) {
    if (omega == 0.0) return cplx(T, 0.0);
    // (1 - e^{-i T w}) / (i w) = sin(Tw)/w + i (cos(Tw) - 1)/w
    double x = T * omega;
    return cplx(std::sin(x) / omega, (std::cos(x) - 1.0) / omega);
}

L6Exact l6_time_integral_exact(const FourierState& s, double T, std::size_t mode_cap) {
    auto m = s.modes();
    require_cap(m.size() <= mode_cap, "support exceeds the sextuple mode cap");
    if (m.empty() || T == 0.0) return {};
    return pair_sum(aggregate_triples(m, m, m), s.lambda, T);
}

double l6_time_integral_bruteforce(const FourierState& s, double T) {
    auto m = s.modes();
    std::map<std::int64_t, cplx> amp(m.begin(), m.end());
    const std::size_t S = m.size();
    cplx total = 0;
    const double l2 = s.lambda * s.lambda;
    for (std::size_t i1 = 0; i1 < S; ++i1)
        for (std::size_t i2 = 0; i2 < S; ++i2)
            for (std::size_t i3 = 0; i3 < S; ++i3)
                for (std::size_t k1 = 0; k1 < S; ++k1)
                    for (std::size_t k2 = 0; k2 < S; ++k2) {
                        std::int64_t rest = m[i1].first + m[i2].first + m[i3].first - m[k1].first - m[k2].first;
                        auto it = amp.find(rest);
                        if (it == amp.end()) continue;
                        std::int64_t q = m[i1].first * m[i1].first + m[i2].first * m[i2].first +
                                         m[i3].first * m[i3].first - m[k1].first * m[k1].first -
                                         m[k2].first * m[k2].first - rest * rest;
                        total += m[i1].second * m[i2].second * m[i3].second * std::conj(m[k1].second) *
                                 std::conj(m[k2].second) * std::conj(it->second) *
                                 time_kernel(static_cast<double>(q) / l2, T);
                    }
    return kTwoPi * std::pow(s.lambda, -5.0) * total.real();
}

std::size_t min_spatial_points(const FourierState& s) {
    auto m = s.modes();
    if (m.empty()) return 1;
    std::int64_t span = m.back().first - m.front().first;
    return static_cast<std::size_t>(6 * span + 1);
}

namespace {
// spatial integral of |u|^6 at time t by equispaced quadrature on Mx points (direct sum)
double spatial_l6(const std::vector<std::pair<std::int64_t, cplx>>& m, double lambda, double t, std::size_t Mx) {
    std::vector<cplx> ev(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        double k = static_cast<double>(m[i].first) / lambda;
        ev[i] = m[i].second * std::polar(1.0, -std::fmod(k * k * t, kTwoPi));
    }
    double acc = 0;
    for (std::size_t x = 0; x < Mx; ++x) {
        cplx u = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            // e^{i (j/lambda) x_m} with x_m = 2 pi lambda x / Mx
            std::int64_t r = (m[i].first % static_cast<std::int64_t>(Mx) + Mx) % Mx;
            double ang = kTwoPi * static_cast<double>((static_cast<std::uint64_t>(r) * x) % Mx) / Mx;
            u += ev[i] * std::polar(1.0, ang);
        }
        u /= lambda;
        double a2 = std::norm(u);
        acc += a2 * a2 * a2;
    }
    return acc * kTwoPi * lambda / static_cast<double>(Mx);
}
// smallest 2^a 3^b 5^c >= n
std::size_t smooth_size(std::size_t n) {
    std::size_t best = SIZE_MAX;
    for (std::size_t p2 = 1; p2 < 4 * n + 8; p2 *= 2)
        for (std::size_t p3 = p2; p3 < 4 * n + 8; p3 *= 3)
            for (std::size_t p5 = p3; p5 < 4 * n + 8; p5 *= 5)
                if (p5 >= n && p5 < best) best = p5;
    return std::max<std::size_t>(best, 8);
}
}  // namespace

double l6_norm_quadrature(const FourierState& s, double T, std::size_t Mx, std::size_t Mt) {
    require(Mx >= min_spatial_points(s), "spatial grid too coarse: aliasing guard violated");
    require(Mt >= 2, "need at least two time points");
    auto m = s.modes();
    if (m.empty() || T == 0.0) return 0.0;
    const double h = T / static_cast<double>(Mt - 1);
    double acc = 0;
    for (std::size_t i = 0; i < Mt; ++i) {
        double w = (i == 0 || i + 1 == Mt) ? 0.5 : 1.0;
        acc += w * spatial_l6(m, s.lambda, h * static_cast<double>(i), Mx);
    }
    return acc * h;
}

double l6_time_integral_gauss(const FourierState& s, double T, int threads) {
    auto m = s.modes();
    if (m.empty() || T == 0.0) return 0.0;
    const std::int64_t jmin = m.front().first, jmax = m.back().first;
    const std::int64_t span = jmax - jmin;
    // exact for |u|^6 once the grid exceeds 3*span
    std::size_t M = smooth_size(static_cast<std::size_t>(3 * span + 1));
    std::int64_t qmax = 0, qmin = INT64_MAX;
    for (auto& [j, a] : m) {
        qmax = std::max(qmax, j * j);
        qmin = std::min(qmin, j * j);
    }
    const double omega_max = 3.0 * static_cast<double>(qmax - qmin) / (s.lambda * s.lambda);
    // 30-point Gauss-Legendre per panel with half-panel phase at most 14 radians
    using GL = boost::math::quadrature::gauss<double, 30>;
    const std::size_t panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(omega_max * T / 28.0)));
    const double hp = T / static_cast<double>(panels);
    std::vector<double> nodes, weights;
    {
        auto ab = GL::abscissa();
        auto wt = GL::weights();
        for (std::size_t i = 0; i < ab.size(); ++i) {
            nodes.push_back(ab[i]);
            weights.push_back(wt[i]);
            if (ab[i] != 0.0) {
                nodes.push_back(-ab[i]);
                weights.push_back(wt[i]);
            }
        }
    }
    std::vector<double> panel_sum(panels, 0.0);
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(panels)));
    const std::size_t chunk = (panels + workers - 1) / workers;
    parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
        fftw_complex* buf;
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lk(fftw_plan_mutex);
            buf = fftw_alloc_complex(M);
            plan = fftw_plan_dft_1d(static_cast<int>(M), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        const std::size_t p_begin = w * chunk, p_end = std::min(panels, (w + 1) * chunk);
        // phases factor as e^{-i k^2 hp p} * e^{-i k^2 hp c_g}; the panel factor is advanced by recurrence
        // and refreshed exactly every 32 panels
        const std::size_t S = m.size();
        std::vector<std::size_t> slot(S);
        std::vector<cplx> node_phase(nodes.size() * S), panel_phase(S), panel_step(S);
        for (std::size_t i = 0; i < S; ++i) {
            double k = static_cast<double>(m[i].first) / s.lambda;
            slot[i] = static_cast<std::size_t>(((m[i].first % static_cast<std::int64_t>(M)) + M) % M);
            for (std::size_t g = 0; g < nodes.size(); ++g)
                node_phase[g * S + i] = m[i].second * std::polar(1.0, -std::fmod(k * k * hp * 0.5 * (1.0 + nodes[g]), kTwoPi));
            panel_step[i] = std::polar(1.0, -std::fmod(k * k * hp, kTwoPi));
        }
        for (std::size_t p = p_begin; p < p_end; ++p) {
            if ((p - p_begin) % 32 == 0) {
                for (std::size_t i = 0; i < S; ++i) {
                    double k = static_cast<double>(m[i].first) / s.lambda;
                    panel_phase[i] = std::polar(1.0, -std::fmod(k * k * hp * static_cast<double>(p), kTwoPi));
                }
            } else {
                for (std::size_t i = 0; i < S; ++i) panel_phase[i] *= panel_step[i];
            }
            double acc = 0;
            for (std::size_t g = 0; g < nodes.size(); ++g) {
                std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * M, 0.0);
                const cplx* np = &node_phase[g * S];
                for (std::size_t i = 0; i < S; ++i) {
                    cplx v = np[i] * panel_phase[i];
                    buf[slot[i]][0] += v.real();
                    buf[slot[i]][1] += v.imag();
                }
                fftw_execute(plan);
                double sx = 0;
                for (std::size_t x = 0; x < M; ++x) {
                    double a2 = buf[x][0] * buf[x][0] + buf[x][1] * buf[x][1];
                    sx += a2 * a2 * a2;
                }
                acc += weights[g] * sx;
            }
            panel_sum[p] = acc;
        }
        std::lock_guard<std::mutex> lk(fftw_plan_mutex);
        fftw_destroy_plan(plan);
        fftw_free(buf);
    });
    double total = 0;
    for (double v : panel_sum) total += v;
    // spatial weight 2 pi lambda / M, 1/lambda^6 from the normalization, time weight hp/2
    return total * 0.5 * hp * kTwoPi * s.lambda / static_cast<double>(M) * std::pow(s.lambda, -6.0);
}

L6Exact trilinear_l2_sq(const FourierState& p1, const FourierState& p2, const FourierState& p3, double T,
                        std::size_t mode_cap) {
    require(p1.lambda == p2.lambda && p2.lambda == p3.lambda, "states must share lambda");
    auto m1 = p1.modes(), m2 = p2.modes(), m3 = p3.modes();
    require_cap(m1.size() * m2.size() * m3.size() <= mode_cap * mode_cap * mode_cap, "trilinear mode cap");
    require_cap(m1.size() <= mode_cap && m2.size() <= mode_cap && m3.size() <= mode_cap, "trilinear mode cap");
    if (m1.empty() || m2.empty() || m3.empty() || T == 0.0) return {};
    return pair_sum(aggregate_triples(m1, m2, m3), p1.lambda, T);
}

double HSpectrum::at(std::int64_t tau) const {
    tau = iabs(tau);
    return tau < static_cast<std::int64_t>(values.size()) ? values[tau] : 0.0;
}

namespace {
std::vector<std::pair<std::int64_t, cplx>> magnitude_modes(const std::map<std::int64_t, double>& mags, std::int64_t N) {
    std::vector<std::pair<std::int64_t, cplx>> m;
    for (const auto& [k, v] : mags) {
        require(iabs(k) <= 2 * N, "magnitudes must be supported in [-2N, 2N]");
        require(v >= 0, "magnitudes must be nonnegative");
        if (v != 0) m.push_back({k, cplx(v, 0)});
    }
    return m;
}
}  // namespace

HSpectrum h_spectrum(const std::map<std::int64_t, double>& magnitudes, std::int64_t N, std::int64_t N_cap) {
    require(N >= 1 && (N & (N - 1)) == 0, "N must be dyadic");
    require_cap(N <= N_cap, "N exceeds the h-spectrum cap");
    auto m = magnitude_modes(magnitudes, N);
    HSpectrum h;
    h.N = N;
    h.values.assign(static_cast<std::size_t>(12 * N * N + 1), 0.0);
    auto pq = aggregate_triples(m, m, m);
    for (const auto& [p, vec] : pq)
        for (const auto& [q, c] : vec)
            for (const auto& [q2, c2] : vec) h.values[static_cast<std::size_t>(iabs(q - q2))] += c.real() * c2.real();
    return h;
}

HSpectrum h_spectrum_bruteforce(const std::map<std::int64_t, double>& magnitudes, std::int64_t N) {
    auto m = magnitude_modes(magnitudes, N);
    std::map<std::int64_t, double> amp;
    for (auto& [k, v] : m) amp[k] = v.real();
    HSpectrum h;
    h.N = N;
    h.values.assign(static_cast<std::size_t>(12 * N * N + 1), 0.0);
    for (auto& [n1, a1] : amp)
        for (auto& [n2, a2] : amp)
            for (auto& [n3, a3] : amp)
                for (auto& [k1, b1] : amp)
                    for (auto& [k2, b2] : amp) {
                        std::int64_t k3 = n1 + n2 + n3 - k1 - k2;
                        auto it = amp.find(k3);
                        if (it == amp.end()) continue;
                        std::int64_t tau = iabs(n1 * n1 + n2 * n2 + n3 * n3 - k1 * k1 - k2 * k2 - k3 * k3);
                        h.values[static_cast<std::size_t>(tau)] += a1 * a2 * a3 * b1 * b2 * it->second;
                    }
    return h;
}

double dyadic_block_average(const HSpectrum& h, double K) {
    require(K >= 1, "K must be at least 1");
    auto lo = static_cast<std::int64_t>(std::ceil(K));
    auto hi = static_cast<std::int64_t>(std::floor(2 * K));
    double acc = 0;
    for (std::int64_t t = lo; t <= hi && t < static_cast<std::int64_t>(h.values.size()); ++t) acc += h.values[t];
    return acc / K;
}

FourierState random_state(std::int64_t N, std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto rng = stream(seed, a, b);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    FourierState s;
    for (std::int64_t j = -N; j <= N; ++j) {
        double re = g(rng), im = g(rng);
        s.coeffs[j] = cplx(re, im);
    }
    return s;
}

FourierState constant_state(std::int64_t N) {
    FourierState s;
    for (std::int64_t j = -N; j <= N; ++j) s.coeffs[j] = cplx(1.0, 0.0);
    return s;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0 ? 0.0 : sxy / sxx;
}

StrichartzScan strichartz_scan(double alpha, const std::vector<std::int64_t>& N_list, std::size_t random_members,
                               bool include_constant, std::uint64_t seed, int threads, std::size_t exact_mode_cap) {
    require(!N_list.empty(), "N_list must not be empty");
    for (auto N : N_list) require(N >= 1 && (N & (N - 1)) == 0, "N values must be dyadic");
    require(random_members + (include_constant ? 1 : 0) > 0, "ensemble is empty");
    const std::size_t per = random_members + (include_constant ? 1 : 0);
    StrichartzScan out;
    out.rows.resize(N_list.size() * per);
    // large supports run their time panels in parallel instead of the ensemble
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < out.rows.size(); ++i)
        (static_cast<std::size_t>(2 * N_list[i / per] + 1) <= exact_mode_cap ? small : large).push_back(i);
    auto run = [&](std::size_t idx, int inner_threads) {
        const std::size_t ni = idx / per, mi = idx % per;
        const std::int64_t N = N_list[ni];
        ScanRow& r = out.rows[idx];
        r.N = N;
        r.member = mi;
        r.constant_profile = include_constant && mi == random_members;
        FourierState f = r.constant_profile ? constant_state(N) : random_state(N, seed, ni, mi);
        r.T = std::pow(static_cast<double>(N), -alpha);
        r.l6 = f.modes().size() <= exact_mode_cap ? l6_time_integral_exact(f, r.T, exact_mode_cap).value
                                                  : l6_time_integral_gauss(f, r.T, inner_threads);
        r.l2 = std::sqrt(f.l2_norm_sq());
        r.ratio = std::pow(r.l6, 1.0 / 6.0) / r.l2;
    };
    parallel_for(small.size(), threads, [&](std::size_t i) { run(small[i], 1); });
    for (std::size_t i : large) run(i, threads);
    out.max_ratio.assign(N_list.size(), 0.0);
    for (const auto& r : out.rows) {
        std::size_t ni = static_cast<std::size_t>(&r - out.rows.data()) / per;
        out.max_ratio[ni] = std::max(out.max_ratio[ni], r.ratio);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < N_list.size(); ++i) {
        lx.push_back(std::log(static_cast<double>(N_list[i])));
        ly.push_back(std::log(out.max_ratio[i]));
    }
    out.slope = least_squares_slope(lx, ly);
    return out;
}

ChainRow chain_inequality(const std::map<std::int64_t, double>& magnitudes, std::int64_t N, double alpha) {
    for (const auto& [k, v] : magnitudes) require(iabs(k) <= N, "chain inequality needs support in [-N, N]");
    ChainRow row;
    row.N = N;
    FourierState f;
    for (const auto& [k, v] : magnitudes) f.coeffs[k] = cplx(v, 0);
    const double T = std::pow(static_cast<double>(N), -alpha);
    row.lhs = l6_time_integral_exact(f, T, 4 * static_cast<std::size_t>(N) + 1).value;
    HSpectrum h = h_spectrum(magnitudes, N, std::max<std::int64_t>(N, 16));
    row.h0 = h.at(0);
    const double tau_max = static_cast<double>(h.values.size() - 1);
    for (double K = std::pow(static_cast<double>(N), alpha); K <= tau_max; K *= 2) {
        double v = dyadic_block_average(h, K);
        if (v > row.block_sup) {
            row.block_sup = v;
            row.block_K = K;
        }
    }
    row.rhs = kTwoPi * (T * row.h0 + row.block_sup);
    row.ratio = row.rhs > 0 ? row.lhs / row.rhs : 0.0;
    return row;
}

}  // namespace nlslab::fourier
