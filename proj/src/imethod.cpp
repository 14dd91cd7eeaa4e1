#include "imethod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "util.hpp"

namespace nlslab::imethod {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::string tuple_str(const std::int64_t* idx, std::size_t n, double lambda) {
    std::string s = "(";
    for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(idx[i]);
    s += ")";
    if (lambda != 1.0) s += "/" + fmt(lambda);
    return s;
}

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

double multiplier_m(double r, const MultiplierParams& p) {
    r = std::fabs(r);
    if (r <= p.N) return 1.0;
    return std::pow(p.N / r, 1.0 - p.s);
}

FourierState apply_I(const FourierState& u, const MultiplierParams& p) {
    FourierState out = u;
    for (auto& [j, a] : out.coeffs) a *= multiplier_m(u.frequency(j), p);
    return out;
}

double hdot_norm_sq(const FourierState& u, double sigma) {
    double acc = 0;
    for (const auto& [j, a] : u.modes()) {
        double k = std::fabs(u.frequency(j));
        double w = sigma == 0 ? 1.0 : (k == 0 ? 0.0 : std::pow(k, 2 * sigma));
        acc += w * std::norm(a);
    }
    return kTwoPi / u.lambda * acc;
}

double h1_norm_sq(const FourierState& u) {
    double acc = 0;
    for (const auto& [j, a] : u.modes()) {
        double k = u.frequency(j);
        acc += (1 + k * k) * std::norm(a);
    }
    return kTwoPi / u.lambda * acc;
}

double l6_pow6_spatial(const FourierState& u) {
    auto modes = u.modes();
    if (modes.empty()) return 0;
    std::int64_t lo = modes.front().first, hi = modes.front().first;
    for (const auto& [j, a] : modes) lo = std::min(lo, j), hi = std::max(hi, j);
    // |u|^6 has index band within +-3(hi-lo); the trapezoid sum is exact beyond that
    const auto M = static_cast<std::size_t>(6 * (hi - lo) + 1);
    double acc = 0;
    for (std::size_t m = 0; m < M; ++m) {
        cplx v = 0;
        for (const auto& [j, a] : modes) {
            // phase j*m/M reduced exactly before scaling by 2 pi
            std::int64_t r = ((j - lo) * static_cast<std::int64_t>(m)) % static_cast<std::int64_t>(M);
            v += a * std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(M));
        }
        // the common factor exp(i lo x) has unit modulus
        double q = std::norm(v) / (u.lambda * u.lambda);
        acc += q * q * q;
    }
    return kTwoPi * u.lambda / static_cast<double>(M) * acc;
}

bool in_gamma(const FreqTuple& t) {
    std::int64_t s = 0;
    for (auto v : t.idx) s += v;
    return s == 0;
}

std::int64_t omega_scaled(const FreqTuple& t) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < t.idx.size(); ++i) s += (i % 2 == 0 ? 1 : -1) * t.idx[i] * t.idx[i];
    return s;
}

double omega_n(const FreqTuple& t) { return static_cast<double>(omega_scaled(t)) / (t.lambda * t.lambda); }

Starred rearrange_decreasing(const std::vector<double>& values) {
    require(!values.empty(), "rearrangement of an empty list");
    Starred s;
    s.order.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s.order[i] = i;
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(values[a]) > std::fabs(values[b]); });
    for (auto i : s.order) s.values.push_back(std::fabs(values[i]));
    return s;
}

double dyadic_class(double r) {
    r = std::fabs(r);
    if (r < 1.0) return 1.0;
    int e = 0;
    std::frexp(r, &e);  // r = f 2^e, f in [0.5, 1)
    return std::ldexp(1.0, e - 1);
}

std::string resonance_name(Resonance r) {
    switch (r) {
        case Resonance::I: return "resonant-i";
        case Resonance::IIa: return "resonant-iia";
        case Resonance::IIb: return "resonant-iib";
        case Resonance::IIc: return "resonant-iic";
        case Resonance::III: return "resonant-iii";
        case Resonance::NonResonant: return "nonresonant";
    }
    return "?";
}

namespace {

bool sim(double a, double b, const Thresholds& th) { return std::max(a, b) <= th.C_sim * std::min(a, b); }
bool gg(double a, double b, const Thresholds& th) { return a >= th.C_gg * b; }

// (|k| desc, k desc) so the order ignores the original positions
bool key_greater(double a, double b) {
    if (std::fabs(a) != std::fabs(b)) return std::fabs(a) > std::fabs(b);
    return a > b;
}

std::array<double, 6> interleave(std::array<double, 3> odd, std::array<double, 3> even) {
    std::sort(odd.begin(), odd.end(), key_greater);
    std::sort(even.begin(), even.end(), key_greater);
    return {odd[0], even[0], odd[1], even[1], odd[2], even[2]};
}

// canonical representative under odd/even permutations and the conjugation map
std::array<double, 6> canonicalize(const double* k) {
    auto A = interleave({k[0], k[2], k[4]}, {k[1], k[3], k[5]});
    auto B = interleave({-k[1], -k[3], -k[5]}, {-k[0], -k[2], -k[4]});
    if (std::fabs(A[0]) != std::fabs(A[1])) return std::fabs(A[0]) > std::fabs(A[1]) ? A : B;
    for (int i = 0; i < 6; ++i) {
        if (A[i] == B[i]) continue;
        return key_greater(A[i], B[i]) ? A : B;
    }
    return A;
}

bool upsilon6_raw(const double* k, const MultiplierParams& p, const Thresholds& th) {
    std::array<double, 6> a;
    for (int i = 0; i < 6; ++i) a[i] = std::fabs(k[i]);
    std::sort(a.begin(), a.end(), std::greater<>());
    return a[0] > p.N && sim(dyadic_class(a[0]), dyadic_class(a[1]), th);
}

bool multiset_eq(std::array<double, 4> a, std::array<double, 4> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

ResonanceVerdict classify_raw(const double* kin, const Thresholds& th) {
    ResonanceVerdict v;
    const auto k = canonicalize(kin);
    v.canonical = k;
    for (int i = 0; i < 6; ++i) v.dyadic[i] = dyadic_class(k[i]);
    v.starred = v.dyadic;
    std::sort(v.starred.begin(), v.starred.end(), std::greater<>());
    const auto& N = v.dyadic;
    const auto& S = v.starred;
    auto starred_str = [&] {
        std::string s = "N*=(";
        for (int i = 0; i < 6; ++i) s += (i ? "," : "") + fmt(S[i]);
        return s + ")";
    };

    // (i)
    if (sim(S[0], S[1], th) && gg(S[1], S[2], th) && sim(S[2], S[3], th) && k[0] * k[1] < 0) {
        double thr = th.case_i == CaseIRule::Literal ? S[2] / (N[0] * N[0]) : S[2] * S[2] / S[0];
        double gap = std::fabs(k[0] + k[1]);
        if (gap <= thr / th.C_gg) {
            v.kind = Resonance::I;
            v.witness = starred_str() + "; N1*~N2*>>N3*~N4*; k1*k2<0; |k1+k2|=" + fmt(gap) + " << " + fmt(thr);
            return v;
        }
    }
    // (ii)
    if (sim(S[0], S[3], th) && gg(S[3], S[4], th)) {
        const std::array<double, 4> top{S[0], S[1], S[2], S[3]};
        if (multiset_eq(top, {N[0], N[1], N[2], N[3]})) {
            v.kind = Resonance::IIa;
            v.witness = starred_str() + "; N1*~N4*>>N5*; top four at positions {1,2,3,4}";
            return v;
        }
        auto side_ok = [&](double pivot, std::array<int, 3> others) {
            for (int i : others) {
                double d = sgn(k[i]) == sgn(pivot) ? pivot - k[i] : pivot + k[i];
                if (!sim(dyadic_class(d), S[0], th)) return false;
            }
            return true;
        };
        auto mixed = [&](int a, int b, int c) { return !(sgn(k[a]) == sgn(k[b]) && sgn(k[b]) == sgn(k[c])); };
        if (multiset_eq(top, {N[0], N[1], N[3], N[5]}) && mixed(1, 3, 5) && side_ok(k[0], {1, 3, 5})) {
            v.kind = Resonance::IIb;
            v.witness = starred_str() + "; N1*~N4*>>N5*; top four at {1,2,4,6}; k2,k4,k6 mixed signs; |k1-+ki|~N1*";
            return v;
        }
        if (multiset_eq(top, {N[0], N[1], N[2], N[4]}) && mixed(0, 2, 4) && side_ok(k[1], {0, 2, 4})) {
            v.kind = Resonance::IIc;
            v.witness = starred_str() + "; N1*~N4*>>N5*; top four at {1,2,3,5}; k1,k3,k5 mixed signs; |k2-+ki|~N1*";
            return v;
        }
    }
    // (iii)
    if (sim(S[0], S[4], th)) {
        v.kind = Resonance::III;
        v.witness = starred_str() + "; N1*~N5*";
        return v;
    }
    v.kind = Resonance::NonResonant;
    v.witness = starred_str() + "; no case applies";
    return v;
}

struct Raw {
    double k[6];
};

Raw to_raw(const std::int64_t* idx, double lambda) {
    Raw r;
    for (int i = 0; i < 6; ++i) r.k[i] = static_cast<double>(idx[i]) / lambda;
    return r;
}

double m1_numerator(const double* k, std::size_t n, const MultiplierParams& p) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = multiplier_m(k[i], p);
        acc += (i % 2 == 0 ? 1 : -1) * (m * m * k[i] * k[i]);
    }
    return acc;
}

double omega_double(const double* k, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += (i % 2 == 0 ? 1 : -1) * (k[i] * k[i]);
    return acc;
}

double m_scale(const double* k, std::size_t n, const MultiplierParams& p) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = multiplier_m(k[i], p);
        acc += m * m * k[i] * k[i];
    }
    return acc;
}

std::int64_t omega_int(const std::int64_t* idx, std::size_t n) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (i % 2 == 0 ? 1 : -1) * idx[i] * idx[i];
    return s;
}

double symbol_raw(SymbolId id, const std::int64_t* idx, std::size_t n, double lambda, const MultiplierParams& p,
                  const Thresholds& th, int sign) {
    double k[16];
    for (std::size_t i = 0; i < n; ++i) k[i] = static_cast<double>(idx[i]) / lambda;
    auto prod_m = [&] {
        double v = 1;
        for (std::size_t i = 0; i < n; ++i) v *= multiplier_m(k[i], p);
        return v;
    };
    switch (id) {
        case SymbolId::Sigma2:
            return -0.5 * multiplier_m(k[0], p) * k[0] * multiplier_m(k[1], p) * k[1];
        case SymbolId::Sigma6:
            return sign * prod_m() / 6.0;
        case SymbolId::M6_1:
            return m1_numerator(k, n, p) / 6.0;
        case SymbolId::M6:
            return m1_numerator(k, n, p) / 6.0 - prod_m() / 6.0 * omega_double(k, n);
        case SymbolId::M6bar: {
            if (!upsilon6_raw(k, p, th)) return 0.0;
            return classify_raw(k, th).resonant() ? m1_numerator(k, n, p) / 6.0 : 0.0;
        }
        case SymbolId::Sigma6Tilde: {
            const double m1 = m1_numerator(k, n, p) / 6.0;
            const bool resonant = upsilon6_raw(k, p, th) && classify_raw(k, th).resonant();
            const double mtilde_m1 = resonant ? 0.0 : m1;
            if (omega_int(idx, n) == 0) {
                // trivial resonances cancel pairwise; anything else is a classification gap
                if (std::fabs(mtilde_m1) <= 1e-12 * m_scale(k, n, p)) return 0.0;
                throw SingularSymbol("sigma6tilde: Omega_6 = 0 with nonzero numerator on nonresonant tuple " +
                                     tuple_str(idx, n, lambda));
            }
            const double om = omega_double(k, n);
            return mtilde_m1 / om - prod_m() / 6.0;
        }
        case SymbolId::Quotient: {
            if (omega_int(idx, n) == 0)
                throw SingularSymbol("quotient: Omega_6 = 0 at " + tuple_str(idx, n, lambda));
            return m1_numerator(k, n, p) / omega_double(k, n);
        }
    }
    return 0;
}

std::size_t arity(SymbolId id) { return id == SymbolId::Sigma2 ? 2 : 6; }

}  // namespace

bool in_upsilon6(const FreqTuple& t, const MultiplierParams& p, const Thresholds& th) {
    require(t.size() == 6, "Upsilon_6 needs six frequencies");
    auto r = to_raw(t.idx.data(), t.lambda);
    return upsilon6_raw(r.k, p, th);
}

ResonanceVerdict classify_resonance(const FreqTuple& t, const MultiplierParams& p, const Thresholds& th) {
    require(t.size() == 6, "resonance classification needs six frequencies");
    require(in_gamma(t), "tuple is off Gamma_6: " + tuple_str(t.idx.data(), 6, t.lambda));
    require(in_upsilon6(t, p, th), "tuple is off Upsilon_6: " + tuple_str(t.idx.data(), 6, t.lambda));
    auto r = to_raw(t.idx.data(), t.lambda);
    return classify_raw(r.k, th);
}

SymbolId parse_symbol(const std::string& name) {
    if (name == "sigma2") return SymbolId::Sigma2;
    if (name == "sigma6") return SymbolId::Sigma6;
    if (name == "M6_1") return SymbolId::M6_1;
    if (name == "M6") return SymbolId::M6;
    if (name == "M6bar") return SymbolId::M6bar;
    if (name == "sigma6tilde") return SymbolId::Sigma6Tilde;
    if (name == "quotient") return SymbolId::Quotient;
    throw ValidationError("unknown symbol '" + name + "'");
}

double evaluate_symbol(SymbolId id, const FreqTuple& t, const MultiplierParams& p, const Thresholds& th, int sign) {
    require(t.size() == arity(id), "symbol arity mismatch");
    require(in_gamma(t), "tuple is off Gamma_n: " + tuple_str(t.idx.data(), t.size(), t.lambda));
    return symbol_raw(id, t.idx.data(), t.size(), t.lambda, p, th, sign);
}

Symbol make_symbol(SymbolId id, double lambda, const MultiplierParams& p, const Thresholds& th, int sign) {
    const std::size_t n = arity(id);
    return [=](const std::int64_t* idx, std::size_t len) {
        require(len == n, "symbol arity mismatch");
        return symbol_raw(id, idx, len, lambda, p, th, sign);
    };
}

cplx lambda_n(const Symbol& M, const std::vector<const FourierState*>& slots, std::size_t term_cap) {
    const std::size_t n = slots.size();
    require(n >= 2 && n % 2 == 0, "Lambda_n needs an even number of slots");
    const double lambda = slots[0]->lambda;
    for (auto* s : slots) require(s->lambda == lambda, "all slots must share lambda");
    std::vector<std::vector<std::pair<std::int64_t, cplx>>> fac(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, a] : slots[i]->modes())
            fac[i].push_back(i % 2 == 0 ? std::pair{j, a} : std::pair{-j, std::conj(a)});
    double work = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) work *= static_cast<double>(fac[i].size());
    require_cap(work <= static_cast<double>(term_cap), "Lambda_n enumeration exceeds the term cap");
    std::unordered_map<std::int64_t, cplx> last(fac[n - 1].begin(), fac[n - 1].end());

    std::vector<std::int64_t> idx(n);
    cplx total = 0;
    auto rec = [&](auto&& self, std::size_t pos, std::int64_t sum, cplx prod) -> void {
        if (pos == n - 1) {
            auto it = last.find(-sum);
            if (it == last.end()) return;
            idx[pos] = -sum;
            double m = M(idx.data(), n);
            if (m != 0) total += m * prod * it->second;
            return;
        }
        for (const auto& [f, a] : fac[pos]) {
            idx[pos] = f;
            self(self, pos + 1, sum + f, prod * a);
        }
    };
    rec(rec, 0, 0, cplx(1));
    return total * (kTwoPi * std::pow(lambda, 1.0 - static_cast<double>(n)));
}

EnergyForms energy_E1I(const FourierState& u, const MultiplierParams& p, int sign, double rtol) {
    require(sign == 1 || sign == -1, "sign must be +1 or -1");
    EnergyForms e;
    const Thresholds th;
    std::vector<const FourierState*> two(2, &u), six(6, &u);
    cplx l2 = lambda_n(make_symbol(SymbolId::Sigma2, u.lambda, p, th), two);
    cplx l6 = lambda_n(make_symbol(SymbolId::Sigma6, u.lambda, p, th, sign), six);
    e.symbol_form = (l2 + l6).real();
    FourierState Iu = apply_I(u, p);
    double kin = 0.5 * hdot_norm_sq(Iu, 1.0), pot = sign * l6_pow6_spatial(Iu) / 6.0;
    e.norm_form = kin + pot;
    double scale = std::fabs(kin) + std::fabs(pot);
    if (std::fabs(e.symbol_form - e.norm_form) > rtol * scale)
        throw std::runtime_error("E1_I symbol form " + fmt(e.symbol_form) + " disagrees with norm form " +
                                 fmt(e.norm_form));
    return e;
}

double hamiltonian(const FourierState& u, int sign) {
    return 0.5 * hdot_norm_sq(u, 1.0) + sign * l6_pow6_spatial(u) / 6.0;
}

// ---------------------------------------------------------------- Galerkin flow

FourierState Trajectory::state(std::size_t i) const {
    FourierState s;
    s.lambda = s.base_lambda = sys.lambda;
    for (std::size_t q = 0; q < sys.modes.size(); ++q)
        if (amps[i][q] != cplx(0)) s.coeffs[sys.modes[q]] = amps[i][q];
    return s;
}

std::vector<cplx> quintic_projected(const GalerkinSystem& sys, const std::vector<cplx>& a) {
    const auto& md = sys.modes;
    const std::int64_t lo = md.front(), hi = md.back(), w = hi - lo + 1;
    // odd factor: a at index j (offset lo); even factor: conj a(-j) at index in [-hi, -lo]
    std::vector<cplx> A(w, 0), B(w, 0);
    for (std::size_t q = 0; q < md.size(); ++q) {
        A[md[q] - lo] = a[q];
        B[hi - md[q]] = std::conj(a[q]);
    }
    auto conv = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        std::vector<cplx> z(x.size() + y.size() - 1, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == cplx(0)) continue;
            for (std::size_t j = 0; j < y.size(); ++j) z[i + j] += x[i] * y[j];
        }
        return z;
    };
    auto C = conv(conv(conv(conv(A, B), A), B), A);
    const std::int64_t off = 3 * lo - 2 * hi;  // index of C[0]
    const double scale = std::pow(sys.lambda, -4.0);
    std::vector<cplx> out(md.size());
    for (std::size_t q = 0; q < md.size(); ++q) out[q] = C[md[q] - off] * scale;
    return out;
}

namespace {

double mass_of(const GalerkinSystem& sys, const std::vector<cplx>& a) {
    double acc = 0;
    for (const auto& v : a) acc += std::norm(v);
    return kTwoPi / sys.lambda * acc;
}

// one RK4 step of the interaction-picture system b' = -i sign e^{ik^2 t} Q(e^{-ik^2 t} b)
void rk4_step(const GalerkinSystem& sys, std::vector<cplx>& b, double t, double h) {
    const std::size_t m = sys.modes.size();
    std::vector<double> k2(m);
    for (std::size_t q = 0; q < m; ++q) {
        double k = static_cast<double>(sys.modes[q]) / sys.lambda;
        k2[q] = k * k;
    }
    auto f = [&](double tt, const std::vector<cplx>& bb) {
        std::vector<cplx> a(m);
        for (std::size_t q = 0; q < m; ++q) a[q] = bb[q] * std::polar(1.0, -k2[q] * tt);
        auto Q = quintic_projected(sys, a);
        std::vector<cplx> out(m);
        const cplx pref(0, -static_cast<double>(sys.sign));
        for (std::size_t q = 0; q < m; ++q) out[q] = pref * Q[q] * std::polar(1.0, k2[q] * tt);
        return out;
    };
    auto axpy = [&](const std::vector<cplx>& x, const std::vector<cplx>& y, double c) {
        std::vector<cplx> z(m);
        for (std::size_t q = 0; q < m; ++q) z[q] = x[q] + c * y[q];
        return z;
    };
    auto s1 = f(t, b);
    auto s2 = f(t + h / 2, axpy(b, s1, h / 2));
    auto s3 = f(t + h / 2, axpy(b, s2, h / 2));
    auto s4 = f(t + h, axpy(b, s3, h));
    for (std::size_t q = 0; q < m; ++q) b[q] += h / 6 * (s1[q] + 2.0 * s2[q] + 2.0 * s3[q] + s4[q]);
}

std::vector<cplx> to_lab(const GalerkinSystem& sys, const std::vector<cplx>& b, double t) {
    std::vector<cplx> a(b.size());
    for (std::size_t q = 0; q < b.size(); ++q) {
        double k = static_cast<double>(sys.modes[q]) / sys.lambda;
        // reduce the phase before polar to keep long runs accurate
        a[q] = b[q] * std::polar(1.0, -std::fmod(k * k * t, kTwoPi));
    }
    return a;
}

Trajectory run_fixed(const GalerkinSystem& sys, const std::vector<cplx>& a0, double T, double dt) {
    Trajectory tr;
    tr.sys = sys;
    std::size_t steps = T <= 0 ? 0 : static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
    if (steps % 2 == 1) ++steps;
    tr.dt = steps ? T / static_cast<double>(steps) : dt;
    std::vector<cplx> b = a0;
    tr.times.push_back(0);
    tr.amps.push_back(a0);
    for (std::size_t i = 0; i < steps; ++i) {
        double t = tr.dt * static_cast<double>(i);
        if (sys.nonlinear) rk4_step(sys, b, t, tr.dt);
        double tn = tr.dt * static_cast<double>(i + 1);
        tr.times.push_back(tn);
        tr.amps.push_back(to_lab(sys, b, tn));
    }
    const double m0 = mass_of(sys, a0);
    const double h0 = hamiltonian(tr.state(0), sys.sign);
    for (std::size_t i = 0; i < tr.amps.size(); ++i) {
        if (m0 > 0) tr.mass_drift = std::max(tr.mass_drift, std::fabs(mass_of(sys, tr.amps[i]) - m0) / m0);
        double h = hamiltonian(tr.state(i), sys.sign);
        tr.energy_drift = std::max(tr.energy_drift, std::fabs(h - h0) / std::max(std::fabs(h0), 1e-300));
    }
    return tr;
}

}  // namespace

Trajectory integrate_galerkin(const FourierState& init, const std::vector<std::int64_t>& modes, double T, double dt,
                              int sign, bool nonlinear, double mass_tol, int max_halvings) {
    require(dt > 0, "dt must be positive");
    require(T >= 0, "T must be nonnegative");
    require(sign == 1 || sign == -1, "sign must be +1 or -1");
    require(!modes.empty(), "Galerkin mode set is empty");
    GalerkinSystem sys;
    sys.modes = modes;
    std::sort(sys.modes.begin(), sys.modes.end());
    sys.modes.erase(std::unique(sys.modes.begin(), sys.modes.end()), sys.modes.end());
    sys.lambda = init.lambda;
    sys.sign = sign;
    sys.nonlinear = nonlinear;
    std::vector<cplx> a0(sys.modes.size(), 0);
    for (const auto& [j, a] : init.modes()) {
        auto it = std::lower_bound(sys.modes.begin(), sys.modes.end(), j);
        require(it != sys.modes.end() && *it == j, "initial data has modes outside the Galerkin set");
        a0[it - sys.modes.begin()] = a;
    }
    Trajectory tr = run_fixed(sys, a0, T, dt);
    for (int h = 0; h < max_halvings && tr.mass_drift > mass_tol; ++h) {
        dt /= 2;
        tr = run_fixed(sys, a0, T, dt);
    }
    if (tr.mass_drift > mass_tol)
        throw std::runtime_error("Galerkin integrator: mass drift " + fmt(tr.mass_drift) + " exceeds " +
                                 fmt(mass_tol) + " at dt " + fmt(tr.dt));
    return tr;
}

Trajectory integrate_galerkin(const FourierState& init, double T, double dt, int sign, bool nonlinear,
                              double mass_tol, int max_halvings) {
    std::vector<std::int64_t> modes;
    for (const auto& [j, a] : init.modes()) modes.push_back(j);
    require(!modes.empty(), "initial data is zero");
    return integrate_galerkin(init, modes, T, dt, sign, nonlinear, mass_tol, max_halvings);
}

// ---------------------------------------------------------------- Galerkin multilinear forms

GalerkinForm::GalerkinForm(const GalerkinSystem& sys, std::size_t n, const Symbol& M, std::size_t term_cap)
    : n_(n), m_(sys.modes.size()) {
    require(n >= 2 && n % 2 == 0 && n <= 14, "form arity must be even and at most 14");
    require_cap(m_ <= 8, "Galerkin forms support at most 8 modes");
    require_cap(std::pow(static_cast<double>(m_), static_cast<double>(n - 1)) <= static_cast<double>(term_cap),
                "Galerkin form enumeration exceeds the term cap");
    norm_ = kTwoPi * std::pow(sys.lambda, 1.0 - static_cast<double>(n));
    std::unordered_map<std::int64_t, std::size_t> pos;
    for (std::size_t q = 0; q < m_; ++q) pos[sys.modes[q]] = q;

    std::unordered_map<std::uint64_t, double> acc;
    std::vector<std::int64_t> idx(n);
    std::vector<std::size_t> pick(n);
    auto key_of = [&] {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < n; ++i) key += std::uint64_t(1) << (4 * (pick[i] + (i % 2 ? m_ : 0)));
        return key;
    };
    auto rec = [&](auto&& self, std::size_t at, std::int64_t sum) -> void {
        if (at == n - 1) {
            // last slot is even: frequency -mode, so mode = sum
            auto it = pos.find(sum);
            if (it == pos.end()) return;
            pick[at] = it->second;
            idx[at] = -sum;
            ++terms_;
            double v = M(idx.data(), n);
            if (v != 0) acc[key_of()] += v;
            return;
        }
        for (std::size_t q = 0; q < m_; ++q) {
            pick[at] = q;
            idx[at] = at % 2 == 0 ? sys.modes[q] : -sys.modes[q];
            self(self, at + 1, sum + idx[at]);
        }
    };
    rec(rec, 0, 0);
    for (const auto& [key, v] : acc) {
        if (v == 0) continue;
        std::vector<std::uint8_t> e(2 * m_);
        for (std::size_t c = 0; c < 2 * m_; ++c) e[c] = static_cast<std::uint8_t>((key >> (4 * c)) & 15u);
        exps_.push_back(std::move(e));
        coef_.push_back(v);
    }
}

cplx GalerkinForm::evaluate(const std::vector<cplx>& a) const {
    require(a.size() == m_, "amplitude vector size differs from the mode set");
    std::vector<std::vector<cplx>> pa(m_, std::vector<cplx>(n_ + 1)), pc(m_, std::vector<cplx>(n_ + 1));
    for (std::size_t q = 0; q < m_; ++q) {
        pa[q][0] = pc[q][0] = 1;
        for (std::size_t e = 1; e <= n_; ++e) {
            pa[q][e] = pa[q][e - 1] * a[q];
            pc[q][e] = pc[q][e - 1] * std::conj(a[q]);
        }
    }
    cplx total = 0;
    for (std::size_t i = 0; i < coef_.size(); ++i) {
        cplx prod = coef_[i];
        for (std::size_t q = 0; q < m_; ++q) prod *= pa[q][exps_[i][q]] * pc[q][exps_[i][m_ + q]];
        total += prod;
    }
    return total * norm_;
}

Symbol elongation_sum(const Symbol& M6, const GalerkinSystem& sys) {
    auto modes = sys.modes;
    return [M6, modes](const std::int64_t* idx, std::size_t n) {
        require(n == 10, "elongation acts on 10-tuples");
        double total = 0;
        std::int64_t t6[6];
        for (std::size_t j = 0; j < 6; ++j) {
            std::int64_t c = 0;
            for (std::size_t r = j; r < j + 5; ++r) c += idx[r];
            // merged slot must lie in its slot support: S on odd slots, -S on even ones
            std::int64_t need = j % 2 == 0 ? c : -c;
            if (!std::binary_search(modes.begin(), modes.end(), need)) continue;
            for (std::size_t r = 0; r < j; ++r) t6[r] = idx[r];
            t6[j] = c;
            for (std::size_t r = j + 1; r < 6; ++r) t6[r] = idx[r + 4];
            double v = M6(t6, 6);
            // (-1)^J with J = j + 1
            total += (j % 2 == 0 ? -v : v);
        }
        return total;
    };
}

namespace {

// Memoizes a 6-ary symbol on tuples drawn from the Galerkin slot sets.
Symbol tabulate6(const Symbol& M, const GalerkinSystem& sys) {
    const std::size_t m = sys.modes.size();
    std::size_t cells = 1;
    for (int i = 0; i < 6; ++i) cells *= m;
    auto table = std::make_shared<std::vector<double>>(cells, std::numeric_limits<double>::quiet_NaN());
    auto modes = sys.modes;
    return [M, table, modes, m](const std::int64_t* idx, std::size_t n) {
        std::size_t key = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t f = i % 2 == 0 ? idx[i] : -idx[i];
            auto it = std::lower_bound(modes.begin(), modes.end(), f);
            if (it == modes.end() || *it != f) return M(idx, n);
            key = key * m + static_cast<std::size_t>(it - modes.begin());
        }
        double& slot = (*table)[key];
        if (std::isnan(slot)) slot = M(idx, n);
        return slot;
    };
}

Symbol sum_symbols(const Symbol& a, const Symbol& b) {
    return [a, b](const std::int64_t* idx, std::size_t n) { return a(idx, n) + b(idx, n); };
}

double simpson(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0;
    require((n - 1) % 2 == 0, "Simpson rule needs an even number of intervals");
    double acc = y.front() + y.back();
    for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * y[i];
    return acc * h / 3.0;
}

}  // namespace

FtcReport ftc_residual(const Trajectory& traj, const MultiplierParams& p, const Thresholds& th,
                       std::size_t term_cap) {
    const auto& sys = traj.sys;
    const int mu = sys.sign;
    FtcReport rep;
    rep.T = traj.times.back();
    const double lam = sys.lambda;
    Symbol s2 = make_symbol(SymbolId::Sigma2, lam, p, th);
    Symbol hat6 = tabulate6(make_symbol(SymbolId::Sigma6, lam, p, th, 1), sys);
    Symbol tilde6 = tabulate6(make_symbol(SymbolId::Sigma6Tilde, lam, p, th), sys);
    Symbol bar6 = tabulate6(make_symbol(SymbolId::M6bar, lam, p, th), sys);

    GalerkinForm F2(sys, 2, s2, term_cap), F6hat(sys, 6, hat6, term_cap), F6tilde(sys, 6, tilde6, term_cap),
        F6bar(sys, 6, bar6, term_cap);
    GalerkinForm F10(sys, 10, elongation_sum(sum_symbols(hat6, tilde6), sys), term_cap);

    const std::size_t n = traj.amps.size();
    std::vector<double> E1(n), C(n), G6(n), G10(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = traj.amps[i];
        cplx e2 = F2.evaluate(a), e6 = F6hat.evaluate(a), c6 = F6tilde.evaluate(a);
        cplx g6 = cplx(0, mu) * F6bar.evaluate(a), g10 = cplx(0, 1) * F10.evaluate(a);
        E1[i] = (e2 + double(mu) * e6).real();
        C[i] = c6.real();
        G6[i] = g6.real();
        G10[i] = g10.real();
        double sc = std::abs(e2) + std::abs(e6) + std::abs(c6) + std::abs(g6) + std::abs(g10);
        double im = std::fabs(e2.imag()) + std::fabs(e6.imag()) + std::fabs(c6.imag()) + std::fabs(g6.imag()) +
                    std::fabs(g10.imag());
        if (sc > 0) rep.max_imag_residue = std::max(rep.max_imag_residue, im / sc);
    }
    rep.dE1 = E1.back() - E1.front();
    rep.correction = mu * (C.back() - C.front());
    rep.resonant_integral = simpson(G6, traj.dt);
    rep.ten_integral = simpson(G10, traj.dt);
    rep.residual = rep.dE1 + rep.correction - rep.resonant_integral - rep.ten_integral;
    rep.scale = std::max({std::fabs(rep.dE1), std::fabs(rep.correction), std::fabs(rep.resonant_integral),
                          std::fabs(rep.ten_integral)});
    rep.relative = rep.scale > 0 ? std::fabs(rep.residual) / rep.scale : 0.0;
    return rep;
}

DerivativeCheck derivative_identity_check(const FourierState& u, const MultiplierParams& p, const Thresholds& th,
                                          int sign, double h, std::size_t substeps) {
    require(h > 0 && substeps > 0, "step must be positive");
    GalerkinSystem sys;
    for (const auto& [j, a] : u.modes()) sys.modes.push_back(j);
    require(!sys.modes.empty(), "state is zero");
    sys.lambda = u.lambda;
    sys.sign = sign;
    std::vector<cplx> a0;
    for (const auto& [j, a] : u.modes()) a0.push_back(a);

    Symbol tilde6 = tabulate6(make_symbol(SymbolId::Sigma6Tilde, u.lambda, p, th), sys);
    const double lam = u.lambda;
    Symbol om_tilde = [tilde6, lam](const std::int64_t* idx, std::size_t n) {
        double k[6];
        for (int i = 0; i < 6; ++i) k[i] = static_cast<double>(idx[i]) / lam;
        return omega_double(k, n) * tilde6(idx, n);
    };
    GalerkinForm F(sys, 6, tilde6), Fom(sys, 6, om_tilde), F10(sys, 10, elongation_sum(tilde6, sys));

    auto advance = [&](double span) {
        // full lab-frame evolution over a signed span
        std::vector<cplx> b = a0;
        double step = span / static_cast<double>(substeps);
        for (std::size_t i = 0; i < substeps; ++i) rk4_step(sys, b, step * static_cast<double>(i), step);
        return to_lab(sys, b, span);
    };
    DerivativeCheck dc;
    dc.finite_difference = (F.evaluate(advance(h)) - F.evaluate(advance(-h))) / (2 * h);
    dc.identity = cplx(0, -1) * Fom.evaluate(a0) + cplx(0, sign) * F10.evaluate(a0);
    dc.abs_error = std::abs(dc.finite_difference - dc.identity);
    return dc;
}

// ---------------------------------------------------------------- symbol bound scans

namespace {

struct Sampler {
    std::mt19937_64 rng;
    double N;

    double unif(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    std::int64_t irange(std::int64_t a, std::int64_t b) { return std::uniform_int_distribution<std::int64_t>(a, b)(rng); }
    std::int64_t signed_mag(double lo, double hi) {
        auto v = static_cast<std::int64_t>(std::llround(unif(lo, hi)));
        return irange(0, 1) ? v : -v;
    }

    // draws a zero-sum integer 6-tuple from one of several configuration families
    std::array<std::int64_t, 6> draw() {
        std::array<std::int64_t, 6> k{};
        const double B = N * std::exp2(unif(0.0, 3.0));
        const int family = static_cast<int>(irange(0, 4));
        switch (family) {
            case 0: {  // generic
                auto b = static_cast<std::int64_t>(B);
                for (int i = 0; i < 5; ++i) k[i] = irange(-b, b);
                break;
            }
            case 1: {  // two large, nearly cancelling
                const double s = std::max(1.0, B * std::exp2(-unif(3.0, 10.0)));
                k[0] = signed_mag(B, 2 * B);
                for (int i = 2; i < 5; ++i) k[i] = signed_mag(0, s);
                auto d = static_cast<std::int64_t>(std::llround(unif(-1.0, 1.0) * std::max(1.0, s * s / B)));
                k[5] = -(k[2] + k[3] + k[4]) + d;
                k[1] = -k[0] - d;
                return k;
            }
            case 2: {  // four large
                static const int pats[3][4] = {{0, 1, 2, 3}, {0, 1, 3, 5}, {0, 1, 2, 4}};
                const auto& pat = pats[irange(0, 2)];
                const double s = std::max(1.0, B * std::exp2(-unif(3.0, 8.0)));
                bool large[6] = {};
                for (int i : pat) large[i] = true;
                for (int i = 0; i < 6; ++i) k[i] = large[i] ? signed_mag(0.6 * B, B) : signed_mag(0, s);
                // close the sum through the last large slot
                std::int64_t sum = 0;
                for (int i = 0; i < 6; ++i)
                    if (i != pat[3]) sum += k[i];
                k[pat[3]] = -sum;
                return k;
            }
            case 3: {  // six comparable
                for (int i = 0; i < 5; ++i) k[i] = signed_mag(0.5 * B, B);
                break;
            }
            default: {  // two large with a spread tail
                k[0] = signed_mag(B, 2 * B);
                for (int i = 2; i < 5; ++i) k[i] = signed_mag(0, B * std::exp2(-unif(1.0, 6.0)));
                k[5] = signed_mag(0, B * std::exp2(-unif(1.0, 6.0)));
                k[1] = -(k[0] + k[2] + k[3] + k[4] + k[5]);
                return k;
            }
        }
        std::int64_t sum = 0;
        for (int i = 0; i < 5; ++i) sum += k[i];
        k[5] = -sum;
        return k;
    }
};

struct Max {
    double value = 0;
    std::string arg;
    std::size_t samples = 0;
    void offer(double v, const std::array<std::int64_t, 6>& k) {
        ++samples;
        if (v > value) {
            value = v;
            arg = tuple_str(k.data(), 6, 1.0);
        }
    }
};

}  // namespace

BoundScan bound_scan_symbols(const MultiplierParams& base, std::size_t samples, const std::vector<double>& N_list,
                             std::uint64_t seed, const Thresholds& th, std::size_t lambda6_states, int threads) {
    require(!N_list.empty(), "N_list is empty");
    require(samples > 0, "sample count must be positive");
    for (double N : N_list) require(N >= 1, "N must be at least 1");
    require(base.s > 0 && base.s < 1, "s must lie in (0,1)");

    struct PerN {
        Max tilde, case1, case2, case3, case4, lam6;
        std::size_t singular = 0, lam6_resampled = 0;
        std::vector<std::string> counterexamples;
    };
    std::vector<PerN> res(N_list.size());

    parallel_for(N_list.size(), threads, [&](std::size_t ni) {
        MultiplierParams p{N_list[ni], base.s};
        auto m = [&](double r) { return multiplier_m(r, p); };
        Sampler smp{stream(seed, 0x5b, ni), p.N};
        PerN& out = res[ni];
        std::size_t nonres = 0, resn = 0, attempts = 0;
        const std::size_t max_attempts = 200 * samples;
        while ((nonres < samples || resn < samples) && attempts < max_attempts) {
            ++attempts;
            auto k = smp.draw();
            double kd[6];
            for (int i = 0; i < 6; ++i) kd[i] = static_cast<double>(k[i]);
            if (!upsilon6_raw(kd, p, th)) continue;
            auto v = classify_raw(kd, th);
            const auto& c = v.canonical;
            const auto& Nj = v.dyadic;
            const auto& S = v.starred;
            if (!v.resonant()) {
                if (nonres >= samples) continue;
                ++nonres;
                double st = 0;
                try {
                    st = symbol_raw(SymbolId::Sigma6Tilde, k.data(), 6, 1.0, p, th, 1);
                } catch (const SingularSymbol&) {
                    ++out.singular;
                    if (out.counterexamples.size() < 4) out.counterexamples.push_back(tuple_str(k.data(), 6, 1.0));
                    continue;
                }
                if (omega_int(k.data(), 6) == 0) continue;  // trivial resonance, 0/0
                bool special = sim(Nj[0], Nj[1], th) && gg(std::min(Nj[0], Nj[1]), S[2], th) && sim(S[2], S[3], th);
                double bound = special ? m(S[2]) * m(S[2]) : m(S[0]) * m(S[2]);
                out.tilde.offer(std::fabs(st) / bound, k);
            } else {
                if (resn >= samples) continue;
                ++resn;
                double mbar = std::fabs(m1_numerator(kd, 6, p) / 6.0);
                out.case1.offer(mbar / (m(S[0]) * S[0] * m(S[2]) * S[2]), k);
                const double s12 = std::fabs(c[0] + c[1]), s34 = std::fabs(c[2] + c[3]);
                if (sim(Nj[0], S[0], th) && sim(Nj[1], S[0], th) && S[0] > p.N / th.C_sim && gg(S[0], S[2], th) &&
                    sim(S[2], S[3], th) && s12 <= th.C_sim * S[2] * S[2] / S[0])
                    out.case2.offer(mbar / (S[2] * S[2]), k);
                if (std::max(s12, s34) <= th.C_sim * S[4]) out.case3.offer(mbar / (m(S[0]) * S[0] * m(S[4]) * S[4]), k);
                const double N12 = dyadic_class(s12);
                if (s12 >= 1 && sim(N12, dyadic_class(s34), th) && Nj[0] * th.C_sim >= N12 && gg(N12, S[4], th))
                    out.case4.offer(mbar / (m(S[0]) * S[0] * m(N12) * N12), k);
            }
        }
        // Lambda_6(sigma6tilde) on random states supported near and above N
        auto rng = stream(seed, 0x6c, ni);
        std::normal_distribution<double> g(0.0, std::sqrt(0.5));
        std::size_t made = 0, tries = 0;
        while (made < lambda6_states && tries < 20 * lambda6_states) {
            ++tries;
            // two short blocks near +c1 and -c2 so Gamma_6 carries nontrivial interactions
            FourierState u;
            const auto lo = static_cast<std::int64_t>(p.N), hi = static_cast<std::int64_t>(2 * p.N);
            std::uniform_int_distribution<std::int64_t> pick(lo, hi);
            const std::int64_t c1 = pick(rng), c2 = pick(rng);
            for (std::int64_t d = 0; d < 4; ++d) {
                u.coeffs[c1 + d] = cplx(g(rng), g(rng));
                u.coeffs[-c2 - d] = cplx(g(rng), g(rng));
            }
            try {
                std::vector<const FourierState*> six(6, &u);
                cplx l6 = lambda_n(make_symbol(SymbolId::Sigma6Tilde, 1.0, p, th), six);
                double h1 = h1_norm_sq(apply_I(u, p));
                std::array<std::int64_t, 6> tag{c1, c1 + 3, -c2 - 3, -c2, 0, 0};
                out.lam6.offer(std::abs(l6) / (h1 * h1 * h1), tag);
                ++made;
            } catch (const SingularSymbol&) {
                ++out.lam6_resampled;
            }
        }
    });

    BoundScan scan;
    std::vector<double> lx, ly;
    for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        const auto& r = res[ni];
        auto row = [&](const std::string& q, const Max& mx, std::size_t singular) {
            scan.rows.push_back({N_list[ni], q, mx.samples, singular, mx.value, mx.arg});
        };
        row("sigma6tilde", r.tilde, r.singular);
        row("M6bar_case1", r.case1, 0);
        row("M6bar_case2", r.case2, 0);
        row("M6bar_case3", r.case3, 0);
        row("M6bar_case4", r.case4, 0);
        row("lambda6_sigma6tilde", r.lam6, r.lam6_resampled);
        for (const auto& c : r.counterexamples)
            if (scan.counterexamples.size() < 8) scan.counterexamples.push_back("N=" + fmt(N_list[ni]) + " " + c);
        if (r.lam6.value > 0) {
            lx.push_back(std::log(N_list[ni]));
            ly.push_back(std::log(r.lam6.value));
        }
    }
    if (lx.size() >= 2) scan.decay_exponent = fourier::least_squares_slope(lx, ly);
    return scan;
}

}  // namespace nlslab::imethod
