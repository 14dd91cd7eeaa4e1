#include "experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "fourier.hpp"
#include "imethod.hpp"
#include "lattice.hpp"
#include "plane.hpp"
#include "trilinear.hpp"
#include "util.hpp"

namespace nlslab::experiments {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

// Resolved parameters with typed access; every key must be declared.
class Params {
public:
    Params(std::string id, const Config& cfg) : id_(std::move(id)) {
        schema_ = experiment_schema(id_);
        for (const auto& [k, v] : schema_) values_[k] = v;
        std::set<std::string> seen;
        for (const auto& [k, v] : cfg.entries) {
            require(values_.count(k) > 0, id_ + "." + k + ": unknown parameter");
            require(seen.insert(k).second, id_ + "." + k + ": given twice");
            values_[k] = v;
        }
    }

    std::string str(const std::string& k) const { return values_.at(k); }

    double real(const std::string& k) const {
        try {
            std::size_t pos = 0;
            double v = std::stod(str(k), &pos);
            if (pos != str(k).size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ValidationError(id_ + "." + k + ": expected a number, got '" + str(k) + "'");
        }
    }

    std::int64_t integer(const std::string& k) const { return parse_int(k, str(k)); }

    bool flag(const std::string& k) const {
        const auto v = str(k);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ValidationError(id_ + "." + k + ": expected true or false, got '" + v + "'");
    }

    Rational rational(const std::string& k) const {
        try {
            return parse_rational(str(k));
        } catch (const std::exception&) {
            throw ValidationError(id_ + "." + k + ": expected a rational, got '" + str(k) + "'");
        }
    }

    std::vector<std::int64_t> ints(const std::string& k) const {
        std::vector<std::int64_t> out;
        if (trim(str(k)).empty()) return out;
        for (const auto& t : split(str(k), ',')) out.push_back(parse_int(k, t));
        return out;
    }

    std::vector<double> reals(const std::string& k) const {
        std::vector<double> out;
        for (auto v : ints_or_reals(k)) out.push_back(v);
        return out;
    }

    Json echo() const {
        Json j = Json::object();
        for (const auto& [k, v] : schema_) j[k] = values_.at(k);
        return j;
    }

    const std::string& id() const { return id_; }

private:
    std::int64_t parse_int(const std::string& k, const std::string& t) const {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size())
            throw ValidationError(id_ + "." + k + ": expected an integer, got '" + t + "'");
        return v;
    }
    std::vector<double> ints_or_reals(const std::string& k) const {
        std::vector<double> out;
        if (trim(str(k)).empty()) return out;
        for (const auto& t : split(str(k), ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(t, &pos);
                if (pos != t.size()) throw std::invalid_argument("trailing");
                out.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError(id_ + "." + k + ": expected a number list, got '" + str(k) + "'");
            }
        }
        return out;
    }

    std::string id_;
    std::vector<std::pair<std::string, std::string>> schema_;
    std::map<std::string, std::string> values_;
};

Json rat(const Rational& r) { return r.str(); }

void need(bool ok, const Params& P, const std::string& key, const std::string& what) {
    require(ok, P.id() + "." + key + ": " + what);
}

double spread(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- annulus-count

lattice::QuadraticForm2 parse_form(const Params& P) {
    const auto f = P.str("form");
    if (f == "hex") return lattice::hex_form();
    if (f == "unit") return lattice::unit_form();
    auto parts = split(f, ',');
    need(parts.size() == 3, P, "form", "expected hex, unit or 'a,b,c'");
    lattice::QuadraticForm2 q;
    try {
        q.a = parse_rational(parts[0]);
        q.b = parse_rational(parts[1]);
        q.c = parse_rational(parts[2]);
    } catch (const std::exception&) {
        throw ValidationError(P.id() + ".form: coefficients must be rationals");
    }
    need(q.positive_definite(), P, "form", "form must be positive definite");
    return q;
}

lattice::Boundary parse_boundary(const Params& P) {
    const auto b = P.str("boundary");
    if (b == "cc") return lattice::Boundary::ClosedClosed;
    if (b == "co") return lattice::Boundary::ClosedOpen;
    if (b == "oc") return lattice::Boundary::OpenClosed;
    if (b == "oo") return lattice::Boundary::OpenOpen;
    throw ValidationError(P.id() + ".boundary: expected cc, co, oc or oo");
}

void run_annulus(const Params& P, Report& R) {
    lattice::AnnulusSpec reg;
    reg.center = {P.rational("cx"), P.rational("cy")};
    reg.r1sq = P.rational("r1sq");
    reg.r2sq = P.rational("r2sq");
    reg.boundary = parse_boundary(P);
    const auto q = parse_form(P);
    const auto count = lattice::count_points(q, reg);
    Json row;
    row["count"] = count;
    row["naive_count"] = P.flag("naive") ? Json(lattice::count_points_naive(q, reg)) : Json(nullptr);
    row["area"] = lattice::form_area(q, reg.r1sq, reg.r2sq);
    row["gauss_error"] = lattice::gauss_error(q, reg);
    R.rows.push_back(row);
}

// ---------------------------------------------------------------- hypothesis-scan

void run_hypothesis(const Params& P, Report& R, int threads) {
    auto N_list = P.ints("N_list");
    need(!N_list.empty(), P, "N_list", "must not be empty");
    need(std::is_sorted(N_list.begin(), N_list.end()), P, "N_list", "must be increasing");
    lattice::CenterPolicy pol;
    pol.origin = P.flag("origin");
    pol.deep_holes = P.flag("deep_holes");
    pol.edge_midpoints = P.flag("edge_midpoints");
    const auto rc = P.integer("random_centers");
    need(rc >= 0 && rc <= 4096, P, "random_centers", "must lie in [0, 4096]");
    pol.random = static_cast<std::size_t>(rc);
    const double alpha = P.real("alpha");
    auto res = lattice::scan_hypothesis_H(alpha, N_list, pol, R.seed, threads);
    for (const auto& r : res.records) {
        Json row;
        row["N"] = r.N;
        row["center_id"] = r.center_id;
        row["center_kind"] = r.center_kind;
        row["cx"] = rat(r.center.x);
        row["cy"] = rat(r.center.y);
        row["r1sq"] = rat(r.r1sq);
        row["r2sq"] = rat(r.r2sq);
        row["count"] = r.count;
        row["normalized"] = r.normalized;
        R.rows.push_back(row);
    }
    Json sup = Json::array();
    for (std::size_t i = 0; i < N_list.size(); ++i)
        sup.push_back({{"N", N_list[i]}, {"sup_count", res.sup_count[i]}, {"sup_normalized", res.sup_normalized[i]}});
    R.summary["per_N"] = sup;
    // top three N against the window {2^7, 2^8, 2^9} when present
    double top = 0, mid = 0;
    for (std::size_t i = 0; i < N_list.size(); ++i) {
        if (i + 3 >= N_list.size()) top = std::max(top, res.sup_normalized[i]);
        if (N_list[i] == 128 || N_list[i] == 256 || N_list[i] == 512) mid = std::max(mid, res.sup_normalized[i]);
    }
    R.summary["top3_max_normalized"] = top;
    R.summary["mid_max_normalized"] = mid > 0 ? Json(mid) : Json(nullptr);
    R.summary["growth_factor"] = mid > 0 ? Json(top / mid) : Json(nullptr);
}

// ---------------------------------------------------------------- reduction-verify

void run_reduction(const Params& P, Report& R, int threads) {
    const auto n_lo = P.integer("n_lo"), n_hi = P.integer("n_hi"), cap = P.integer("radius_cap");
    const auto Ks = P.ints("K_set");
    need(n_lo <= n_hi, P, "n_lo", "must not exceed n_hi");
    need(!Ks.empty(), P, "K_set", "must not be empty");
    need(cap >= 1 && cap <= 10000, P, "radius_cap", "must lie in [1, 10000]");
    auto cal = plane::calibrate_reduction(P.integer("calib_n_lo"), P.integer("calib_n_hi"), Ks,
                                          P.integer("calib_radius_cap"), threads);
    R.summary["calibrated"] = cal.calibration.has_value();
    R.summary["unique"] = cal.unique;
    if (!cal.calibration) {
        R.summary["failure"] = cal.failure;
        return;
    }
    const auto& c = *cal.calibration;
    R.summary["radius_scale"] = rat(c.radius_scale);
    Json offs = Json::array();
    for (int r = 0; r < 3; ++r) offs.push_back({{"n_mod_3", r}, {"x", rat(c.offsets[r].x)}, {"y", rat(c.offsets[r].y)}});
    R.summary["offsets"] = offs;
    auto rep = plane::verify_reduction(c, n_lo, n_hi, Ks, cap, threads);
    for (auto K : Ks) {
        std::size_t cells = 0, pass = 0;
        std::string first_failure;
        for (const auto& cell : rep.cells) {
            if (cell.K != K) continue;
            ++cells;
            if (cell.pass) ++pass;
            else if (first_failure.empty())
                first_failure = "n=" + std::to_string(cell.n) + " ell=" + std::to_string(cell.ell) +
                                " slice=" + std::to_string(cell.slice) + " planar=" + std::to_string(cell.planar);
        }
        Json row;
        row["K"] = K;
        row["cells"] = cells;
        row["passed"] = pass;
        row["failed"] = cells - pass;
        row["first_failure"] = first_failure;
        R.rows.push_back(row);
    }
    R.summary["passed"] = rep.passed;
    R.summary["failed"] = rep.failed;
    R.summary["spot_slice_0_0_4"] = plane::count_plane_slice({0, 0, 4, cap});
    lattice::AnnulusSpec disk;
    disk.r2sq = Rational(2);
    disk.boundary = lattice::Boundary::ClosedOpen;
    R.summary["spot_hex_Q_lt_2"] = lattice::count_points(lattice::hex_form(), disk);
}

// ---------------------------------------------------------------- h-spectrum

std::map<std::int64_t, double> profile(const Params& P, std::int64_t N, std::uint64_t seed) {
    std::map<std::int64_t, double> mags;
    const auto kind = P.str("profile");
    if (kind == "constant") {
        for (std::int64_t k = -N; k <= N; ++k) mags[k] = 1.0;
    } else if (kind == "random") {
        auto rng = stream(seed, 0x68, static_cast<std::uint64_t>(N));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::int64_t k = -N; k <= N; ++k) mags[k] = u(rng);
    } else {
        throw ValidationError(P.id() + ".profile: expected constant or random");
    }
    return mags;
}

void run_h_spectrum(const Params& P, Report& R) {
    const auto N_list = P.ints("N_list");
    need(!N_list.empty(), P, "N_list", "must not be empty");
    const double alpha = P.real("alpha");
    const auto cap = P.integer("N_cap");
    std::vector<double> ratios;
    Json chain = Json::array();
    for (auto N : N_list) {
        auto mags = profile(P, N, R.seed);
        auto h = fourier::h_spectrum(mags, N, cap);
        for (std::size_t tau = 0; tau < h.values.size(); ++tau) {
            if (h.values[tau] == 0) continue;
            Json row;
            row["N"] = N;
            row["tau"] = tau;
            row["h"] = h.values[tau];
            R.rows.push_back(row);
        }
        auto c = fourier::chain_inequality(mags, N, alpha);
        chain.push_back({{"N", N},
                         {"lhs", c.lhs},
                         {"h0", c.h0},
                         {"block_sup", c.block_sup},
                         {"block_K", c.block_K},
                         {"rhs", c.rhs},
                         {"ratio", c.ratio}});
        ratios.push_back(c.ratio);
    }
    R.summary["chain"] = chain;
    R.summary["ratio_spread"] = spread(ratios);
}

// ---------------------------------------------------------------- strichartz-scan

void run_strichartz(const Params& P, Report& R, int threads) {
    const auto N_list = P.ints("N_list");
    need(!N_list.empty(), P, "N_list", "must not be empty");
    const auto members = P.integer("random_members");
    need(members >= 0 && members <= 1024, P, "random_members", "must lie in [0, 1024]");
    auto scan = fourier::strichartz_scan(P.real("alpha"), N_list, static_cast<std::size_t>(members),
                                         P.flag("include_constant"), R.seed, threads,
                                         static_cast<std::size_t>(P.integer("exact_mode_cap")));
    for (const auto& r : scan.rows) {
        Json row;
        row["N"] = r.N;
        row["member"] = r.member;
        row["constant_profile"] = r.constant_profile;
        row["T"] = r.T;
        row["l6"] = r.l6;
        row["l2"] = r.l2;
        row["ratio"] = r.ratio;
        R.rows.push_back(row);
    }
    Json mr = Json::array();
    for (std::size_t i = 0; i < N_list.size(); ++i) mr.push_back({{"N", N_list[i]}, {"max_ratio", scan.max_ratio[i]}});
    R.summary["max_ratio"] = mr;
    R.summary["slope"] = scan.slope;
}

// ---------------------------------------------------------------- trilinear-scan

void run_trilinear(const Params& P, Report& R) {
    const auto lambdas = P.ints("lambdas");
    need(!lambdas.empty(), P, "lambdas", "must not be empty");
    for (auto l : lambdas) need(l >= 1 && l <= 256, P, "lambdas", "values must lie in [1, 256]");
    const Rational ctol = P.rational("c_tol");
    need(ctol > Rational(0), P, "c_tol", "must be positive");
    const double gg = P.real("gg");
    need(gg > 1, P, "gg", "must exceed 1");
    const auto ratio_max = P.integer("ratio_lambda_max");
    const double T = P.real("T");
    auto geos = trilinear::standard_geometries();
    const auto want = split(P.str("geometries"), ',');
    const bool all = want.size() == 1 && want[0] == "all";
    Json slopes = Json::object();
    std::size_t gi = 0;
    for (const auto& g : geos) {
        ++gi;
        if (!all && std::find(want.begin(), want.end(), g.name) == want.end()) continue;
        std::vector<double> lx, ly;
        for (auto L : lambdas) {
            auto spec = trilinear::make_spec(L, g.a1, g.b1, g.a2, g.b2, g.a3, g.b3, ctol);
            spec.gg = gg;
            auto sup = trilinear::sup_count_A(spec, static_cast<std::uint64_t>(P.integer("pair_cap")));
            auto gain = trilinear::enhanced_gain_K(spec);
            Json row;
            row["geometry"] = g.name;
            row["lambda"] = L;
            row["N13"] = rat(spec.N13);
            row["N23"] = rat(spec.N23);
            row["J"] = rat(spec.J);
            row["M"] = gain.M;
            row["K"] = gain.K;
            row["enhanced"] = gain.enhanced;
            row["sup"] = sup.sup;
            row["arg_n"] = rat(sup.arg_n);
            row["arg_tau"] = rat(sup.arg_tau);
            row["normalized"] = sup.normalized;
            if (L <= ratio_max) {
                auto p1 = trilinear::random_on(spec.I1, L, R.seed, gi, 1);
                auto p2 = trilinear::random_on(spec.I2, L, R.seed, gi, 2);
                auto p3 = trilinear::random_on(spec.I3, L, R.seed, gi, 3);
                auto rr = trilinear::trilinear_l2_ratio(p1, p2, p3, T, spec);
                row["l2_ratio"] = rr.ratio;
                row["l2_reference"] = rr.reference;
                row["l2_normalized"] = rr.normalized;
            } else {
                row["l2_ratio"] = nullptr;
                row["l2_reference"] = nullptr;
                row["l2_normalized"] = nullptr;
            }
            R.rows.push_back(row);
            lx.push_back(std::log(static_cast<double>(L)));
            ly.push_back(sup.normalized);
        }
        slopes[g.name] = lx.size() >= 2 ? Json(fourier::least_squares_slope(lx, ly)) : Json(nullptr);
    }
    R.summary["normalized_slope"] = slopes;
    auto uv = trilinear::uv_change_of_variables_check(static_cast<std::size_t>(P.integer("uv_samples")), R.seed);
    R.summary["uv_samples"] = uv.samples;
    R.summary["uv_max_abs_residual"] = rat(uv.max_abs_residual);
}

// ---------------------------------------------------------------- symbol-bound-scan

imethod::Thresholds thresholds(const Params& P) {
    imethod::Thresholds th;
    th.C_sim = P.real("C_sim");
    th.C_gg = P.real("C_gg");
    need(th.C_sim >= 1, P, "C_sim", "must be at least 1");
    need(th.C_gg > 1, P, "C_gg", "must exceed 1");
    const auto rule = P.str("case_i_rule");
    if (rule == "literal") th.case_i = imethod::CaseIRule::Literal;
    else if (rule == "lemma") th.case_i = imethod::CaseIRule::Lemma;
    else throw ValidationError(P.id() + ".case_i_rule: expected literal or lemma");
    return th;
}

void run_symbol_bounds(const Params& P, Report& R, int threads) {
    const auto N_list = P.reals("N_list");
    need(!N_list.empty(), P, "N_list", "must not be empty");
    const auto samples = P.integer("samples");
    need(samples >= 1 && samples <= 10'000'000, P, "samples", "must lie in [1, 1e7]");
    const double s = P.real("s");
    need(s > 0 && s < 1, P, "s", "must lie in (0,1)");
    auto scan = imethod::bound_scan_symbols({1.0, s}, static_cast<std::size_t>(samples), N_list, R.seed,
                                            thresholds(P), static_cast<std::size_t>(P.integer("lambda6_states")),
                                            threads);
    std::map<std::string, std::vector<double>> by_q;
    for (const auto& r : scan.rows) {
        Json row;
        row["N"] = r.N;
        row["quantity"] = r.quantity;
        row["samples"] = r.samples;
        row["singular"] = r.singular;
        row["max_ratio"] = r.max_ratio;
        row["argmax"] = r.argmax;
        R.rows.push_back(row);
        by_q[r.quantity].push_back(r.max_ratio);
    }
    Json stab = Json::object();
    for (const auto& q : {"sigma6tilde", "M6bar_case1", "M6bar_case2", "M6bar_case3", "M6bar_case4"})
        stab[q] = spread(by_q[q]);
    R.summary["stability_factor"] = stab;
    R.summary["lambda6_decay_exponent"] = scan.decay_exponent;
    R.summary["singular_counterexamples"] = scan.counterexamples;
}

// ---------------------------------------------------------------- energy-track

void run_energy(const Params& P, Report& R) {
    const double lambda = P.real("lambda");
    need(lambda >= 1 && lambda == std::floor(lambda), P, "lambda", "must be a positive integer");
    imethod::MultiplierParams mp{P.real("N"), P.real("s")};
    need(mp.N >= 1, P, "N", "must be at least 1");
    need(mp.s > 0 && mp.s < 1, P, "s", "must lie in (0,1)");
    const auto modes = P.ints("modes");
    need(!modes.empty() && modes.size() <= 5, P, "modes", "needs between 1 and 5 modes");
    const auto sign = P.integer("sign");
    need(sign == 1 || sign == -1, P, "sign", "must be 1 (defocusing) or -1 (focusing)");
    const double T = P.real("T"), dt = P.real("dt"), amp = P.real("amplitude");
    need(T > 0, P, "T", "must be positive");
    need(dt > 0 && dt <= T, P, "dt", "must lie in (0, T]");
    const auto refinements = P.integer("refinements");
    need(refinements >= 1 && refinements <= 8, P, "refinements", "must lie in [1, 8]");
    const auto th = thresholds(P);

    fourier::FourierState u;
    u.lambda = u.base_lambda = lambda;
    auto rng = stream(R.seed, 0xe7);
    std::normal_distribution<double> g(0.0, amp / std::sqrt(2.0));
    for (auto j : modes) u.coeffs[j] = fourier::cplx(g(rng), g(rng));
    auto e = imethod::energy_E1I(u, mp, static_cast<int>(sign));
    R.summary["E1_symbol_form"] = e.symbol_form;
    R.summary["E1_norm_form"] = e.norm_form;

    std::vector<double> res;
    double h = dt;
    for (std::int64_t r = 0; r < refinements; ++r, h /= 2) {
        auto tr = imethod::integrate_galerkin(u, T, h, static_cast<int>(sign));
        auto f = imethod::ftc_residual(tr, mp, th);
        Json row;
        row["dt"] = tr.dt;
        row["steps"] = tr.times.size() - 1;
        row["dE1"] = f.dE1;
        row["correction"] = f.correction;
        row["resonant_integral"] = f.resonant_integral;
        row["ten_integral"] = f.ten_integral;
        row["residual"] = f.residual;
        row["relative"] = f.relative;
        row["mass_drift"] = tr.mass_drift;
        row["energy_drift"] = tr.energy_drift;
        row["imag_residue"] = f.max_imag_residue;
        R.rows.push_back(row);
        res.push_back(std::fabs(f.residual));
    }
    Json orders = Json::array();
    for (std::size_t i = 1; i < res.size(); ++i)
        orders.push_back(res[i] > 0 && res[i - 1] > 0 ? Json(std::log2(res[i - 1] / res[i])) : Json(nullptr));
    R.summary["observed_orders"] = orders;
}

using Runner = std::function<void(const Params&, Report&, int)>;

const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& schemas() {
    static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> s = {
        {"annulus-count",
         {{"form", "hex"}, {"cx", "0"}, {"cy", "0"}, {"r1sq", "0"}, {"r2sq", "25"}, {"boundary", "cc"},
          {"naive", "true"}}},
        {"hypothesis-scan",
         {{"alpha", "0.68"},
          {"N_list", "16,32,64,128,256,512,1024,2048,4096"},
          {"random_centers", "64"},
          {"origin", "true"},
          {"deep_holes", "true"},
          {"edge_midpoints", "true"}}},
        {"reduction-verify",
         {{"n_lo", "-30"},
          {"n_hi", "30"},
          {"K_set", "1,2,4,8"},
          {"radius_cap", "900"},
          {"calib_n_lo", "-6"},
          {"calib_n_hi", "6"},
          {"calib_radius_cap", "200"}}},
        {"h-spectrum", {{"N_list", "4,8,16"}, {"profile", "random"}, {"alpha", "0.7"}, {"N_cap", "16"}}},
        {"strichartz-scan",
         {{"alpha", "0.7"},
          {"N_list", "16,32,64,128,256,512,1024"},
          {"random_members", "32"},
          {"include_constant", "true"},
          {"exact_mode_cap", "64"}}},
        {"trilinear-scan",
         {{"lambdas", "8,16,32,64"},
          {"geometries", "all"},
          {"c_tol", "1"},
          {"gg", "8"},
          {"ratio_lambda_max", "8"},
          {"T", "1"},
          {"uv_samples", "1000"},
          {"pair_cap", "50000000"}}},
        {"symbol-bound-scan",
         {{"N_list", "64,256,1024"},
          {"samples", "100000"},
          {"s", "0.4"},
          {"C_sim", "2"},
          {"C_gg", "8"},
          {"case_i_rule", "literal"},
          {"lambda6_states", "6"}}},
        {"energy-track",
         {{"lambda", "4"},
          {"N", "4"},
          {"s", "0.4"},
          {"modes", "-37,-24,21,34"},
          {"amplitude", "0.5"},
          {"sign", "1"},
          {"T", "0.1"},
          {"dt", "0.004"},
          {"refinements", "4"},
          {"C_sim", "2"},
          {"C_gg", "8"},
          {"case_i_rule", "literal"}}},
    };
    return s;
}

Runner runner(const std::string& id) {
    if (id == "annulus-count") return [](const Params& P, Report& R, int) { run_annulus(P, R); };
    if (id == "hypothesis-scan") return run_hypothesis;
    if (id == "reduction-verify") return run_reduction;
    if (id == "h-spectrum") return [](const Params& P, Report& R, int) { run_h_spectrum(P, R); };
    if (id == "strichartz-scan") return run_strichartz;
    if (id == "trilinear-scan") return [](const Params& P, Report& R, int) { run_trilinear(P, R); };
    if (id == "symbol-bound-scan") return run_symbol_bounds;
    if (id == "energy-track") return [](const Params& P, Report& R, int) { run_energy(P, R); };
    throw ValidationError("unknown experiment '" + id + "'");
}

std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return shortest(v.get<double>());
    if (v.is_number_integer() || v.is_number_unsigned() || v.is_boolean()) return v.dump();
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
        c.entries.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return c;
}

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& [k, s] : schemas()) v.push_back(k);
        return v;
    }();
    return ids;
}

std::vector<std::pair<std::string, std::string>> experiment_schema(const std::string& id) {
    for (const auto& [k, s] : schemas())
        if (k == id) return s;
    throw ValidationError("unknown experiment '" + id + "'");
}

std::string version() { return "0.1.0"; }

Report run(const std::string& id, const Config& cfg, std::uint64_t seed, int threads) {
    auto fn = runner(id);
    Params P(id, cfg);
    Report R;
    R.experiment = id;
    R.params = P.echo();
    R.seed = seed;
    R.version = version();
    auto t0 = std::chrono::steady_clock::now();
    fn(P, R, std::max(1, threads));
    R.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return R;
}

std::string shortest(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string to_json(const Report& r) {
    Json j;
    j["experiment"] = r.experiment;
    j["params"] = r.params;
    j["rows"] = Json::array();
    for (const auto& row : r.rows) j["rows"].push_back(row);
    j["summary"] = r.summary;
    j["meta"] = {{"seed", r.seed}, {"version", r.version}, {"wall_ms", r.wall_ms}};
    return j.dump(2) + "\n";
}

std::string to_csv(const Report& r) {
    std::vector<std::string> cols;
    for (const auto& row : r.rows)
        for (const auto& [k, v] : row.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) out += ",";
            if (row.contains(cols[i])) out += csv_cell(row[cols[i]]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace nlslab::experiments
