#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fourier.hpp"
#include "rational.hpp"

namespace nlslab::trilinear {

// Interval [lo/lambda, hi/lambda] of the grid (1/lambda)Z.
struct GridInterval {
    std::int64_t lo = 0, hi = 0;
    std::int64_t points() const { return hi - lo + 1; }
};

struct TrilinearSpec {
    std::int64_t lambda = 1;
    GridInterval I1, I2, I3;
    Rational N13{0}, N23{0};
    Rational c_tol{1};
    Rational J{0};
    double gg = 8.0;  // a << b  iff  a <= b / gg

    double length(const GridInterval& I) const { return static_cast<double>(I.hi - I.lo) / lambda; }
    double n_max() const { return std::max(N13.to_double(), N23.to_double()); }
};

// Builds a spec from real-valued endpoints; endpoints must be multiples of 1/lambda.
TrilinearSpec make_spec(std::int64_t lambda, const Rational& a1, const Rational& b1, const Rational& a2,
                        const Rational& b2, const Rational& a3, const Rational& b3, const Rational& c_tol);

struct Gain {
    double M = 0;
    double K = 0;
    bool enhanced = false;
};

Gain enhanced_gain_K(const TrilinearSpec& spec);

std::int64_t count_A_set(const TrilinearSpec& spec, const Rational& n, const Rational& tau);
std::int64_t count_A_set_naive(const TrilinearSpec& spec, const Rational& n, const Rational& tau);

struct SupResult {
    std::int64_t sup = 0;
    Rational arg_n{0}, arg_tau{0};
    double normalized = 0;
    double K = 0;
};

// Supremum over every reachable n and every tau with integer lambda^2 tau.
SupResult sup_count_A(const TrilinearSpec& spec, std::uint64_t pair_cap = 50'000'000);
// Supremum over explicit grids.
SupResult sup_count_A_grid(const TrilinearSpec& spec, const std::vector<Rational>& n_grid,
                           const std::vector<Rational>& tau_grid);

struct UvReport {
    std::size_t samples = 0;
    Rational max_abs_residual{0};
};

// x^2+y^2+xy+lam(x a~ + y b~) against the completed-square ellipse form, exactly.
Rational uv_residual(const Rational& x, const Rational& y, const Rational& at, const Rational& bt, const Rational& lam);
UvReport uv_change_of_variables_check(std::size_t samples, std::uint64_t seed);

struct RatioResult {
    double ratio = 0;      // ||prod e^{it Delta} phi_j||_{L^2} / prod ||phi_j||
    double reference = 0;  // (1/lambda + K/N_max)^{1/2}
    double normalized = 0;
};

RatioResult trilinear_l2_ratio(const fourier::FourierState& p1, const fourier::FourierState& p2,
                               const fourier::FourierState& p3, double T, const TrilinearSpec& spec);

// Seeded random state supported on a grid interval.
fourier::FourierState random_on(const GridInterval& I, std::int64_t lambda, std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b);

struct Geometry {
    std::string name;
    Rational a1, b1, a2, b2, a3, b3;
};

std::vector<Geometry> standard_geometries();

}  // namespace nlslab::trilinear
