#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rational.hpp"

namespace nlslab::lattice {

// Q(x,y) = a x^2 + b x y + c y^2
struct QuadraticForm2 {
    Rational a{1}, b{0}, c{1};
    bool positive_definite() const;
    Rational discriminant() const;  // 4ac - b^2
    double value(double x, double y) const;
};

QuadraticForm2 unit_form();
QuadraticForm2 hex_form();

struct Vec2R {
    Rational x{0}, y{0};
};

// p + q*sqrt(d); d is shared by the basis it belongs to
struct Surd {
    Rational p{0}, q{0};
};

// Basis vectors with coordinates in Q(sqrt(radicand)), optionally scaled by sqrt(scale_sq).
struct LatticeBasis2 {
    Surd v1x, v1y, v2x, v2y;
    Rational radicand{0};
    Rational scale_sq{1};
};

LatticeBasis2 square_basis();
LatticeBasis2 hex_basis();

enum class Boundary { ClosedClosed, ClosedOpen, OpenClosed, OpenOpen };

struct AnnulusSpec {
    Vec2R center;
    Rational r1sq{0}, r2sq{0};
    Boundary boundary = Boundary::ClosedClosed;
};

struct CountRecord {
    std::int64_t N = 0;
    double alpha = 0;
    std::size_t center_id = 0;
    std::string center_kind;
    Vec2R center;
    Rational r1sq, r2sq;
    std::int64_t count = 0;
    double normalized = 0;
    std::uint64_t seed = 0;
};

struct ScanResult {
    std::vector<CountRecord> records;
    // per N (same order as input list): max count and max normalized over centers
    std::vector<std::int64_t> sup_count;
    std::vector<double> sup_normalized;
};

struct CenterPolicy {
    bool origin = true;
    bool deep_holes = true;    // (1/3,1/3), (2/3,2/3)
    bool edge_midpoints = true;  // (1/2,0), (0,1/2), (1/2,1/2)
    std::size_t random = 0;
};

struct NamedCenter {
    std::string kind;
    Vec2R at;
};

std::int64_t count_points(const QuadraticForm2& form, const AnnulusSpec& region);
std::int64_t count_points_naive(const QuadraticForm2& form, const AnnulusSpec& region);
double gauss_error(const QuadraticForm2& form, const AnnulusSpec& region);
double form_area(const QuadraticForm2& form, const Rational& r1sq, const Rational& r2sq);
QuadraticForm2 gram_form(const LatticeBasis2& basis);

// N^alpha as a rational rounded down to a multiple of 2^-24.
Rational power_rational(std::int64_t N, double alpha);

std::vector<NamedCenter> sample_centers(const CenterPolicy& policy, std::uint64_t seed);

ScanResult scan_hypothesis_H(double alpha, const std::vector<std::int64_t>& N_list, const CenterPolicy& policy,
                             std::uint64_t seed, int threads = 1);

}  // namespace nlslab::lattice
