#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace nlslab::plane {

// Z^3 points on x1+x2+x3 = n whose squared distance to (n/3)(1,1,1) lies in [ell*K, (ell+1)*K).
struct PlaneSliceSpec {
    std::int64_t n = 0;
    std::int64_t ell = 0;
    std::int64_t K = 1;
    std::int64_t radius_cap = 900;  // bound on (ell+1)*K
};

struct ReductionCalibration {
    Rational radius_scale{1};
    std::array<lattice::Vec2R, 3> offsets{};
    bool verified = false;
    // every offset that matched, per residue class (for the uniqueness report)
    std::array<std::vector<lattice::Vec2R>, 3> matches{};
};

struct CellResult {
    std::int64_t n = 0, ell = 0, K = 0;
    std::int64_t slice = 0, planar = 0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<CellResult> cells;
    std::size_t passed = 0, failed = 0;
};

struct CalibrationOutcome {
    std::optional<ReductionCalibration> calibration;
    bool unique = false;
    std::string failure;  // filled when no calibration exists
    std::vector<Rational> scales_matched;
};

std::int64_t count_plane_slice(const PlaneSliceSpec& spec);
// total count of sum-n triples with squared distance < bound
std::int64_t count_plane_ball(std::int64_t n, std::int64_t bound);

std::int64_t planar_count(const Rational& scale, const lattice::Vec2R& offset, std::int64_t ell, std::int64_t K);

std::vector<lattice::Vec2R> candidate_offsets();

CalibrationOutcome calibrate_reduction(std::int64_t n_lo, std::int64_t n_hi, const std::vector<std::int64_t>& K_set,
                                       std::int64_t radius_cap, int threads = 1);

VerifyReport verify_reduction(const ReductionCalibration& calib, std::int64_t n_lo, std::int64_t n_hi,
                              const std::vector<std::int64_t>& K_set, std::int64_t radius_cap, int threads = 1);

inline int mod3(std::int64_t n) { return static_cast<int>(((n % 3) + 3) % 3); }

}  // namespace nlslab::plane
