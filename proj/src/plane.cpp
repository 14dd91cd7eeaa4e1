#include "plane.hpp"

#include <cmath>

#include "util.hpp"

namespace nlslab::plane {

namespace {

std::int64_t isqrt_ceil(std::int64_t v) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r < v) ++r;
    while (r > 0 && (r - 1) * (r - 1) >= v) --r;
    return r;
}

// 9 * |x - (n/3)(1,1,1)|^2 for x = (a, b, n-a-b)
inline std::int64_t dist9(std::int64_t n, std::int64_t a, std::int64_t b) {
    std::int64_t c = n - a - b;
    std::int64_t u = 3 * a - n, v = 3 * b - n, w = 3 * c - n;
    return u * u + v * v + w * w;
}

// counts triples with lo9 <= 9*dist^2 < hi9, searching |x_i - n/3| <= rad
std::int64_t count_window(std::int64_t n, std::int64_t lo9, std::int64_t hi9, std::int64_t rad) {
    // floor/ceil of n/3 +- rad
    auto fdiv = [](std::int64_t p, std::int64_t q) { return p / q - ((p % q != 0) && ((p < 0) != (q < 0))); };
    std::int64_t a0 = fdiv(n, 3) - rad - 1, a1 = fdiv(n, 3) + rad + 2;
    std::int64_t count = 0;
    for (std::int64_t a = a0; a <= a1; ++a)
        for (std::int64_t b = a0; b <= a1; ++b) {
            std::int64_t d = dist9(n, a, b);
            if (d >= lo9 && d < hi9) ++count;
        }
    return count;
}

}  // namespace

std::int64_t count_plane_slice(const PlaneSliceSpec& spec) {
    require(spec.K >= 1, "K must be positive");
    require(spec.ell >= 0, "ell must be nonnegative");
    require_cap((spec.ell + 1) * spec.K <= spec.radius_cap, "plane slice exceeds radius cap");
    const std::int64_t rad = isqrt_ceil((spec.ell + 1) * spec.K) + 1;
    return count_window(spec.n, 9 * spec.ell * spec.K, 9 * (spec.ell + 1) * spec.K, rad);
}

std::int64_t count_plane_ball(std::int64_t n, std::int64_t bound) {
    require(bound >= 0, "bound must be nonnegative");
    return count_window(n, 0, 9 * bound, isqrt_ceil(bound) + 1);
}

std::int64_t planar_count(const Rational& scale, const lattice::Vec2R& offset, std::int64_t ell, std::int64_t K) {
    lattice::AnnulusSpec reg;
    reg.center = offset;
    reg.r1sq = scale * Rational(ell * K);
    reg.r2sq = scale * Rational((ell + 1) * K);
    reg.boundary = lattice::Boundary::ClosedOpen;
    return lattice::count_points(lattice::hex_form(), reg);
}

std::vector<lattice::Vec2R> candidate_offsets() {
    using lattice::Vec2R;
    return {Vec2R{Rational(0), Rational(0)},       Vec2R{Rational(1, 3), Rational(1, 3)},
            Vec2R{Rational(2, 3), Rational(2, 3)}, Vec2R{Rational(1, 3), Rational(2, 3)},
            Vec2R{Rational(2, 3), Rational(1, 3)}, Vec2R{Rational(1, 2), Rational(0)},
            Vec2R{Rational(0), Rational(1, 2)},    Vec2R{Rational(1, 2), Rational(1, 2)}};
}

namespace {

struct Cell {
    std::int64_t n, ell, K;
};

std::vector<Cell> grid_cells(std::int64_t n_lo, std::int64_t n_hi, const std::vector<std::int64_t>& K_set,
                             std::int64_t cap) {
    std::vector<Cell> cells;
    for (std::int64_t n = n_lo; n <= n_hi; ++n)
        for (auto K : K_set)
            for (std::int64_t ell = 0; (ell + 1) * K <= cap; ++ell) cells.push_back({n, ell, K});
    return cells;
}

bool same_mod_lattice(const lattice::Vec2R& u, const lattice::Vec2R& v) {
    Rational dx = u.x - v.x, dy = u.y - v.y;
    return dx.den == 1 && dy.den == 1;
}

lattice::Vec2R negate(const lattice::Vec2R& v) { return {-v.x, -v.y}; }

}  // namespace

CalibrationOutcome calibrate_reduction(std::int64_t n_lo, std::int64_t n_hi, const std::vector<std::int64_t>& K_set,
                                       std::int64_t radius_cap, int threads) {
    require(n_lo <= n_hi && !K_set.empty(), "calibration grid is empty");
    for (auto K : K_set) require(K >= 1 && K <= radius_cap, "K must lie in [1, radius_cap]");
    const auto cells = grid_cells(n_lo, n_hi, K_set, radius_cap);
    require(!cells.empty(), "calibration grid is empty");
    std::vector<std::int64_t> slice(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        slice[i] = count_plane_slice({cells[i].n, cells[i].ell, cells[i].K, radius_cap});
    });

    const std::vector<Rational> scales{Rational(1), Rational(1, 2), Rational(2)};
    const auto offsets = candidate_offsets();
    CalibrationOutcome out;
    std::string worst;
    std::int64_t worst_gap = -1;
    std::vector<ReductionCalibration> found;
    for (const auto& sc : scales) {
        ReductionCalibration cal;
        cal.radius_scale = sc;
        bool all_classes = true;
        for (int r = 0; r < 3; ++r) {
            bool any_cell = false;
            for (const auto& off : offsets) {
                bool ok = true;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (mod3(cells[i].n) != r) continue;
                    any_cell = true;
                    std::int64_t p = planar_count(sc, off, cells[i].ell, cells[i].K);
                    if (p != slice[i]) {
                        ok = false;
                        std::int64_t gap = iabs(p - slice[i]);
                        if (gap > worst_gap) {
                            worst_gap = gap;
                            worst = "scale=" + sc.str() + " offset=(" + off.x.str() + "," + off.y.str() +
                                    ") n=" + std::to_string(cells[i].n) + " ell=" + std::to_string(cells[i].ell) +
                                    " K=" + std::to_string(cells[i].K) + " slice=" + std::to_string(slice[i]) +
                                    " planar=" + std::to_string(p);
                        }
                        break;
                    }
                }
                if (ok && any_cell) cal.matches[r].push_back(off);
            }
            if (!any_cell) {
                // residue class absent from the grid: any offset is vacuous, keep the origin
                cal.matches[r].push_back(offsets.front());
            }
            if (cal.matches[r].empty()) all_classes = false;
        }
        if (all_classes) {
            for (int r = 0; r < 3; ++r) cal.offsets[r] = cal.matches[r].front();
            cal.verified = true;
            found.push_back(cal);
            out.scales_matched.push_back(sc);
        }
    }
    if (found.empty()) {
        out.failure = "no calibration matches the grid; worst cell: " + worst;
        return out;
    }
    // matches within a class may only differ by the point reflection v -> -v (an isometry of the form)
    bool unique = found.size() == 1;
    for (const auto& cal : found)
        for (int r = 0; r < 3; ++r)
            for (const auto& m : cal.matches[r])
                if (!same_mod_lattice(m, cal.offsets[r]) && !same_mod_lattice(m, negate(cal.offsets[r])))
                    unique = false;
    out.unique = unique;
    out.calibration = found.front();
    return out;
}

VerifyReport verify_reduction(const ReductionCalibration& calib, std::int64_t n_lo, std::int64_t n_hi,
                              const std::vector<std::int64_t>& K_set, std::int64_t radius_cap, int threads) {
    require(n_lo <= n_hi && !K_set.empty(), "verification grid is empty");
    const auto cells = grid_cells(n_lo, n_hi, K_set, radius_cap);
    VerifyReport rep;
    rep.cells.resize(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        const Cell& c = cells[i];
        CellResult& r = rep.cells[i];
        r.n = c.n;
        r.ell = c.ell;
        r.K = c.K;
        r.slice = count_plane_slice({c.n, c.ell, c.K, radius_cap});
        r.planar = planar_count(calib.radius_scale, calib.offsets[mod3(c.n)], c.ell, c.K);
        r.pass = r.slice == r.planar;
    });
    for (const auto& r : rep.cells) (r.pass ? rep.passed : rep.failed)++;
    return rep;
}

}  // namespace nlslab::plane
