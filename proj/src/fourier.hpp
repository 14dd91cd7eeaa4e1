#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace nlslab::fourier {

using cplx = std::complex<double>;

// Function on the torus [0, 2*pi*lambda): u(x) = (1/lambda) sum_j a_j exp(i (j/lambda) x).
// Coefficients are keyed by the integer index j; the frequency is j/lambda.
// Stored amplitudes are relative to base_lambda; rescaling only touches lambda so it composes exactly.
struct FourierState {
    double lambda = 1.0;
    double base_lambda = 1.0;
    std::map<std::int64_t, cplx> coeffs;

    double frequency(std::int64_t j) const { return static_cast<double>(j) / lambda; }
    double amplitude_scale() const;
    cplx amplitude(std::int64_t j) const;
    std::vector<std::pair<std::int64_t, cplx>> modes() const;  // nonzero (index, amplitude)
    double l2_norm_sq() const;
    std::int64_t cutoff_index() const;  // max |j| with nonzero amplitude
};

FourierState rescale(const FourierState& s, double nu);
double sigma_exponent(double p1, double p2);  // 2/p2 + 1/p1 - 1/2
FourierState evolve_linear(const FourierState& s, double t);

// integral_0^T exp(-i omega t) dt
cplx time_kernel(double omega, double T);

struct L6Exact {
    double value = 0;
    double imag_residue = 0;
};

// Exact Fourier-side value of int_0^T int |e^{it Delta} u|^6; refuses more than mode_cap modes.
L6Exact l6_time_integral_exact(const FourierState& s, double T, std::size_t mode_cap = 64);
// Literal six-index enumeration; test oracle for small supports.
double l6_time_integral_bruteforce(const FourierState& s, double T);
// Exact spatial quadrature with trapezoid rule in time over Mt points.
double l6_norm_quadrature(const FourierState& s, double T, std::size_t Mx, std::size_t Mt);
// Exact spatial FFT quadrature with panel Gauss-Legendre in time, resolved to the integrand bandwidth.
double l6_time_integral_gauss(const FourierState& s, double T, int threads = 1);
// Minimum admissible spatial grid for l6_norm_quadrature.
std::size_t min_spatial_points(const FourierState& s);

// ||prod_j e^{it Delta} phi_j||^2 over [0,T] x lambda-torus, exact.
L6Exact trilinear_l2_sq(const FourierState& p1, const FourierState& p2, const FourierState& p3, double T,
                        std::size_t mode_cap = 4096);

struct HSpectrum {
    std::int64_t N = 0;
    std::vector<double> values;  // values[tau], tau = 0..max
    double at(std::int64_t tau) const;
};

// magnitudes keyed by integer frequency in [-2N, 2N]
HSpectrum h_spectrum(const std::map<std::int64_t, double>& magnitudes, std::int64_t N, std::int64_t N_cap = 16);
HSpectrum h_spectrum_bruteforce(const std::map<std::int64_t, double>& magnitudes, std::int64_t N);
double dyadic_block_average(const HSpectrum& h, double K);

struct ScanRow {
    std::int64_t N = 0;
    std::size_t member = 0;
    bool constant_profile = false;
    double T = 0;
    double l6 = 0;
    double l2 = 0;
    double ratio = 0;
};

struct StrichartzScan {
    std::vector<ScanRow> rows;
    std::vector<double> max_ratio;  // per N
    double slope = 0;               // least-squares slope of log max_ratio vs log N
};

FourierState random_state(std::int64_t N, std::uint64_t seed, std::uint64_t a, std::uint64_t b);
FourierState constant_state(std::int64_t N);

StrichartzScan strichartz_scan(double alpha, const std::vector<std::int64_t>& N_list, std::size_t random_members,
                               bool include_constant, std::uint64_t seed, int threads = 1,
                               std::size_t exact_mode_cap = 64);

struct ChainRow {
    std::int64_t N = 0;
    double lhs = 0;
    double h0 = 0;
    double block_sup = 0;
    double block_K = 0;
    double rhs = 0;  // 2*pi*(N^-alpha h(0) + sup block average)
    double ratio = 0;
};

ChainRow chain_inequality(const std::map<std::int64_t, double>& magnitudes, std::int64_t N, double alpha);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlslab::fourier
