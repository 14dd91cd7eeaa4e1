#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fourier.hpp"

namespace nlslab::imethod {

using fourier::cplx;
using fourier::FourierState;

// m(r) = 1 for r <= N, (N/r)^(1-s) above N.
struct MultiplierParams {
    double N = 1.0;
    double s = 0.5;
};

double multiplier_m(double r, const MultiplierParams& p);
FourierState apply_I(const FourierState& u, const MultiplierParams& p);

// (2pi/lambda) sum |k|^(2 sigma) |a|^2, and the inhomogeneous H^1 version.
double hdot_norm_sq(const FourierState& u, double sigma);
double h1_norm_sq(const FourierState& u);
// int |u|^6 over the lambda-torus by an exact trapezoid sum.
double l6_pow6_spatial(const FourierState& u);

// Frequencies k_i = idx[i] / lambda. Even positions (1-based) carry conjugated factors as negated frequencies.
struct FreqTuple {
    std::vector<std::int64_t> idx;
    double lambda = 1.0;
    double k(std::size_t i) const { return static_cast<double>(idx[i]) / lambda; }
    std::size_t size() const { return idx.size(); }
};

bool in_gamma(const FreqTuple& t);
// lambda^2 * Omega_n = sum (-1)^(j+1) idx_j^2 (1-based j), exact.
std::int64_t omega_scaled(const FreqTuple& t);
double omega_n(const FreqTuple& t);

struct Starred {
    std::vector<double> values;      // |v| sorted nonincreasing
    std::vector<std::size_t> order;  // original positions, stable on ties
};
Starred rearrange_decreasing(const std::vector<double>& values);

// 2^floor(log2 r) for r >= 1, else 1.
double dyadic_class(double r);

enum class CaseIRule { Literal, Lemma };  // |k1+k2| << N3*/N1^2  vs  (N3*)^2/N1*

struct Thresholds {
    double C_sim = 2.0;
    double C_gg = 8.0;
    CaseIRule case_i = CaseIRule::Literal;
};

enum class Resonance { I, IIa, IIb, IIc, III, NonResonant };
std::string resonance_name(Resonance r);

struct ResonanceVerdict {
    Resonance kind = Resonance::NonResonant;
    std::string witness;
    std::array<double, 6> canonical{};  // normalized tuple the cases were checked on
    std::array<double, 6> dyadic{};     // N_1..N_6 of the canonical tuple
    std::array<double, 6> starred{};    // N_1*..N_6*
    bool resonant() const { return kind != Resonance::NonResonant; }
};

// |k1*| > N and D(|k1*|) ~ D(|k2*|).
bool in_upsilon6(const FreqTuple& t, const MultiplierParams& p, const Thresholds& th);

// Rejects tuples off Gamma_6 or off Upsilon_6.
ResonanceVerdict classify_resonance(const FreqTuple& t, const MultiplierParams& p, const Thresholds& th);

// Raised when sigma6tilde or the quotient divides by Omega_6 = 0 with a nonzero numerator.
struct SingularSymbol : std::domain_error {
    using std::domain_error::domain_error;
};

enum class SymbolId { Sigma2, Sigma6, M6_1, M6, M6bar, Sigma6Tilde, Quotient };
SymbolId parse_symbol(const std::string& name);

// sign = +1 defocusing, -1 focusing; only Sigma6 depends on it.
double evaluate_symbol(SymbolId id, const FreqTuple& t, const MultiplierParams& p, const Thresholds& th,
                       int sign = 1);

// Symbol on integer index tuples at a fixed lambda.
using Symbol = std::function<double(const std::int64_t* idx, std::size_t n)>;

Symbol make_symbol(SymbolId id, double lambda, const MultiplierParams& p, const Thresholds& th, int sign = 1);

// Lambda_n(M; f_1..f_n) = 2 pi lambda^(1-n) sum_{Gamma_n} M(k) prod_j fhat_j(k_j), with
// fhat_j(k) = a_j(k) on odd slots and conj(a_j(-k)) on even slots.
cplx lambda_n(const Symbol& M, const std::vector<const FourierState*>& slots, std::size_t term_cap = 5'000'000);

struct EnergyForms {
    double symbol_form = 0;
    double norm_form = 0;
};
// E^1_I = (1/2)||Iu||^2_{H^1 dot} + sign (1/6) ||Iu||^6_{L^6}, computed both ways; throws on disagreement.
EnergyForms energy_E1I(const FourierState& u, const MultiplierParams& p, int sign = 1, double rtol = 1e-10);
// Untruncated energy of u itself (m = 1).
double hamiltonian(const FourierState& u, int sign = 1);

// Galerkin-truncated quintic NLS on a fixed mode set.
struct GalerkinSystem {
    std::vector<std::int64_t> modes;  // sorted integer indices
    double lambda = 1.0;
    int sign = 1;
    bool nonlinear = true;
};

struct Trajectory {
    GalerkinSystem sys;
    double dt = 0;
    int order = 4;
    std::vector<double> times;
    std::vector<std::vector<cplx>> amps;  // amplitudes aligned with sys.modes
    FourierState state(std::size_t i) const;
    double mass_drift = 0;
    double energy_drift = 0;
};

// Interaction-picture RK4 with an even number of uniform steps covering [0,T]; every step is recorded.
// Halves dt up to max_halvings times if mass drift exceeds mass_tol.
Trajectory integrate_galerkin(const FourierState& init, const std::vector<std::int64_t>& modes, double T, double dt,
                              int sign = 1, bool nonlinear = true, double mass_tol = 1e-8, int max_halvings = 4);
Trajectory integrate_galerkin(const FourierState& init, double T, double dt, int sign = 1, bool nonlinear = true,
                              double mass_tol = 1e-8, int max_halvings = 4);

// Projected quintic term lambda^-4 sum a abar a abar a onto the mode set.
std::vector<cplx> quintic_projected(const GalerkinSystem& sys, const std::vector<cplx>& a);

// Multilinear form on the Galerkin set aggregated by monomial.
class GalerkinForm {
public:
    GalerkinForm(const GalerkinSystem& sys, std::size_t n, const Symbol& M, std::size_t term_cap = 5'000'000);
    cplx evaluate(const std::vector<cplx>& a) const;
    std::size_t monomials() const { return coef_.size(); }
    std::size_t terms() const { return terms_; }

private:
    std::size_t n_ = 0, m_ = 0;
    double norm_ = 0;
    std::vector<std::vector<std::uint8_t>> exps_;  // per monomial: odd counts then even counts per mode
    std::vector<cplx> coef_;
    std::size_t terms_ = 0;
};

// Elongated symbol sum_j (-1)^j X_j(M6) on 10-tuples, with the Galerkin indicator on the merged slot.
Symbol elongation_sum(const Symbol& M6, const GalerkinSystem& sys);

struct FtcReport {
    double T = 0;
    double dE1 = 0;
    double correction = 0;  // sign * [Lambda_6(sigma6tilde)]_0^T
    double resonant_integral = 0;
    double ten_integral = 0;
    double residual = 0;  // dE1 + correction - resonant_integral - ten_integral
    double scale = 0;     // max term magnitude
    double relative = 0;
    double max_imag_residue = 0;
    std::size_t singular_tuples = 0;
};

FtcReport ftc_residual(const Trajectory& traj, const MultiplierParams& p, const Thresholds& th,
                       std::size_t term_cap = 5'000'000);

struct DerivativeCheck {
    cplx finite_difference;
    cplx identity;
    double abs_error = 0;
};
// d/dt Lambda_6(sigma6tilde) by centered differences of step h against -i Lambda_6(Omega sigma6tilde) +
// i sign Lambda_10(sum (-1)^j X_j sigma6tilde).
DerivativeCheck derivative_identity_check(const FourierState& u, const MultiplierParams& p, const Thresholds& th,
                                          int sign, double h, std::size_t substeps = 16);

struct BoundScanRow {
    double N = 0;
    std::string quantity;
    std::size_t samples = 0;
    std::size_t singular = 0;
    double max_ratio = 0;
    std::string argmax;
};

struct BoundScan {
    std::vector<BoundScanRow> rows;
    double decay_exponent = 0;  // fit of log max |Lambda_6(sigma6tilde)|/||Iu||^6_{H^1} against log N
    std::vector<std::string> counterexamples;  // singular nonresonant tuples, first few
};

// s is taken from p; N runs over N_list.
BoundScan bound_scan_symbols(const MultiplierParams& p, std::size_t samples, const std::vector<double>& N_list,
                             std::uint64_t seed, const Thresholds& th, std::size_t lambda6_states = 6,
                             int threads = 1);

}  // namespace nlslab::imethod
