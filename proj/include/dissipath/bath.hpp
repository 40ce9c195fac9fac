// bath.hpp — Caldeira-Leggett environment: spectral densities J(omega), damping
// kernels in time and Laplace domain, noise correlation kernels, the
// imaginary-time influence kernel and a discrete-bath cross-check.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dissipath/common.hpp"
#include "dissipath/quadrature.hpp"

namespace dissipath::bath {

enum class SpectralKind { ohmic, drude };

struct SpectralDensity {
    SpectralKind kind = SpectralKind::ohmic;
    double gamma = 0.0;   // damping strength
    double omega_d = 0.0; // Drude cutoff (unused for ohmic)
    double mass = 1.0;    // reference mass of the damped particle

    static SpectralDensity ohmic(double gamma, double mass = 1.0) {
        require(gamma > 0.0, errc::precondition, "ohmic: gamma must be positive");
        return {SpectralKind::ohmic, gamma, 0.0, mass};
    }
    static SpectralDensity drude(double gamma, double omega_d, double mass = 1.0) {
        require(gamma > 0.0, errc::precondition, "drude: gamma must be positive");
        require(omega_d > 0.0, errc::precondition, "drude: omega_d must be positive");
        return {SpectralKind::drude, gamma, omega_d, mass};
    }
};

struct BathOscillator {
    double mass;
    double omega;
    double coupling; // c_n; convention c_n = m_n omega_n^2
};

struct DiscreteBath {
    std::vector<BathOscillator> oscillators;
};

enum class KernelConvention { with_hbar, per_hbar };

struct KernelSample {
    double argument = 0.0; // time (real) or imaginary time, per context
    complex value{};
    KernelConvention convention = KernelConvention::per_hbar;
};

// J(omega): ohmic m*gamma*omega, Drude m*gamma*omega*omega_d^2/(omega^2+omega_d^2)
double j_value(const SpectralDensity& sd, double omega);

// Laplace transform of the damping kernel: gamma for ohmic,
// gamma*omega_d/(omega_d+z) for Drude.
double damping_kernel_laplace(const SpectralDensity& sd, double z);

// gamma(t): Drude is pointwise, strictly ohmic is the distribution
// 2*gamma*delta(t) and carries no pointwise sample.
struct TimeKernelValue {
    bool is_distribution = false;
    double value = 0.0;        // pointwise value (when !is_distribution)
    double delta_weight = 0.0; // weight of delta(t) (when is_distribution)
};
TimeKernelValue damping_kernel_time(const SpectralDensity& sd, double t);

// Noise correlation K(t) = hbar/pi int_0^inf dw J(w)[coth(hbar beta w/2) cos wt
// - i sin wt]; convention with_hbar. Strictly ohmic requires a frequency cap.
struct NoiseQuadrature {
    quad::Config cfg{};
    double omega_cap = 0.0; // 0 = none; required for strictly ohmic J
    int min_chunks = 64;
};
KernelSample noise_correlation(const SpectralDensity& sd, const ThermalState& thermal,
                               double t, const NoiseQuadrature& nq = {});

// Ohmic real part in the per_hbar convention:
// -pi m gamma / (hbar beta)^2 / sinh^2(pi t / hbar beta), t != 0.
KernelSample noise_real_ohmic_closed_form(double gamma, double mass,
                                          const ThermalState& thermal, double t);

// Imaginary-time influence kernel k(tau) on (0, hbar beta), delta comb
// excluded:  (m/hbar beta) sum_l |nu_l| ghat(|nu_l|) e^{i nu_l tau}.
// Ohmic sums in closed (Abel) form; Drude uses partial sums plus an exact
// integral-representation tail.
double matsubara_kernel(const SpectralDensity& sd, const ThermalState& thermal,
                        double tau, const SeriesConfig& series = {});

// K_n(tau) = (c_n^2/2 m_n w_n) cosh(w_n(hbar beta/2 - tau)) / sinh(hbar beta w_n/2)
double single_oscillator_kernel(const BathOscillator& osc, const ThermalState& thermal,
                                double tau);

// mu = (1/pi) int_0^inf dw J(w)/w ; Drude closed form m gamma omega_d / 2;
// strictly ohmic diverges.
double potential_renormalization(const SpectralDensity& sd);

// Total bath mass (2/pi) int dw J(w)/w^3; infrared-divergent for J ~ w^alpha,
// alpha <= 2 (both built-in families).
struct MassResult {
    bool infrared_divergent = false;
    double value = 0.0;
};
MassResult bath_total_mass(const SpectralDensity& sd);

// Same integral for a caller-supplied tabulated/synthetic J on [0, omega_max].
double total_mass_from_j(const std::function<double(double)>& j, double omega_max);

// Equal-frequency-spacing discretization with midpoint weights; c_n = m_n w_n^2.
DiscreteBath discretize_bath(const SpectralDensity& sd, int count, double omega_max);

// gamma(t) rebuilt from the discrete cosine sum (cross-check helper).
double discrete_damping_kernel(const DiscreteBath& db, double system_mass, double t);

// sum_n K_n(tau) over a discrete bath (converges to the continuum kernel).
double discrete_kernel_sum(const DiscreteBath& db, const ThermalState& thermal,
                           double tau);

// Continuum counterpart of the discrete kernel sum:
// (1/pi) int dw J(w) cosh(w(hbar beta/2 - tau))/sinh(hbar beta w/2);
// equals -k(tau) on (0, hbar beta) up to the delta comb.
double continuum_kernel_quadrature(const SpectralDensity& sd, const ThermalState& thermal,
                                   double tau);

} // namespace dissipath::bath
