// correlations.hpp — equilibrium position autocorrelation of the damped
// oscillator: imaginary-time Matsubara sum, real-time frequency integrals,
// dynamic susceptibility and FDT, the contour pole sum, zero-temperature
// tails, and the RWA / RWA-Markov approximations with their discrepancy.
#pragma once

#include <vector>

#include "dissipath/common.hpp"
#include "dissipath/quadrature.hpp"
#include "dissipath/thermo.hpp"

namespace dissipath::correlations {

using thermo::DampedOscillator;

struct Susceptibility {
    double omega = 0.0;
    complex value{};
};

enum class CorrelationRoute { matsubara_sum, frequency_integral, pole_sum, rwa, rwa_markov };
enum class CorrelationAxis { real_time, imaginary_time, frequency };

struct CorrelationSeries {
    CorrelationAxis axis = CorrelationAxis::real_time;
    std::vector<std::pair<double, complex>> samples;
    CorrelationRoute route = CorrelationRoute::frequency_integral;
};

struct OscillatorPoles {
    double omega_bar;  // sqrt(omega0^2 - gamma^2/4)
    double gamma_half; // gamma / 2
};
// Underdamped pole pair; throws unsupported_regime for gamma >= 2 omega0.
OscillatorPoles oscillator_poles(const DampedOscillator& dosc);

// chi(omega) = (1/m) / (omega0^2 - omega^2 - i gamma omega); the strictly
// ohmic response with constant gamma, exactly as the equation of motion gives.
Susceptibility chi(const DampedOscillator& dosc, double omega);

// FDT spectrum 2 hbar chi''(omega)/(1 - e^{-hbar beta omega}); removable
// omega -> 0 limit handled analytically.
double c_tilde(const DampedOscillator& dosc, const ThermalState& thermal, double omega);

// Imaginary-time correlation C(tau) = (1/ m beta) sum_n e^{i nu_n tau} /
// (nu_n^2 + gamma |nu_n| + omega0^2); partial sum plus an exact
// integral-representation tail. C(0) is the equilibrium variance.
double c_imaginary_time(const DampedOscillator& dosc, const ThermalState& thermal,
                        double tau, const SeriesConfig& series = {});

// Real-time correlation C(t) = S(t) + i A(t) via the frequency integral.
complex c_real_time(const DampedOscillator& dosc, const ThermalState& thermal, double t,
                    const quad::Config& cfg = {});
complex c_real_time_t0(const DampedOscillator& dosc, double t, const quad::Config& cfg = {});

// Symmetric part (frequency-integral route); *_t0 is the first-class
// zero-temperature variant (coth -> sign).
double s_symmetric(const DampedOscillator& dosc, const ThermalState& thermal, double t,
                   const quad::Config& cfg = {});
double s_symmetric_t0(const DampedOscillator& dosc, double t, const quad::Config& cfg = {});

// Antisymmetric part; temperature-independent (purely classical response).
double a_antisymmetric(const DampedOscillator& dosc, double t, const quad::Config& cfg = {});

// Contour pole sum: damped oscillation plus Matsubara line (underdamped only).
double s_pole_sum(const DampedOscillator& dosc, const ThermalState& thermal, double t,
                  const SeriesConfig& series = {});

// Matsubara line in the T -> 0 limit (the algebraic branch):
// -(hbar gamma/pi m) int_0^inf dnu nu e^{-nu|t|} / ((nu^2+omega0^2)^2 - gamma^2 nu^2).
double s_zero_temperature_branch(const DampedOscillator& dosc, double t);

// Exact T = 0 limit of the pole sum: damped cosine + algebraic branch.
double s_t0_pole_limit(const DampedOscillator& dosc, double t);

// Asymptotic tail -hbar gamma / (pi m omega0^4 t^2).
double s_zero_temperature_tail(const DampedOscillator& dosc, double t);

// Rotating-wave approximation (single Lorentzian, full coth).
double s_rwa(const DampedOscillator& dosc, const ThermalState& thermal, double t,
             const quad::Config& cfg = {});
double s_rwa_t0(const DampedOscillator& dosc, double t, const quad::Config& cfg = {});

// RWA + Markov: (hbar/4 m omega_bar) cos(omega_bar t) e^{-gamma t/2} at T = 0;
// the finite-T variant carries coth(hbar beta omega_bar / 2).
double s_rwa_markov(const DampedOscillator& dosc, double t);
double s_rwa_markov(const DampedOscillator& dosc, const ThermalState& thermal, double t);

// Delta = S_RWA - S_RWA,Markov at T = 0, with both candidate normalizations
// of the published 1/t^2 asymptote.
struct MarkovDiscrepancy {
    double value;
    double asymptote_omega0;    // -hbar gamma/(2 pi m omega0^4 t^2)
    double asymptote_omega_bar; // -hbar gamma/(2 pi m omega_bar^4 t^2)
};
MarkovDiscrepancy markov_discrepancy(const DampedOscillator& dosc, double t,
                                     const quad::Config& cfg = {});

} // namespace dissipath::correlations
