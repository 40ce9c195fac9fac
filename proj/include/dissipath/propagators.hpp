// propagators.hpp — closed-form quantum propagators (free particle, driven
// harmonic oscillator, ring, wall, box) and the semiclassical Van Vleck
// construction.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dissipath/common.hpp"
#include "dissipath/quadrature.hpp"

namespace dissipath::propagators {

struct DriveForce {
    enum class Interpolation { linear, zero };
    std::vector<std::pair<double, double>> samples; // (time, force), times increasing
    Interpolation interpolation = Interpolation::linear;

    bool empty() const { return samples.empty(); }
    double operator()(double t) const;
};

struct RingSpec {
    double mass = 1.0;
    double radius = 1.0;
    GlobalConstants constants{};
};

struct BoxSpec {
    double mass = 1.0;
    double length = 1.0;
    GlobalConstants constants{};
};

enum class Route { closed_form, winding_sum, spectral_sum, image_sum, trotter };

struct PropagatorValue {
    complex amplitude{};
    std::optional<int> morse_index{};
    Route route = Route::closed_form;
};

// sqrt(m/2 pi i hbar t) exp(i m (xf-xi)^2 / 2 hbar t); complex t supported for
// the epsilon-regularized sums (Im t <= 0).
complex free_propagator_ct(double mass, complex t, double x_f, double x_i,
                           const GlobalConstants& gc = {});
PropagatorValue free_propagator(double mass, double t, double x_f, double x_i,
                                const GlobalConstants& gc = {});
double free_classical_action(double mass, double t, double x_f, double x_i);

// Classical action of the driven oscillator (three drive terms by
// Gauss-Legendre panels aligned with the force breakpoints).
double ho_classical_action(const OscillatorSpec& spec, const DriveForce& drive, double t,
                           double x_f, double x_i, const quad::Config& cfg = {});

// Driven-oscillator propagator with Morse phase, n = floor(omega t / pi).
PropagatorValue ho_propagator(const OscillatorSpec& spec, const DriveForce& drive, double t,
                              double x_f, double x_i);
complex ho_propagator_ct(const OscillatorSpec& spec, complex t, double x_f, double x_i);

// Delta-limit description at conjugate points: K(xf, k pi/omega, xi) =
// (+-1 or -+i ...) delta(xf -+ xi); returned instead of a numeric amplitude.
struct ConjugatePointLimit {
    int parity;        // xf -> +xi (even k) or xf -> -xi (odd k)
    complex prefactor; // factor multiplying the delta distribution
};
ConjugatePointLimit ho_conjugate_limit(const OscillatorSpec& spec, int k);

// Ring: winding-number sum of free propagators vs spectral sum, both at
// complex time t - i eps.
PropagatorValue ring_propagator_winding(const RingSpec& spec, double t, double phi_f,
                                        double phi_i, int n_max, double epsilon);
PropagatorValue ring_propagator_spectral(const RingSpec& spec, double t, double phi_f,
                                         double phi_i, int l_max, double epsilon);

// Single hard wall at x = 0 (x > 0 allowed region).
PropagatorValue wall_propagator(double mass, double t, double x_f, double x_i,
                                const GlobalConstants& gc = {});

// Box on [0, L]: image sum with alternating signs vs spectral sum.
PropagatorValue box_propagator_images(const BoxSpec& spec, double t, double x_f,
                                      double x_i, int n_max, double epsilon);
PropagatorValue box_propagator_spectral(const BoxSpec& spec, double t, double x_f,
                                        double x_i, int j_max, double epsilon);
double box_eigenenergy(const BoxSpec& spec, int j);

// Two-point Richardson extrapolation in the regulator: 2 f(eps/2) - f(eps).
template <typename F>
complex richardson_epsilon(F&& f, double epsilon) {
    return 2.0 * f(0.5 * epsilon) - f(epsilon);
}

// Van Vleck semiclassical propagator from a caller-supplied classical action
// S(xf, t, xi). The mixed derivative is taken by central differences; the
// Morse index counts its sign changes on a sweep from t0 to t.
using ActionFn = std::function<double(double x_f, double t, double x_i)>;

struct VanVleckOptions {
    double fd_step = 0.0;    // 0 -> eps_machine^{1/3} * scale
    int morse_sweep_steps = 400;
    double sweep_t0 = 1e-4;
};
PropagatorValue vanvleck_propagator(const ActionFn& action, double t, double x_f,
                                    double x_i, const VanVleckOptions& opt = {},
                                    const GlobalConstants& gc = {});
double mixed_action_derivative(const ActionFn& action, double t, double x_f, double x_i,
                               double fd_step);

} // namespace dissipath::propagators
