#include "dissipath/propagators.hpp"

#include <algorithm>
#include <cmath>

namespace dissipath::propagators {

namespace {

const complex I{0.0, 1.0};

// Gauss-Legendre 16 for panel integrals of piecewise-smooth drive integrands.
struct GL16 {
    std::array<double, 16> x{}, w{};
    GL16() {
        const int n = 16;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1, p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1, p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = -t;
            x[n - 1 - i] = t;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};
const GL16& gl16() {
    static const GL16 g;
    return g;
}

// Panel boundaries: force-sample breakpoints restricted to [0, t].
std::vector<double> drive_panels(const DriveForce& drive, double t) {
    std::vector<double> pts{0.0, t};
    for (const auto& [ts, fs] : drive.samples)
        if (ts > 0.0 && ts < t) pts.push_back(ts);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <typename F>
double panel_integral(const F& f, const std::vector<double>& pts) {
    const auto& gl = gl16();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double c = 0.5 * (pts[i] + pts[i + 1]);
        const double h = 0.5 * (pts[i + 1] - pts[i]);
        double acc = 0.0;
        for (int j = 0; j < 16; ++j) acc += gl.w[j] * f(c + h * gl.x[j]);
        s += acc * h;
    }
    return s;
}

void check_conjugate(double omega, double t) {
    const double st = std::sin(omega * t);
    if (std::abs(st) < 1e-12 * std::max(1.0, std::abs(omega * t)))
        throw domain_error(errc::conjugate_point,
                           "harmonic oscillator: omega*t at a conjugate point (sin = 0)");
}

} // namespace

double DriveForce::operator()(double t) const {
    if (samples.empty()) return 0.0;
    if (t <= samples.front().first)
        return interpolation == Interpolation::linear ? samples.front().second : 0.0;
    if (t >= samples.back().first)
        return interpolation == Interpolation::linear ? samples.back().second : 0.0;
    auto it = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double v, const auto& s) { return v < s.first; });
    const auto& [t1, f1] = *it;
    const auto& [t0, f0] = *(it - 1);
    if (interpolation == Interpolation::zero) return f0;
    return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

complex free_propagator_ct(double mass, complex t, double x_f, double x_i,
                           const GlobalConstants& gc) {
    const double hbar = gc.hbar;
    const complex it = I * t;
    const complex pref = std::sqrt(mass / (2.0 * pi * hbar) / it);
    const double dx = x_f - x_i;
    return pref * std::exp(I * mass * dx * dx / (2.0 * hbar * t));
}

PropagatorValue free_propagator(double mass, double t, double x_f, double x_i,
                                const GlobalConstants& gc) {
    require(t > 0.0, errc::precondition, "free_propagator: t must be positive");
    return {free_propagator_ct(mass, t, x_f, x_i, gc), 0, Route::closed_form};
}

double free_classical_action(double mass, double t, double x_f, double x_i) {
    require(t > 0.0, errc::precondition, "free_classical_action: t must be positive");
    const double dx = x_f - x_i;
    return 0.5 * mass * dx * dx / t;
}

double ho_classical_action(const OscillatorSpec& spec, const DriveForce& drive, double t,
                           double x_f, double x_i, const quad::Config&) {
    require(t > 0.0, errc::precondition, "ho_classical_action: t must be positive");
    const double m = spec.mass;
    const double w = spec.omega;
    if (w == 0.0 && drive.empty()) return free_classical_action(m, t, x_f, x_i);
    check_conjugate(w, t);
    const double st = std::sin(w * t);
    const double ct = std::cos(w * t);

    double S = m * w / (2.0 * st) * ((x_i * x_i + x_f * x_f) * ct - 2.0 * x_i * x_f);
    if (drive.empty()) return S;

    const auto pts = drive_panels(drive, t);
    const double I_f = panel_integral([&](double s) { return std::sin(w * s) * drive(s); }, pts);
    const double I_i =
        panel_integral([&](double s) { return std::sin(w * (t - s)) * drive(s); }, pts);
    S += x_f / st * I_f + x_i / st * I_i;

    // double integral: int_0^t ds sin(w(t-s)) f(s) G(s), G(s) = int_0^s sin(w u) f(u) du
    std::vector<double> prefix(pts.size(), 0.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        prefix[i + 1] = prefix[i] +
                        panel_integral([&](double u) { return std::sin(w * u) * drive(u); },
                                       {pts[i], pts[i + 1]});
    }
    auto G = [&](double s) {
        auto it = std::upper_bound(pts.begin(), pts.end(), s);
        const std::size_t k = std::max<std::ptrdiff_t>(0, it - pts.begin() - 1);
        double v = prefix[k];
        if (s > pts[k])
            v += panel_integral([&](double u) { return std::sin(w * u) * drive(u); },
                                {pts[k], s});
        return v;
    };
    const double D =
        panel_integral([&](double s) { return std::sin(w * (t - s)) * drive(s) * G(s); }, pts);
    S -= D / (m * w * st);
    return S;
}

PropagatorValue ho_propagator(const OscillatorSpec& spec, const DriveForce& drive, double t,
                              double x_f, double x_i) {
    require(t > 0.0, errc::precondition, "ho_propagator: t must be positive");
    const double hbar = spec.constants.hbar;
    if (spec.omega == 0.0 && drive.empty())
        return free_propagator(spec.mass, t, x_f, x_i, spec.constants);
    check_conjugate(spec.omega, t);
    const double wt = spec.omega * t;
    const int n = static_cast<int>(std::floor(wt / pi));
    const double S = ho_classical_action(spec, drive, t, x_f, x_i);
    const double pref = std::sqrt(spec.mass * spec.omega /
                                  (2.0 * pi * hbar * std::abs(std::sin(wt))));
    const complex phase = std::exp(I * (S / hbar) - I * (pi / 4.0 + n * pi / 2.0));
    return {pref * phase, n, Route::closed_form};
}

complex ho_propagator_ct(const OscillatorSpec& spec, complex t, double x_f, double x_i) {
    const double hbar = spec.constants.hbar;
    const double m = spec.mass;
    const double w = spec.omega;
    if (w == 0.0) return free_propagator_ct(m, t, x_f, x_i, spec.constants);
    const complex wt = w * t;
    const complex st = std::sin(wt);
    const int n = static_cast<int>(std::floor(wt.real() / pi));
    // branch-tracked (i sin wt)^{-1/2}: fold the Morse winding out so the
    // principal square root applies within each band
    const double band_sign = (n % 2 == 0) ? 1.0 : -1.0;
    const complex wfold = band_sign * st;
    const complex S = m * w / (2.0 * st) * ((x_i * x_i + x_f * x_f) * std::cos(wt) -
                                            2.0 * x_i * x_f);
    const complex pref = std::sqrt(m * w / (2.0 * pi * hbar) / wfold) *
                         std::exp(-I * (pi / 4.0 + n * pi / 2.0));
    return pref * std::exp(I * S / hbar);
}

ConjugatePointLimit ho_conjugate_limit(const OscillatorSpec& spec, int k) {
    (void)spec;
    require(k >= 1, errc::precondition, "ho_conjugate_limit: k must be >= 1");
    const int parity = (k % 2 == 0) ? 1 : -1;
    const complex pref = std::exp(-I * (k * pi / 2.0));
    return {parity, pref};
}

PropagatorValue ring_propagator_winding(const RingSpec& spec, double t, double phi_f,
                                        double phi_i, int n_max, double epsilon) {
    require(t > 0.0, errc::precondition, "ring_propagator_winding: t must be positive");
    require(epsilon >= 0.0, errc::precondition, "ring_propagator_winding: epsilon >= 0");
    const complex tc{t, -epsilon};
    const double dphi = phi_f - phi_i;
    const double R = spec.radius;
    complex sum = 0.0;
    double last = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        const double arc = R * (dphi - 2.0 * pi * n);
        const complex term = R * free_propagator_ct(spec.mass, tc, arc, 0.0, spec.constants);
        sum += term;
        if (std::abs(n) == n_max) last = std::max(last, std::abs(term));
    }
    if (epsilon > 0.0 && last > 1e-12 * std::abs(sum) + 1e-14)
        throw domain_error(errc::convergence_failure,
                           "ring_propagator_winding: winding sum not converged at n_max");
    return {sum, std::nullopt, Route::winding_sum};
}

PropagatorValue ring_propagator_spectral(const RingSpec& spec, double t, double phi_f,
                                         double phi_i, int l_max, double epsilon) {
    require(t > 0.0, errc::precondition, "ring_propagator_spectral: t must be positive");
    require(epsilon >= 0.0, errc::precondition, "ring_propagator_spectral: epsilon >= 0");
    const double hbar = spec.constants.hbar;
    const complex tc{t, -epsilon};
    const double dphi = phi_f - phi_i;
    const double mR2 = spec.mass * spec.radius * spec.radius;
    complex sum = 0.0;
    double last = 0.0;
    for (int l = -l_max; l <= l_max; ++l) {
        const complex term =
            std::exp(I * (l * dphi) - I * hbar * double(l) * double(l) * tc / (2.0 * mR2)) /
            (2.0 * pi);
        sum += term;
        if (std::abs(l) == l_max) last = std::max(last, std::abs(term));
    }
    if (epsilon > 0.0 && last > 1e-12 * std::abs(sum) + 1e-14)
        throw domain_error(errc::convergence_failure,
                           "ring_propagator_spectral: spectral sum not converged at l_max");
    return {sum, std::nullopt, Route::spectral_sum};
}

PropagatorValue wall_propagator(double mass, double t, double x_f, double x_i,
                                const GlobalConstants& gc) {
    require(t > 0.0, errc::precondition, "wall_propagator: t must be positive");
    require(x_f > 0.0 && x_i > 0.0, errc::precondition,
            "wall_propagator: coordinates must be positive (wall at x = 0)");
    const complex k = free_propagator_ct(mass, t, x_f, x_i, gc) -
                      free_propagator_ct(mass, t, -x_f, x_i, gc);
    return {k, std::nullopt, Route::image_sum};
}

PropagatorValue box_propagator_images(const BoxSpec& spec, double t, double x_f,
                                      double x_i, int n_max, double epsilon) {
    require(t > 0.0, errc::precondition, "box_propagator_images: t must be positive");
    require(x_f >= 0.0 && x_f <= spec.length && x_i >= 0.0 && x_i <= spec.length,
            errc::precondition, "box_propagator_images: endpoints must lie in [0, L]");
    const complex tc{t, -epsilon};
    const double L = spec.length;
    complex sum = 0.0;
    double last = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        const complex even = free_propagator_ct(spec.mass, tc, 2.0 * n * L + x_f, x_i,
                                                spec.constants);
        const complex odd = free_propagator_ct(spec.mass, tc, 2.0 * n * L - x_f, x_i,
                                               spec.constants);
        sum += even - odd;
        if (std::abs(n) == n_max) last = std::max(last, std::abs(even) + std::abs(odd));
    }
    if (epsilon > 0.0 && last > 1e-12 * std::abs(sum) + 1e-14)
        throw domain_error(errc::convergence_failure,
                           "box_propagator_images: image sum not converged at n_max");
    return {sum, std::nullopt, Route::image_sum};
}

double box_eigenenergy(const BoxSpec& spec, int j) {
    require(j >= 1, errc::precondition, "box_eigenenergy: j must be >= 1");
    const double hbar = spec.constants.hbar;
    return hbar * hbar * pi * pi * j * j / (2.0 * spec.mass * spec.length * spec.length);
}

PropagatorValue box_propagator_spectral(const BoxSpec& spec, double t, double x_f,
                                        double x_i, int j_max, double epsilon) {
    require(t > 0.0, errc::precondition, "box_propagator_spectral: t must be positive");
    require(x_f >= 0.0 && x_f <= spec.length && x_i >= 0.0 && x_i <= spec.length,
            errc::precondition, "box_propagator_spectral: endpoints must lie in [0, L]");
    const double hbar = spec.constants.hbar;
    const complex tc{t, -epsilon};
    const double L = spec.length;
    complex sum = 0.0;
    double last = 0.0;
    for (int j = 1; j <= j_max; ++j) {
        const complex term = 2.0 / L * std::exp(-I * box_eigenenergy(spec, j) * tc / hbar) *
                             std::sin(pi * j * x_f / L) * std::sin(pi * j * x_i / L);
        sum += term;
        if (j == j_max) last = std::abs(term);
    }
    if (epsilon > 0.0 && last > 1e-12 * std::abs(sum) + 1e-14)
        throw domain_error(errc::convergence_failure,
                           "box_propagator_spectral: spectral sum not converged at j_max");
    return {sum, std::nullopt, Route::spectral_sum};
}

double mixed_action_derivative(const ActionFn& action, double t, double x_f, double x_i,
                               double fd_step) {
    const double h = fd_step;
    const double spp = action(x_f + h, t, x_i + h);
    const double spm = action(x_f + h, t, x_i - h);
    const double smp = action(x_f - h, t, x_i + h);
    const double smm = action(x_f - h, t, x_i - h);
    return -(spp - spm - smp + smm) / (4.0 * h * h);
}

PropagatorValue vanvleck_propagator(const ActionFn& action, double t, double x_f,
                                    double x_i, const VanVleckOptions& opt,
                                    const GlobalConstants& gc) {
    require(t > 0.0, errc::precondition, "vanvleck_propagator: t must be positive");
    const double scale = std::max({1.0, std::abs(x_f), std::abs(x_i)});
    const double h = opt.fd_step > 0.0
                         ? opt.fd_step
                         : std::cbrt(std::numeric_limits<double>::epsilon()) * scale;

    const double D = mixed_action_derivative(action, t, x_f, x_i, h);
    if (std::abs(D) < 1e4 * std::numeric_limits<double>::epsilon() / (h * h))
        throw domain_error(errc::conjugate_point,
                           "vanvleck_propagator: mixed action derivative vanishes "
                           "(conjugate point)");

    // Morse index: sign changes of the mixed derivative on a sweep from t0 to t
    int morse = 0;
    double prev = mixed_action_derivative(action, opt.sweep_t0, x_f, x_i, h);
    for (int k = 1; k <= opt.morse_sweep_steps; ++k) {
        const double tk = opt.sweep_t0 + (t - opt.sweep_t0) * k / opt.morse_sweep_steps;
        const double cur = mixed_action_derivative(action, tk, x_f, x_i, h);
        if (prev != 0.0 && cur != 0.0 && std::signbit(cur) != std::signbit(prev)) ++morse;
        prev = cur;
    }

    const double S = action(x_f, t, x_i);
    const double pref = std::sqrt(std::abs(D) / (2.0 * pi * gc.hbar));
    const complex phase = std::exp(I * S / gc.hbar - I * (pi / 4.0 + morse * pi / 2.0));
    return {pref * phase, morse, Route::closed_form};
}

} // namespace dissipath::propagators
