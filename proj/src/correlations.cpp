#include "dissipath/correlations.hpp"

#include <cmath>

namespace dissipath::correlations {

namespace {

const complex I{0.0, 1.0};

double coth_stable(double x) {
    if (std::abs(x) < 1e-8) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

struct Params {
    double m, w0, g, hbar;
    double wbar() const { return std::sqrt(w0 * w0 - 0.25 * g * g); }
    // gamma w / ((w^2-w0^2)^2 + gamma^2 w^2)
    double glor(double w) const {
        const double d = w * w - w0 * w0;
        return g * w / (d * d + g * g * w * w);
    }
};

Params params(const DampedOscillator& dosc) {
    return {dosc.spec.mass, dosc.spec.omega, dosc.environment.gamma,
            dosc.spec.constants.hbar};
}

std::vector<double> peak_breaks(const Params& p) {
    const double wb = p.wbar();
    std::vector<double> brk;
    for (double x : {wb - 3.0 * p.g, wb - 0.5 * p.g, wb + 0.5 * p.g, wb + 3.0 * p.g})
        if (x > 0.0) brk.push_back(x);
    return brk;
}

int chunk_count(const Params& p, double t) {
    return std::max(64, static_cast<int>(std::ceil(p.wbar() * t / pi)) + 48);
}

// int_0^inf f(w) cos/sin(w t) dw with the Lorentzian peak split out
double lor_osc(const Params& p, const quad::Fn& f, double t, quad::Trig trig) {
    const auto r = quad::oscillatory_halfline(f, t, trig, 0.0, chunk_count(p, t),
                                              peak_breaks(p));
    if (!r.converged)
        throw domain_error(errc::convergence_failure,
                           "correlation quadrature: oscillatory tail did not converge");
    return r.value;
}

// non-oscillatory evaluation for t = 0
double lor_static(const Params& p, const quad::Fn& f) {
    const double wb = p.wbar();
    auto brk = peak_breaks(p);
    return quad::gk_adaptive(f, 0.0, 10.0 * (wb + p.w0), brk,
                             quad::Config{.abs_tol = 1e-13, .rel_tol = 1e-12}) +
           quad::de_halfline(f, 10.0 * (wb + p.w0), 1e-13);
}

} // namespace

OscillatorPoles oscillator_poles(const DampedOscillator& dosc) {
    const auto p = params(dosc);
    require(p.g < 2.0 * p.w0, errc::unsupported_regime,
            "oscillator_poles: overdamped regime (gamma >= 2 omega0) has no real "
            "oscillation frequency");
    return {p.wbar(), 0.5 * p.g};
}

Susceptibility chi(const DampedOscillator& dosc, double omega) {
    const auto p = params(dosc);
    const complex den{p.w0 * p.w0 - omega * omega, -p.g * omega};
    return {omega, 1.0 / (p.m * den)};
}

double c_tilde(const DampedOscillator& dosc, const ThermalState& thermal, double omega) {
    require(thermal.beta > 0.0, errc::precondition, "c_tilde: beta must be positive");
    const auto p = params(dosc);
    const double hb = thermal.hbar_beta();
    if (std::abs(omega) < 1e-12 * p.w0) {
        // removable limit: chi''(w) ~ gamma w/(m w0^4), bose factor ~ 1/(hb w)
        return 2.0 * p.g / (thermal.beta * p.m * std::pow(p.w0, 4));
    }
    const double chipp = chi(dosc, omega).value.imag();
    return 2.0 * p.hbar * chipp / (-std::expm1(-hb * omega));
}

namespace {

// Sum_{n>L} e^{2 pi i n x} [1/(n+dm) - 1/(n+dp)] =
//   int_0^1 (s^dm - s^dp) s^L e^{2 pi i(L+1)x} / (1 - s e^{2 pi i x}) ds
complex lerch_pair_tail(double x, complex dm, complex dp, int L) {
    const double phi = 2.0 * pi * x;
    const complex eiphi{std::cos(phi), std::sin(phi)};
    const complex top = std::pow(eiphi, L + 1);
    auto fre = [&](double s) {
        const complex num = (std::pow(complex(s, 0.0), dm) - std::pow(complex(s, 0.0), dp)) *
                            std::pow(s, L) * top;
        return (num / (1.0 - s * eiphi));
    };
    auto fr = [&](double s) { return fre(s).real(); };
    auto fi = [&](double s) { return fre(s).imag(); };
    return {quad::de_finite(fr, 0.0, 1.0, 1e-13), quad::de_finite(fi, 0.0, 1.0, 1e-13)};
}

} // namespace

double c_imaginary_time(const DampedOscillator& dosc, const ThermalState& thermal,
                        double tau, const SeriesConfig& series) {
    const auto p = params(dosc);
    const double hb = thermal.hbar_beta();
    require(tau >= 0.0 && tau <= hb, errc::precondition,
            "c_imaginary_time: tau must lie in [0, hbar beta]");
    const double a = 2.0 * pi / hb;
    const double x = tau / hb;

    // partial fractions over the complex pole pair lambda_pm = gamma/2 -+ i wbar
    const complex lp{0.5 * p.g, p.wbar()};
    const complex lm = std::conj(lp);
    const complex dp = lp / a, dm = lm / a;

    const int L = std::min(series.n_max, 96);
    double direct = 0.0;
    for (int n = 1; n <= L; ++n) {
        const double nu = a * n;
        direct += 2.0 * std::cos(2.0 * pi * n * x) / (nu * nu + p.g * nu + p.w0 * p.w0);
    }
    complex tail = 0.0;
    if (series.tail_policy == SeriesConfig::TailPolicy::log_tail) {
        // sum cos(.) f(n) = (1/2)[sum e^{+} f + sum e^{-} f]
        const complex tp = lerch_pair_tail(x, dm, dp, L);
        const complex tm = lerch_pair_tail(-x, dm, dp, L);
        tail = (tp + tm) * 0.5 / (lp - lm) / a * 2.0;
    }
    const double total = 1.0 / (p.w0 * p.w0) + direct + tail.real();
    return total / (p.m * thermal.beta);
}

complex c_real_time(const DampedOscillator& dosc, const ThermalState& thermal, double t,
                    const quad::Config&) {
    const auto p = params(dosc);
    require(thermal.beta > 0.0, errc::precondition, "c_real_time: beta must be positive");
    const double hb = thermal.hbar_beta();
    auto fth = [&](double w) { return p.glor(w) * coth_stable(0.5 * hb * w); };
    auto fg = [&](double w) { return p.glor(w); };
    const double ta = std::abs(t);
    double re, im;
    if (ta == 0.0) {
        re = lor_static(p, fth);
        im = 0.0;
    } else {
        re = lor_osc(p, fth, ta, quad::Trig::cosine);
        im = -lor_osc(p, fg, ta, quad::Trig::sine);
        if (t < 0.0) im = -im;
    }
    return p.hbar / (p.m * pi) * complex{re, im};
}

complex c_real_time_t0(const DampedOscillator& dosc, double t, const quad::Config&) {
    const auto p = params(dosc);
    auto fg = [&](double w) { return p.glor(w); };
    const double ta = std::abs(t);
    double re, im;
    if (ta == 0.0) {
        re = lor_static(p, fg);
        im = 0.0;
    } else {
        re = lor_osc(p, fg, ta, quad::Trig::cosine);
        im = -lor_osc(p, fg, ta, quad::Trig::sine);
        if (t < 0.0) im = -im;
    }
    return p.hbar / (p.m * pi) * complex{re, im};
}

double s_symmetric(const DampedOscillator& dosc, const ThermalState& thermal, double t,
                   const quad::Config&) {
    const auto p = params(dosc);
    require(thermal.beta > 0.0, errc::precondition, "s_symmetric: beta must be positive");
    const double hb = thermal.hbar_beta();
    auto f = [&](double w) { return p.glor(w) * coth_stable(0.5 * hb * w); };
    const double ta = std::abs(t);
    const double v = ta == 0.0 ? lor_static(p, f) : lor_osc(p, f, ta, quad::Trig::cosine);
    return p.hbar / (p.m * pi) * v;
}

double s_symmetric_t0(const DampedOscillator& dosc, double t, const quad::Config&) {
    const auto p = params(dosc);
    auto f = [&](double w) { return p.glor(w); };
    const double ta = std::abs(t);
    const double v = ta == 0.0 ? lor_static(p, f) : lor_osc(p, f, ta, quad::Trig::cosine);
    return p.hbar / (p.m * pi) * v;
}

double a_antisymmetric(const DampedOscillator& dosc, double t, const quad::Config&) {
    if (t == 0.0) return 0.0;
    const auto p = params(dosc);
    auto f = [&](double w) { return p.glor(w); };
    const double v = lor_osc(p, f, std::abs(t), quad::Trig::sine);
    return -p.hbar / (p.m * pi) * v * (t > 0.0 ? 1.0 : -1.0);
}

double s_pole_sum(const DampedOscillator& dosc, const ThermalState& thermal, double t,
                  const SeriesConfig& series) {
    const auto p = params(dosc);
    const auto poles = oscillator_poles(dosc);
    const double wb = poles.omega_bar;
    const double hb = thermal.hbar_beta();
    const double ta = std::abs(t);

    // oscillatory line, written so large hbar beta omega_bar cannot overflow:
    // [sinh(B) cos + sin(G2) sin] / [cosh(B) - cos(G2)], B = hb wbar, G2 = hb g/2
    const double B = hb * wb;
    const double G2 = 0.5 * hb * p.g;
    const double e = std::exp(-B);
    const double num = 0.5 * std::cos(wb * ta) * (1.0 - e * e) +
                       std::sin(G2) * std::sin(wb * ta) * e;
    const double den = 0.5 * (1.0 + e * e) - std::cos(G2) * e;
    double s = p.hbar / (2.0 * p.m * wb) * std::exp(-0.5 * p.g * ta) * num / den;

    // Matsubara line
    double line = 0.0;
    const int cap = std::max(series.n_max, 64);
    for (int n = 1; n <= cap; ++n) {
        const double nu = thermal.nu(n);
        const double d2 = (nu * nu + p.w0 * p.w0);
        const double den_n = d2 * d2 - p.g * p.g * nu * nu;
        if (den_n < 1e-10 * d2 * d2)
            throw domain_error(errc::convergence_failure,
                               "s_pole_sum: near-degenerate Matsubara denominator");
        const double term = nu * std::exp(-nu * ta) / den_n;
        line += term;
        if (n > 8 && term < series.tolerance * 1e-4 * (std::abs(line) + 1e-300)) break;
    }
    return s - 2.0 * p.g / (p.m * thermal.beta) * line;
}

double s_zero_temperature_branch(const DampedOscillator& dosc, double t) {
    const auto p = params(dosc);
    const double ta = std::abs(t);
    require(ta > 0.0, errc::precondition, "s_zero_temperature_branch: t must be nonzero");
    auto f = [&](double nu) {
        const double d2 = nu * nu + p.w0 * p.w0;
        return nu * std::exp(-nu * ta) / (d2 * d2 - p.g * p.g * nu * nu);
    };
    const double v = quad::de_halfline(f, 0.0, 1e-13);
    return -p.hbar * p.g / (pi * p.m) * v;
}

double s_t0_pole_limit(const DampedOscillator& dosc, double t) {
    const auto p = params(dosc);
    const auto poles = oscillator_poles(dosc);
    const double ta = std::abs(t);
    const double osc = p.hbar / (2.0 * p.m * poles.omega_bar) *
                       std::exp(-0.5 * p.g * ta) * std::cos(poles.omega_bar * ta);
    return osc + s_zero_temperature_branch(dosc, t);
}

double s_zero_temperature_tail(const DampedOscillator& dosc, double t) {
    const auto p = params(dosc);
    return -p.hbar * p.g / (pi * p.m * std::pow(p.w0, 4) * t * t);
}

namespace {

double rwa_integral(const Params& p, double wb, double t, double coth_scale_hb) {
    // int_0^inf K(w) cos(w t) [L_-(w) - L_+(w)] dw with K = coth(hb w/2) or 1
    auto lor = [&](double w, double center) {
        const double d = w - center;
        return 1.0 / (d * d + 0.25 * p.g * p.g);
    };
    auto f = [&](double w) {
        const double K = coth_scale_hb > 0.0 ? coth_stable(0.5 * coth_scale_hb * w) : 1.0;
        return K * (lor(w, wb) - lor(w, -wb));
    };
    if (t == 0.0) return lor_static(p, f);
    return lor_osc(p, f, std::abs(t), quad::Trig::cosine);
}

} // namespace

double s_rwa(const DampedOscillator& dosc, const ThermalState& thermal, double t,
             const quad::Config&) {
    const auto p = params(dosc);
    const auto poles = oscillator_poles(dosc);
    const double v = rwa_integral(p, poles.omega_bar, t, thermal.hbar_beta());
    return p.hbar * p.g / (8.0 * pi * p.m * poles.omega_bar) * v;
}

double s_rwa_t0(const DampedOscillator& dosc, double t, const quad::Config&) {
    const auto p = params(dosc);
    const auto poles = oscillator_poles(dosc);
    const double v = rwa_integral(p, poles.omega_bar, t, 0.0);
    return p.hbar * p.g / (8.0 * pi * p.m * poles.omega_bar) * v;
}

double s_rwa_markov(const DampedOscillator& dosc, double t) {
    const auto p = params(dosc);
    const auto poles = oscillator_poles(dosc);
    return p.hbar / (4.0 * p.m * poles.omega_bar) * std::cos(poles.omega_bar * t) *
           std::exp(-0.5 * p.g * std::abs(t));
}

double s_rwa_markov(const DampedOscillator& dosc, const ThermalState& thermal, double t) {
    const auto poles = oscillator_poles(dosc);
    return s_rwa_markov(dosc, t) *
           coth_stable(0.5 * thermal.hbar_beta() * poles.omega_bar);
}

MarkovDiscrepancy markov_discrepancy(const DampedOscillator& dosc, double t,
                                     const quad::Config&) {
    const auto p = params(dosc);
    const auto poles = oscillator_poles(dosc);
    const double wb = poles.omega_bar;
    auto f = [&](double w) {
        const double d = w + wb;
        return 1.0 / (d * d + 0.25 * p.g * p.g);
    };
    const auto r = quad::oscillatory_halfline(f, std::abs(t), quad::Trig::cosine, 0.0, 64);
    if (!r.converged)
        throw domain_error(errc::convergence_failure,
                           "markov_discrepancy: quadrature did not converge");
    MarkovDiscrepancy out;
    out.value = -p.hbar * p.g / (4.0 * pi * p.m * wb) * r.value;
    out.asymptote_omega0 = -p.hbar * p.g / (2.0 * pi * p.m * std::pow(p.w0, 4) * t * t);
    out.asymptote_omega_bar = -p.hbar * p.g / (2.0 * pi * p.m * std::pow(wb, 4) * t * t);
    return out;
}

} // namespace dissipath::correlations
