#include "dissipath/bath.hpp"

#include <cmath>

namespace dissipath::bath {

double j_value(const SpectralDensity& sd, double omega) {
    require(omega >= 0.0, errc::precondition, "j_value: omega must be non-negative");
    switch (sd.kind) {
        case SpectralKind::ohmic:
            return sd.mass * sd.gamma * omega;
        case SpectralKind::drude:
            return sd.mass * sd.gamma * omega * sd.omega_d * sd.omega_d /
                   (omega * omega + sd.omega_d * sd.omega_d);
    }
    return 0.0;
}

double damping_kernel_laplace(const SpectralDensity& sd, double z) {
    require(z >= 0.0, errc::precondition, "damping_kernel_laplace: z must be >= 0");
    if (sd.kind == SpectralKind::ohmic) return sd.gamma;
    return sd.gamma * sd.omega_d / (sd.omega_d + z);
}

TimeKernelValue damping_kernel_time(const SpectralDensity& sd, double t) {
    if (sd.kind == SpectralKind::ohmic) return {true, 0.0, 2.0 * sd.gamma};
    return {false, sd.gamma * sd.omega_d * std::exp(-sd.omega_d * std::abs(t)), 0.0};
}

KernelSample noise_correlation(const SpectralDensity& sd, const ThermalState& thermal,
                               double t, const NoiseQuadrature& nq) {
    require(thermal.beta > 0.0, errc::precondition, "noise_correlation: beta must be positive");
    const double hbar = thermal.constants.hbar;
    const double hb = thermal.hbar_beta();

    double cap = nq.omega_cap;
    if (sd.kind == SpectralKind::ohmic) {
        if (cap <= 0.0)
            throw domain_error(errc::divergence,
                               "noise_correlation: strictly ohmic J needs a Drude cutoff "
                               "or an explicit frequency cap");
    }

    auto jfun = [&](double w) { return j_value(sd, w); };
    // coth(x) - 1 decays like 2 e^{-2x}; split the thermal part (absolutely
    // convergent) from the T-independent part (conditionally convergent).
    auto thermal_part = [&](double w) {
        const double x = 0.5 * hb * w;
        const double cm1 = x > 19.0 ? 0.0 : 2.0 / std::expm1(2.0 * x);
        return jfun(w) * cm1;
    };

    double re, im;
    if (t == 0.0) {
        if (cap <= 0.0)
            throw domain_error(errc::divergence,
                               "noise_correlation: K(0) is ultraviolet-divergent; "
                               "evaluate at t != 0 or supply a frequency cap");
        auto f = [&](double w) {
            const double x = 0.5 * hb * w;
            return jfun(w) * (x < 1e-8 ? 1.0 / x : 1.0 / std::tanh(x));
        };
        re = quad::gk_adaptive(f, 0.0, cap, {1.0 / hb, sd.omega_d > 0 ? sd.omega_d : 0.5 * cap},
                               nq.cfg);
        im = 0.0;
    } else {
        const double ta = std::abs(t);
        std::vector<double> brk;
        if (sd.kind == SpectralKind::drude) brk.push_back(sd.omega_d);
        brk.push_back(2.0 / hb);
        if (cap > 0.0) {
            auto fre = [&](double w) {
                const double x = 0.5 * hb * w;
                return jfun(w) * (x < 1e-8 ? 1.0 / x : 1.0 / std::tanh(x)) * std::cos(w * ta);
            };
            auto fim = [&](double w) { return jfun(w) * std::sin(w * ta); };
            re = quad::gk_adaptive(fre, 0.0, cap, brk, nq.cfg);
            im = -quad::gk_adaptive(fim, 0.0, cap, brk, nq.cfg);
        } else {
            // thermal part decays exponentially; T-independent part handled by
            // half-period chunking with Euler acceleration.
            auto fth = [&](double w) { return thermal_part(w); };
            const double re_th = quad::oscillatory_halfline(fth, ta, quad::Trig::cosine, 0.0,
                                                            16, brk)
                                     .value;
            auto fj = [&](double w) { return jfun(w); };
            const auto rc = quad::oscillatory_halfline(fj, ta, quad::Trig::cosine, 0.0,
                                                       nq.min_chunks, brk);
            const auto rs = quad::oscillatory_halfline(fj, ta, quad::Trig::sine, 0.0,
                                                       nq.min_chunks, brk);
            if (!rc.converged || !rs.converged)
                throw domain_error(errc::convergence_failure,
                                   "noise_correlation: oscillatory quadrature did not converge");
            re = re_th + rc.value;
            im = -rs.value;
        }
        if (t < 0.0) im = -im; // Im K odd in t
    }
    return {t, hbar / pi * complex{re, im}, KernelConvention::with_hbar};
}

KernelSample noise_real_ohmic_closed_form(double gamma, double mass,
                                          const ThermalState& thermal, double t) {
    require(t != 0.0, errc::precondition, "noise_real_ohmic_closed_form: t = 0 is singular");
    const double hb = thermal.hbar_beta();
    const double s = std::sinh(pi * t / hb);
    const double v = -pi * mass * gamma / (hb * hb) / (s * s);
    return {t, complex{v, 0.0}, KernelConvention::per_hbar};
}

namespace {

// T_{>L}(x, d) = sum_{l>L} cos(2 pi l x)/(l + d)
//             = Re int_0^1 s^{L+d} e^{2 pi i (L+1) x} / (1 - s e^{2 pi i x}) ds
double lerch_cos_tail(double x, double d, int L) {
    const double phi = 2.0 * pi * x;
    const complex eiphi{std::cos(phi), std::sin(phi)};
    const complex top = std::pow(eiphi, L + 1);
    auto f = [&](double s) {
        const complex num = std::pow(s, L + d) * top;
        return (num / (1.0 - s * eiphi)).real();
    };
    return quad::de_finite(f, 0.0, 1.0, 1e-13);
}

} // namespace

double matsubara_kernel(const SpectralDensity& sd, const ThermalState& thermal,
                        double tau, const SeriesConfig& series) {
    const double hb = thermal.hbar_beta();
    require(tau > 0.0 && tau < hb, errc::precondition,
            "matsubara_kernel: tau must lie strictly inside (0, hbar*beta)");
    const double m = sd.mass;
    const double x = tau / hb;
    const double s = std::sin(pi * x);

    if (sd.kind == SpectralKind::ohmic) {
        // Abel-regularized sum: (2 m gamma / hb)(2 pi / hb) sum l cos(2 pi l x)
        //  = -pi m gamma / hb^2 / sin^2(pi x)
        return -pi * m * sd.gamma / (hb * hb) / (s * s);
    }

    // Drude: nu ghat(nu) = gamma wD l/(l+d), d = wD hb / (2 pi).
    const double d = sd.omega_d * hb / (2.0 * pi);
    const int L = std::min<int>(series.n_max, 256);
    double partial = 0.0;
    for (int l = 1; l <= L; ++l)
        partial += std::cos(2.0 * pi * l * x) * (double(l) / (double(l) + d));
    // sum_{l>L} cos(2 pi l x) = -1/2 - C_L(x) with
    // C_L(x) = sin((2L+1) pi x)/(2 sin(pi x)) - 1/2.
    double tail;
    if (series.tail_policy == SeriesConfig::TailPolicy::none) {
        tail = 0.0;
    } else {
        const double cos_rest = -std::sin((2 * L + 1) * pi * x) / (2.0 * s);
        tail = cos_rest - d * lerch_cos_tail(x, d, L);
    }
    return (2.0 * m * sd.gamma * sd.omega_d / hb) * (partial + tail);
}

double single_oscillator_kernel(const BathOscillator& osc, const ThermalState& thermal,
                                double tau) {
    const double hb = thermal.hbar_beta();
    require(tau >= 0.0 && tau <= hb, errc::precondition,
            "single_oscillator_kernel: tau outside [0, hbar*beta]");
    const double w = osc.omega;
    const double a = 0.5 * hb * w;
    // cosh(w(hb/2-tau))/sinh(hb w/2), computed stably for large a
    const double u = w * (0.5 * hb - tau);
    double ratio;
    if (a > 30.0) {
        ratio = std::exp(std::abs(u) - a) * (1.0 + std::exp(-2.0 * std::abs(u))) /
                (1.0 - std::exp(-2.0 * a));
    } else {
        ratio = std::cosh(u) / std::sinh(a);
    }
    return osc.coupling * osc.coupling / (2.0 * osc.mass * w) * ratio;
}

double potential_renormalization(const SpectralDensity& sd) {
    if (sd.kind == SpectralKind::ohmic)
        throw domain_error(errc::divergence,
                           "potential_renormalization: infinite for strictly ohmic damping");
    return 0.5 * sd.mass * sd.gamma * sd.omega_d;
}

MassResult bath_total_mass(const SpectralDensity& sd) {
    // J ~ omega at small omega for both families (alpha = 1 <= 2): the
    // integral (2/pi) int dw J/w^3 diverges at the infrared end regardless of
    // any high-frequency cutoff.
    (void)sd;
    return {true, 0.0};
}

double total_mass_from_j(const std::function<double(double)>& j, double omega_max) {
    auto f = [&](double w) { return j(w) / (w * w * w); };
    // keep clear of the 0/0 ambiguity of tabulated integrands at the origin
    return 2.0 / pi * quad::de_finite(f, 1e-9 * omega_max, omega_max, 1e-12);
}

DiscreteBath discretize_bath(const SpectralDensity& sd, int count, double omega_max) {
    require(count >= 1, errc::precondition, "discretize_bath: count must be >= 1");
    require(omega_max > 0.0, errc::precondition, "discretize_bath: omega_max must be > 0");
    DiscreteBath db;
    db.oscillators.reserve(count);
    const double dw = omega_max / count;
    for (int n = 0; n < count; ++n) {
        const double wn = (n + 0.5) * dw;
        // oscillator strength c_n^2/(2 m_n w_n) = (1/pi) int_bin J(w) dw
        const double strength =
            quad::gk_adaptive([&](double w) { return j_value(sd, w); }, n * dw,
                              (n + 1) * dw, quad::Config{.abs_tol = 1e-14, .rel_tol = 1e-12}) /
            pi;
        const double mn = 2.0 * strength / (wn * wn * wn);
        db.oscillators.push_back({mn, wn, mn * wn * wn});
    }
    return db;
}

double discrete_damping_kernel(const DiscreteBath& db, double system_mass, double t) {
    double s = 0.0;
    for (const auto& o : db.oscillators)
        s += o.coupling * o.coupling / (o.mass * o.omega * o.omega) * std::cos(o.omega * t);
    return s / system_mass;
}

double discrete_kernel_sum(const DiscreteBath& db, const ThermalState& thermal, double tau) {
    double s = 0.0;
    for (const auto& o : db.oscillators) s += single_oscillator_kernel(o, thermal, tau);
    return s;
}

double continuum_kernel_quadrature(const SpectralDensity& sd, const ThermalState& thermal,
                                   double tau) {
    const double hb = thermal.hbar_beta();
    require(tau > 0.0 && tau < hb, errc::precondition,
            "continuum_kernel_quadrature: tau inside (0, hbar*beta)");
    auto f = [&](double w) {
        const double a = 0.5 * hb * w;
        const double u = w * (0.5 * hb - tau);
        double ratio;
        if (a > 30.0) {
            ratio = std::exp(std::abs(u) - a) * (1.0 + std::exp(-2.0 * std::abs(u))) /
                    (1.0 - std::exp(-2.0 * a));
        } else {
            ratio = std::cosh(u) / std::sinh(a);
        }
        return j_value(sd, w) * ratio;
    };
    const double brk = sd.kind == SpectralKind::drude ? sd.omega_d : 1.0 / hb;
    return (quad::gk_adaptive(f, 0.0, brk, quad::Config{.abs_tol = 1e-13, .rel_tol = 1e-12}) +
            quad::de_halfline(f, brk, 1e-12)) /
           pi;
}

} // namespace dissipath::bath
