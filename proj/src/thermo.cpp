#include "dissipath/thermo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>

namespace dissipath::thermo {

namespace {

const complex I{0.0, 1.0};

complex clog1p(complex z) {
    const complex w = 1.0 + z;
    if (w == complex{1.0, 0.0}) return z;
    return std::log(w) * (z / (w - 1.0));
}

constexpr int kTailOrder = 12;

// Coefficients c_k of ln f(u) = ln(1 + ghat(1/u)u + omega0^2 u^2), u = b/n.
std::vector<double> lnf_series_coeffs(double omega0, double gamma, double omega_d) {
    std::vector<double> g(kTailOrder + 1, 0.0);
    g[2] = omega0 * omega0 + gamma * omega_d;
    double p = 1.0;
    for (int i = 1; 2 + i <= kTailOrder; ++i) {
        p *= -omega_d;
        g[2 + i] = gamma * omega_d * p;
    }
    return quad::log1p_series(g);
}

std::vector<double> lnf_series_coeffs_undamped(double omega) {
    std::vector<double> g(kTailOrder + 1, 0.0);
    g[2] = omega * omega;
    return quad::log1p_series(g);
}

complex tail_from_series(const std::vector<double>& c, complex b, double N) {
    complex tail = 0.0;
    complex bk = b; // b^k, starting at k = 2 below
    for (int k = 2; k <= kTailOrder; ++k) {
        bk *= b;
        if (c[k] == 0.0) continue;
        tail -= c[k] * bk * quad::inverse_power_tail(k, N);
    }
    return tail;
}

double ghat_drude(double gamma, double omega_d, double nu) {
    return gamma * omega_d / (omega_d + nu);
}

struct GammaHat {
    double gamma, omega_d;
    complex operator()(complex nu) const { return gamma * omega_d / (omega_d + nu); }
    complex deriv(complex nu) const {
        const complex d = omega_d + nu;
        return -gamma * omega_d / (d * d);
    }
};

} // namespace

double z_undamped(const OscillatorSpec& spec, const ThermalState& thermal) {
    require(thermal.beta > 0.0, errc::precondition, "z_undamped: beta must be positive");
    const double x = 0.5 * thermal.hbar_beta() * spec.omega;
    if (x > 30.0) return std::exp(-x) / (1.0 - std::exp(-2.0 * x));
    return 0.5 / std::sinh(x);
}

double z_undamped_product(const OscillatorSpec& spec, const ThermalState& thermal,
                          const SeriesConfig& series) {
    const double hb = thermal.hbar_beta();
    const double w = spec.omega;
    double lnz = -std::log(hb * w);
    const int N = series.n_max;
    for (int n = 1; n <= N; ++n) {
        const double nu = 2.0 * pi * n / hb;
        lnz -= std::log1p(w * w / (nu * nu));
    }
    if (series.tail_policy == SeriesConfig::TailPolicy::log_tail) {
        const auto c = lnf_series_coeffs_undamped(w);
        lnz += tail_from_series(c, complex{hb / (2.0 * pi), 0.0}, N).real();
    }
    return std::exp(lnz);
}

complex log_z_damped_ct(const DampedOscillator& dosc, complex beta,
                        const SeriesConfig& series, int skip_factor) {
    const auto& sd = dosc.environment;
    require(sd.kind == bath::SpectralKind::drude, errc::divergence,
            "z_damped: strictly ohmic damping gives a divergent Matsubara product; "
            "a high-frequency (Drude) cutoff is required");
    const double hbar = dosc.spec.constants.hbar;
    const double w0 = dosc.spec.omega;
    const double g = sd.gamma;
    const double wd = sd.omega_d;

    const complex hb = hbar * beta;
    const complex b = hb / (2.0 * pi);
    // direct part must clear the tail-expansion radius |omega_d b / n| < 1
    int N = static_cast<int>(std::max(800.0, std::ceil(6.0 * std::abs(hb) * wd / (2.0 * pi))));
    N = std::min(N, std::max(series.n_max, 800));

    complex sum = 0.0;
    for (int n = 1; n <= N; ++n) {
        if (n == skip_factor) continue;
        const complex nu = 2.0 * pi * double(n) / hb;
        sum -= clog1p(g * wd / ((wd + nu) * nu) + w0 * w0 / (nu * nu));
    }
    if (series.tail_policy == SeriesConfig::TailPolicy::log_tail) {
        const auto c = lnf_series_coeffs(w0, g, wd);
        sum += tail_from_series(c, b, N);
    }
    return sum - std::log(hb * w0);
}

double z_damped(const DampedOscillator& dosc, const ThermalState& thermal,
                const SeriesConfig& series) {
    require(thermal.beta > 0.0, errc::precondition, "z_damped: beta must be positive");
    return std::exp(log_z_damped_ct(dosc, complex{thermal.beta, 0.0}, series).real());
}

double free_energy(const DampedOscillator& dosc, const ThermalState& thermal,
                   const SeriesConfig& series) {
    return -log_z_damped_ct(dosc, complex{thermal.beta, 0.0}, series).real() / thermal.beta;
}

namespace {

// g(nu) = ln(1 + ghat(nu)/nu + omega0^2/nu^2) and its exact derivative,
// written through the cubic P(nu) = (nu^2 + nu ghat + w0^2)(nu + wd).
struct LogIntegrand {
    double w0, g, wd;
    double operator()(double nu) const {
        return std::log1p(ghat_drude(g, wd, nu) / nu + w0 * w0 / (nu * nu));
    }
    double P(double nu) const {
        return nu * nu * nu + wd * nu * nu + (w0 * w0 + g * wd) * nu + w0 * w0 * wd;
    }
    double dP(double nu) const {
        return 3.0 * nu * nu + 2.0 * wd * nu + (w0 * w0 + g * wd);
    }
    double deriv(double nu) const {
        return dP(nu) / P(nu) - 1.0 / (nu + wd) - 2.0 / nu;
    }
};

} // namespace

double ground_state_energy(const DampedOscillator& dosc, const quad::Config& cfg) {
    const auto& sd = dosc.environment;
    require(sd.kind == bath::SpectralKind::drude, errc::divergence,
            "ground_state_energy: logarithmically UV-divergent for strictly ohmic damping");
    const double hbar = dosc.spec.constants.hbar;
    const double w0 = dosc.spec.omega;
    const LogIntegrand gi{w0, sd.gamma, sd.omega_d};

    const double L = 50.0 * sd.omega_d;
    const double head = quad::de_finite([&](double nu) { return gi(nu); }, 0.0, w0, 1e-13);
    const double mid = quad::gk_adaptive([&](double nu) { return gi(nu); }, w0, L,
                                         {sd.omega_d, 10.0 * sd.omega_d}, cfg);
    const double A = sd.gamma * sd.omega_d + w0 * w0;
    const double B = -sd.gamma * sd.omega_d * sd.omega_d;
    const double C = sd.gamma * std::pow(sd.omega_d, 3) - 0.5 * A * A;
    const double tail = A / L + B / (2.0 * L * L) + C / (3.0 * L * L * L);
    return hbar / (2.0 * pi) * (head + mid + tail);
}

LambShift lamb_shift_weak(const DampedOscillator& dosc, const quad::Config& cfg) {
    const auto& sd = dosc.environment;
    require(sd.kind == bath::SpectralKind::drude, errc::divergence,
            "lamb_shift_weak: ultraviolet-divergent for strictly ohmic damping");
    const double hbar = dosc.spec.constants.hbar;
    const double m = dosc.spec.mass;
    const double w0 = dosc.spec.omega;
    auto f = [&](double w) { return bath::j_value(sd, w) / (w0 + w); };
    const double v = quad::gk_adaptive(f, 0.0, sd.omega_d, {w0}, cfg) +
                     quad::de_halfline(f, sd.omega_d, 1e-12);
    LambShift out;
    out.value = -hbar / (2.0 * pi * m * w0) * v;
    out.renorm_term = -hbar * sd.gamma * sd.omega_d / (4.0 * w0);
    out.log_term = hbar * sd.gamma / (2.0 * pi) * std::log(sd.omega_d / w0);
    return out;
}

double level_width(const DampedOscillator& dosc, int n) {
    require(n >= 0, errc::precondition, "level_width: n must be >= 0");
    return n * bath::j_value(dosc.environment, dosc.spec.omega) /
           (dosc.spec.mass * dosc.spec.omega);
}

double ho_density_matrix(const OscillatorSpec& spec, const ThermalState& thermal,
                         double x, double x_prime) {
    require(thermal.beta > 0.0, errc::precondition, "ho_density_matrix: beta > 0");
    const double hbar = spec.constants.hbar;
    const double m = spec.mass;
    const double w = spec.omega;
    const double B = thermal.hbar_beta() * w;
    double coth, csch;
    if (B > 30.0) {
        const double e = std::exp(-B);
        coth = 1.0 + 2.0 * e * e / (1.0 - e * e);
        csch = 2.0 * e / (1.0 - e * e);
    } else {
        coth = 1.0 / std::tanh(B);
        csch = 1.0 / std::sinh(B);
    }
    const double pref = std::sqrt(m * w / (pi * hbar) * std::tanh(0.5 * B));
    const double expo =
        -m * w / (2.0 * hbar) * ((x * x + x_prime * x_prime) * coth - 2.0 * x * x_prime * csch);
    return pref * std::exp(expo);
}

RegularizedPartition regularized_partition(const DampedOscillator& dosc,
                                           const ThermalState& thermal,
                                           const SeriesConfig& series) {
    const auto& sd = dosc.environment;
    require(sd.kind == bath::SpectralKind::drude, errc::divergence,
            "regularized_partition: Drude bath required");
    const double hbar = dosc.spec.constants.hbar;
    const double w0 = dosc.spec.omega;
    const double hb = thermal.hbar_beta();
    const LogIntegrand gi{w0, sd.gamma, sd.omega_d};

    const double delta = 2.0 * pi / hb;
    // bins up past the cutoff so the Euler-Maclaurin tail applies
    const int Nb = static_cast<int>(
        std::ceil(std::max({12.0 * sd.omega_d, 40.0 * w0, 20.0 * delta}) / delta));
    double acc = -std::log(hb * w0);
    for (int n = 1; n <= Nb; ++n) {
        const double lo = (n - 1) * delta, hi = n * delta;
        double binint;
        if (n == 1)
            binint = quad::de_finite([&](double nu) { return gi(nu); }, lo, hi, 1e-13);
        else
            binint = quad::gk_adaptive([&](double nu) { return gi(nu); }, lo, hi,
                                       quad::Config{.abs_tol = 1e-14, .rel_tol = 1e-13});
        acc += binint / delta - gi(hi);
    }
    const double nuN = Nb * delta;
    acc += 0.5 * gi(nuN) + delta / 12.0 * gi.deriv(nuN);
    RegularizedPartition out;
    out.value = std::exp(acc);

    // weak-coupling digamma factorization of section-4.2 type
    const double eps0 = ground_state_energy(dosc);
    double lnwc = -std::log(hb * w0);
    const int N = std::max(series.n_max, 2000);
    for (int n = 1; n <= N; ++n) {
        const double nu = n * delta;
        lnwc -= std::log1p(w0 * w0 / (nu * nu + sd.gamma * nu));
    }
    {
        // tail of ln(1 + w0^2 u^2/(1 + gamma u)), u = b/n
        std::vector<double> g(kTailOrder + 1, 0.0);
        double p = 1.0;
        for (int i = 0; 2 + i <= kTailOrder; ++i) {
            g[2 + i] = w0 * w0 * p;
            p *= -sd.gamma;
        }
        const auto c = quad::log1p_series(g);
        lnwc += tail_from_series(c, complex{hb / (2.0 * pi), 0.0}, N).real();
    }
    lnwc -= hb * sd.gamma / (2.0 * pi) *
            boost::math::digamma(1.0 + hb * sd.omega_d / (2.0 * pi));
    out.weak_coupling_digamma = std::exp(lnwc + thermal.beta * eps0);
    return out;
}

DrudeRoots drude_denominator_roots(const DampedOscillator& dosc) {
    const auto& sd = dosc.environment;
    require(sd.kind == bath::SpectralKind::drude, errc::precondition,
            "drude_denominator_roots: Drude bath required");
    const double w0 = dosc.spec.omega;
    const LogIntegrand gi{w0, sd.gamma, sd.omega_d};
    // real root of P in (-omega_d, 0) by bisection + Newton polish
    double lo = -sd.omega_d, hi = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gi.P(mid) < 0.0 ? lo : hi) = mid;
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) r -= gi.P(r) / gi.dP(r);
    DrudeRoots out;
    out.a_real = -r;
    const double bq = sd.omega_d - out.a_real;
    const double cq = w0 * w0 * sd.omega_d / out.a_real;
    const double disc = cq - 0.25 * bq * bq;
    require(disc > 0.0, errc::unsupported_regime,
            "drude_denominator_roots: overdamped parameter regime");
    out.a_osc = complex{0.5 * bq, std::sqrt(disc)};
    return out;
}

PoleTable build_pole_table(const DampedOscillator& dosc, int n_osc, int n_real,
                           const SeriesConfig& series) {
    const double hbar = dosc.spec.constants.hbar;
    const double w0 = dosc.spec.omega;
    const auto roots = drude_denominator_roots(dosc);
    const GammaHat gh{dosc.environment.gamma, dosc.environment.omega_d};

    PoleTable table;
    table.eps0 = ground_state_energy(dosc);
    table.avg_density = 1.0 / (hbar * w0);

    SeriesConfig cfg = series;
    cfg.n_max = std::max(series.n_max, 500000);

    auto residue_at = [&](int n0, complex z) {
        const complex bp = 2.0 * pi * double(n0) / (hbar * z);
        const complex lnprod =
            log_z_damped_ct(dosc, bp, cfg, n0) + std::log(hbar * bp * w0);
        const complex dD = (2.0 * z + gh(z) + z * gh.deriv(z)) * (-z / bp);
        const complex res_z = std::exp(lnprod) * (z * z / dD) / (hbar * bp * w0);
        return std::pair{bp, res_z * std::exp(bp * table.eps0)};
    };

    table.pole.reserve(n_osc);
    table.residue.reserve(n_osc);
    const complex z_osc = -std::conj(roots.a_osc); // Im pole < 0 member
    for (int m = 1; m <= n_osc; ++m) {
        auto [p, A] = residue_at(m, z_osc);
        table.pole.push_back(p);
        table.residue.push_back(A);
    }
    // keep clear of the near-cancellation zone nu_n ~ -omega_d
    const int real_cap = std::max(
        40, static_cast<int>(0.6 * roots.a_real / (dosc.environment.omega_d - roots.a_real)));
    table.pole_real.reserve(std::min(n_real, real_cap));
    for (int m = 1; m <= std::min(n_real, real_cap); ++m) {
        auto [p, A] = residue_at(m, complex{-roots.a_real, 0.0});
        table.pole_real.push_back(p.real());
        table.residue_real.push_back(A.real());
        if (std::abs(A.real()) < 1e-18) break;
    }

    // delta weight from the large-beta behaviour Z e^{beta eps0} = w + c1/b + c2/b^2
    std::array<double, 3> bs{40.0 / (hbar * w0), 60.0 / (hbar * w0), 80.0 / (hbar * w0)};
    std::array<double, 3> fs{};
    for (int i = 0; i < 3; ++i)
        fs[i] = std::exp(log_z_damped_ct(dosc, complex{bs[i], 0.0}, cfg).real() +
                         bs[i] * table.eps0);
    // solve the 3x3 Vandermonde in 1/b
    const double x0 = 1.0 / bs[0], x1 = 1.0 / bs[1], x2 = 1.0 / bs[2];
    const double d01 = (fs[1] - fs[0]) / (x1 - x0);
    const double d12 = (fs[2] - fs[1]) / (x2 - x1);
    const double c2 = (d12 - d01) / (x2 - x0);
    const double c1 = d01 - c2 * (x0 + x1);
    table.w_delta = fs[0] - c1 * x0 - c2 * x0 * x0;
    return table;
}

double dos_pole_sum(const PoleTable& table, double u) {
    double s = table.avg_density;
    for (std::size_t i = 0; i < table.pole.size(); ++i)
        s += 2.0 * (table.residue[i] * std::exp(table.pole[i] * u)).real();
    for (std::size_t i = 0; i < table.pole_real.size(); ++i)
        s += table.residue_real[i] * std::exp(table.pole_real[i] * u);
    return s;
}

namespace {

// smooth remainder after removing the beta=0 pole, the delta weight and the
// oscillatory pole family from Z e^{beta eps0}
complex dos_remainder(const DampedOscillator& dosc, const PoleTable& table,
                      const SeriesConfig& series, complex beta) {
    complex v = std::exp(log_z_damped_ct(dosc, beta, series) + beta * table.eps0);
    v -= table.w_delta;
    v -= table.avg_density / beta;
    for (std::size_t i = 0; i < table.pole.size(); ++i) {
        v -= table.residue[i] / (beta - table.pole[i]);
        v -= std::conj(table.residue[i]) / (beta - std::conj(table.pole[i]));
    }
    return v;
}

double remainder_bromwich(const DampedOscillator& dosc, const PoleTable& table,
                          const SeriesConfig& series, double u, double escale,
                          int min_chunks) {
    // vertical line Re beta = c, half-period chunks, Euler acceleration
    const double c = std::min(2.0, 4.0 * escale / std::max(u, 0.5 * escale)) / escale;
    const double h = pi / u;
    std::vector<double> partial;
    double run = 0.0;
    const int K = min_chunks;
    static const std::array<double, 8> gx = {-0.9602898564975363, -0.7966664774136267,
                                             -0.5255324099163290, -0.1834346424956498,
                                             0.1834346424956498,  0.5255324099163290,
                                             0.7966664774136267,  0.9602898564975363};
    static const std::array<double, 8> gw = {0.1012285362903763, 0.2223810344533745,
                                             0.3137066458778873, 0.3626837833783620,
                                             0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};
    for (int k = 0; k < K; ++k) {
        double s = 0.0;
        const double mid = (k + 0.5) * h, half = 0.5 * h;
        for (int j = 0; j < 8; ++j) {
            const double y = mid + half * gx[j];
            const complex val = dos_remainder(dosc, table, series, complex{c, y}) *
                                std::exp(I * y * u);
            s += gw[j] * val.real();
        }
        run += s * half;
        partial.push_back(run);
    }
    const std::size_t win = std::min<std::size_t>(partial.size(), 24);
    const double acc = quad::euler_accelerate(
        std::vector<double>(partial.end() - win, partial.end()));
    return std::exp(c * u) / pi * acc;
}

double remainder_talbot(const DampedOscillator& dosc, const PoleTable& table,
                        const SeriesConfig& series, double u, int M) {
    // fixed Talbot contour beta(theta) = r theta (cot theta + i)
    const double r = 2.0 * M / (5.0 * u);
    double s = 0.5 * dos_remainder(dosc, table, series, complex{r, 0.0}).real() *
               std::exp(r * u);
    for (int j = 1; j < M; ++j) {
        const double th = j * pi / M;
        const double cot = std::cos(th) / std::sin(th);
        const complex beta = r * th * complex{cot, 1.0};
        if (beta.real() * u < -40.0) continue;
        const double sigma = th + (th * cot - 1.0) * cot;
        const complex val = std::exp(beta * u) *
                            dos_remainder(dosc, table, series, beta) * complex{1.0, sigma};
        s += val.real();
    }
    return s * r / M;
}

struct CubicSpline {
    std::vector<double> x, y, m;
    void build(std::vector<double> xs, std::vector<double> ys) {
        x = std::move(xs);
        y = std::move(ys);
        const std::size_t n = x.size();
        m.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            d[i] -= f * d[i - 1];
        }
        m[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
    }
    double operator()(double xi) const {
        const std::size_t n = x.size();
        if (n == 0) return 0.0;
        if (xi <= x.front()) return y.front();
        if (xi >= x.back()) return y.back();
        std::size_t k = std::upper_bound(x.begin(), x.end(), xi) - x.begin() - 1;
        const double h = x[k + 1] - x[k];
        const double A = (x[k + 1] - xi) / h, B = (xi - x[k]) / h;
        return A * y[k] + B * y[k + 1] +
               ((A * A * A - A) * m[k] + (B * B * B - B) * m[k + 1]) * h * h / 6.0;
    }
};

} // namespace

DosResult density_of_states(const DampedOscillator& dosc,
                            const std::vector<double>& energy_grid,
                            const DosOptions& options, const SeriesConfig& series) {
    require(!energy_grid.empty(), errc::precondition, "density_of_states: empty grid");
    for (double u : energy_grid)
        require(u > 0.0, errc::precondition,
                "density_of_states: energies must exceed eps0 (grid is E - eps0 > 0)");
    const double hbar = dosc.spec.constants.hbar;
    const double w0 = dosc.spec.omega;
    const double escale = hbar * w0;
    const double u_min = *std::min_element(energy_grid.begin(), energy_grid.end());
    const double u_max = *std::max_element(energy_grid.begin(), energy_grid.end());

    SeriesConfig cfg = series;
    cfg.n_max = std::max(series.n_max, 500000);

    // pole count so the truncated family is negligible at u_min
    DrudeRoots roots = drude_denominator_roots(dosc);
    const double rate = 2.0 * pi / hbar * (roots.a_osc.real() / std::norm(roots.a_osc));
    int n_osc = static_cast<int>(std::ceil(16.0 / (rate * u_min)));
    n_osc = std::clamp(n_osc, 64, 1400);
    PoleTable table = build_pole_table(dosc, n_osc, 240, cfg);

    // smooth remainder: contour evaluation on a subgrid, cubic interpolation
    const int subn = 56;
    std::vector<double> su(subn), sh(subn);
    for (int i = 0; i < subn; ++i) {
        su[i] = u_min + (u_max - u_min) * i / (subn - 1);
        sh[i] = options.method == DosMethod::talbot
                    ? remainder_talbot(dosc, table, cfg, su[i], options.talbot_nodes)
                    : remainder_bromwich(dosc, table, cfg, su[i], escale,
                                         options.bromwich_min_chunks);
    }
    CubicSpline spline;
    spline.build(su, sh);

    DosResult out;
    out.method = options.method;
    out.eps0 = table.eps0;
    out.delta_weight = table.w_delta;
    out.average_density = table.avg_density;
    out.energies = energy_grid;
    out.density.resize(energy_grid.size());
    for (std::size_t i = 0; i < energy_grid.size(); ++i)
        out.density[i] = dos_pole_sum(table, energy_grid[i]) + spline(energy_grid[i]);

    // round trip against Z e^{beta eps0} on the beta window
    double worst = 0.0;
    for (double hbw : options.roundtrip_hbw) {
        const double beta = hbw / escale * hbar; // hbar*beta*omega0 = hbw
        double lhs = table.w_delta;
        for (std::size_t i = 0; i + 1 < energy_grid.size(); ++i) {
            const double du = energy_grid[i + 1] - energy_grid[i];
            lhs += 0.5 * du *
                   (out.density[i] * std::exp(-beta * energy_grid[i]) +
                    out.density[i + 1] * std::exp(-beta * energy_grid[i + 1]));
        }
        lhs += out.density.front() * (1.0 - std::exp(-beta * u_min)) / beta; // onset strip
        lhs += table.avg_density * std::exp(-beta * u_max) / beta;           // mean-density tail
        const double rhs = std::exp(log_z_damped_ct(dosc, complex{beta, 0.0}, cfg).real() +
                                    beta * table.eps0);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    out.roundtrip_residual = worst;
    if (worst > options.roundtrip_tol)
        throw domain_error(errc::ill_conditioned,
                           "density_of_states: Laplace round-trip residual " +
                               std::to_string(worst) + " exceeds tolerance");
    return out;
}

namespace {

struct LorentzModel {
    // y = B + s (u - u0) + (A/pi)(G/2)/((u-u0)^2 + (G/2)^2)
    static double eval(const std::array<double, 5>& p, double u) {
        const double du = u - p[1];
        const double hw = 0.5 * p[2];
        return p[3] + p[4] * du + (p[0] / pi) * hw / (du * du + hw * hw);
    }
};

// dense 5x5 solve, partial pivoting
bool solve5(std::array<std::array<double, 5>, 5>& A, std::array<double, 5>& b) {
    for (int c = 0; c < 5; ++c) {
        int piv = c;
        for (int r = c + 1; r < 5; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-300) return false;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < 5; ++r) {
            const double f = A[r][c] / A[c][c];
            for (int k = c; k < 5; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = 4; c >= 0; --c) {
        for (int k = c + 1; k < 5; ++k) b[c] -= A[c][k] * b[k];
        b[c] /= A[c][c];
    }
    return true;
}

std::array<double, 5> lm_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                             std::array<double, 5> p) {
    double lambda = 1e-3;
    auto chi2 = [&](const std::array<double, 5>& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - LorentzModel::eval(q, xs[i]);
            s += r * r;
        }
        return s;
    };
    double best = chi2(p);
    for (int iter = 0; iter < 200; ++iter) {
        // numeric Jacobian
        std::array<std::array<double, 5>, 5> JTJ{};
        std::array<double, 5> JTr{};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::array<double, 5> grad{};
            const double y0 = LorentzModel::eval(p, xs[i]);
            for (int k = 0; k < 5; ++k) {
                auto q = p;
                const double h = std::max(1e-8, 1e-7 * std::abs(p[k]));
                q[k] += h;
                grad[k] = (LorentzModel::eval(q, xs[i]) - y0) / h;
            }
            const double r = ys[i] - y0;
            for (int a = 0; a < 5; ++a) {
                JTr[a] += grad[a] * r;
                for (int b = 0; b < 5; ++b) JTJ[a][b] += grad[a] * grad[b];
            }
        }
        auto A = JTJ;
        for (int a = 0; a < 5; ++a) A[a][a] *= (1.0 + lambda);
        auto step = JTr;
        if (!solve5(A, step)) break;
        auto q = p;
        for (int a = 0; a < 5; ++a) q[a] += step[a];
        const double c2 = chi2(q);
        if (c2 < best) {
            const bool done = best - c2 < 1e-14 * (best + 1e-30);
            p = q;
            best = c2;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (done) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e10) break;
        }
    }
    return p;
}

} // namespace

std::vector<PeakFit> fit_dos_peaks(const DosResult& dos, int n_levels,
                                   double width_guess_scale) {
    const auto& us = dos.energies;
    const auto& rho = dos.density;
    const double escale = 1.0 / dos.average_density; // hbar omega0

    std::vector<std::array<double, 5>> params(n_levels);
    auto window = [&](int n, double u0, double G) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < us.size(); ++i)
            if (us[i] > u0 - 1.5 * G && us[i] < u0 + 1.5 * G) idx.push_back(i);
        return idx;
    };

    // first pass: independent fits seeded at the local maxima
    for (int n = 1; n <= n_levels; ++n) {
        const double guess_c = n * escale;
        const double G = width_guess_scale * n;
        double u0 = guess_c;
        double best = -1e300;
        for (std::size_t i = 0; i < us.size(); ++i)
            if (std::abs(us[i] - guess_c) < 0.4 * escale && rho[i] > best) {
                best = rho[i];
                u0 = us[i];
            }
        auto idx = window(n, u0, G);
        std::vector<double> xs, ys;
        for (auto i : idx) xs.push_back(us[i]), ys.push_back(rho[i]);
        params[n - 1] = lm_fit(xs, ys, {1.0, u0, G, dos.average_density, 0.0});
    }
    // refinement passes with neighbour peaks subtracted
    for (int pass = 0; pass < 3; ++pass) {
        auto updated = params;
        for (int n = 1; n <= n_levels; ++n) {
            const auto& pc = params[n - 1];
            auto idx = window(n, pc[1], std::abs(pc[2]));
            std::vector<double> xs, ys;
            for (auto i : idx) {
                double y = rho[i];
                for (int k = 1; k <= n_levels; ++k) {
                    if (k == n) continue;
                    const auto& pk = params[k - 1];
                    const double du = us[i] - pk[1];
                    const double hw = 0.5 * std::abs(pk[2]);
                    y -= (pk[0] / pi) * hw / (du * du + hw * hw);
                }
                xs.push_back(us[i]);
                ys.push_back(y);
            }
            updated[n - 1] = lm_fit(xs, ys, pc);
        }
        params = updated;
    }
    std::vector<PeakFit> out;
    out.reserve(n_levels);
    for (const auto& p : params) out.push_back({p[1], std::abs(p[2]), p[0]});
    return out;
}

} // namespace dissipath::thermo
