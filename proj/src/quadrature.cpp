#include "dissipath/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace dissipath::quad {

namespace {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule, on [-1, 1].
constexpr std::array<double, 15> kX = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
constexpr std::array<double, 15> kWK = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
constexpr std::array<double, 7> kWG = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double vk = 0.0, vg = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + h * kX[i]);
        vk += kWK[i] * fx;
        if (i % 2 == 1) vg += kWG[i / 2] * fx;
    }
    vk *= h;
    vg *= h;
    const double err = std::pow(200.0 * std::abs(vk - vg), 1.5);
    return {vk, std::min(err, std::abs(vk - vg) * 200.0)};
}

double gk_recurse(const Fn& f, double a, double b, double tol, int depth) {
    const auto r = gk15(f, a, b);
    if (depth <= 0 || r.error <= tol) return r.value;
    const double c = 0.5 * (a + b);
    return gk_recurse(f, a, c, 0.5 * tol, depth - 1) +
           gk_recurse(f, c, b, 0.5 * tol, depth - 1);
}

// 32-point Gauss-Legendre for the oscillatory chunks.
struct GL32 {
    std::array<double, 32> x{}, w{};
    GL32() {
        // Newton iteration on Legendre P_32
        const int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = -t;
            x[n - 1 - i] = t;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};
const GL32& gl32() {
    static const GL32 g;
    return g;
}

} // namespace

double gk_adaptive(const Fn& f, double a, double b, const Config& cfg) {
    const auto first = gk15(f, a, b);
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(first.value));
    if (first.error <= tol) return first.value;
    const double c = 0.5 * (a + b);
    return gk_recurse(f, a, c, 0.5 * tol, cfg.max_depth) +
           gk_recurse(f, c, b, 0.5 * tol, cfg.max_depth);
}

double gk_adaptive(const Fn& f, double a, double b,
                   const std::vector<double>& breakpoints, const Config& cfg) {
    std::vector<double> pts{a, b};
    for (double x : breakpoints)
        if (x > a && x < b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        s += gk_adaptive(f, pts[i], pts[i + 1], cfg);
    return s;
}

double de_finite(const Fn& f, double a, double b, double tol) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, tol);
}

double de_halfline(const Fn& f, double a, double tol) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto shifted = [&](double u) { return f(a + u); };
    return integrator.integrate(shifted, tol);
}

double euler_accelerate(std::vector<double> s) {
    if (s.empty()) return 0.0;
    double best = s.back();
    while (s.size() > 1) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
        s.pop_back();
        best = s.back();
    }
    return best;
}

OscResult oscillatory_halfline(const Fn& f, double t, Trig trig, double a,
                               int min_chunks, const std::vector<double>& breakpoints,
                               double tail_tol) {
    OscResult out;
    require(t > 0.0, errc::precondition, "oscillatory_halfline: t must be positive");
    const double h = pi / t;
    const auto& gl = gl32();

    auto chunk = [&](double lo, double hi) {
        std::vector<double> pts{lo, hi};
        for (double x : breakpoints)
            if (x > lo && x < hi) pts.push_back(x);
        std::sort(pts.begin(), pts.end());
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double c = 0.5 * (pts[i] + pts[i + 1]);
            const double hw = 0.5 * (pts[i + 1] - pts[i]);
            double acc = 0.0;
            for (int j = 0; j < 32; ++j) {
                const double w = c + hw * gl.x[j];
                const double trigv = trig == Trig::cosine ? std::cos(w * t) : std::sin(w * t);
                acc += gl.w[j] * f(w) * trigv;
            }
            s += acc * hw;
        }
        return s;
    };

    std::vector<double> partial;
    partial.reserve(min_chunks + 64);
    double run = 0.0;
    double last_mag = 0.0;
    int k = 0;
    const int hard_cap = std::max(min_chunks * 4, min_chunks + 512);
    for (; k < hard_cap; ++k) {
        const double lo = a + k * h;
        const double c = chunk(lo, lo + h);
        run += c;
        partial.push_back(run);
        last_mag = std::abs(c);
        if (k + 1 >= min_chunks) {
            // stop once the accelerated tail estimate is negligible
            if (last_mag < tail_tol) break;
            if (partial.size() >= 8) {
                const double e1 = euler_accelerate(
                    std::vector<double>(partial.end() - 8, partial.end()));
                const double e2 = euler_accelerate(
                    std::vector<double>(partial.end() - 7, partial.end()));
                if (std::abs(e1 - e2) < tail_tol) break;
            }
        }
    }
    out.chunks = k + 1;
    out.converged = k < hard_cap;
    // accelerate with a window over the final partial sums
    const std::size_t win = std::min<std::size_t>(partial.size(), 24);
    out.value = euler_accelerate(
        std::vector<double>(partial.end() - win, partial.end()));
    return out;
}

double inverse_power_tail(int k, double N) {
    // sum_{n > N} n^{-k} = N^{1-k}/(k-1) - N^{-k}/2 + (k/12) N^{-k-1}
    //                      - k(k+1)(k+2)/720 N^{-k-3} + ...
    const double kk = k;
    const double iN = 1.0 / N;
    double s = std::pow(iN, k - 1) / (kk - 1.0);
    s -= 0.5 * std::pow(iN, k);
    s += kk / 12.0 * std::pow(iN, k + 1);
    s -= kk * (kk + 1) * (kk + 2) / 720.0 * std::pow(iN, k + 3);
    s += kk * (kk + 1) * (kk + 2) * (kk + 3) * (kk + 4) / 30240.0 * std::pow(iN, k + 5);
    return s;
}

std::vector<double> log1p_series(const std::vector<double>& g) {
    const std::size_t n = g.size();
    std::vector<double> acc(n, 0.0), term(g);
    for (std::size_t i = 0; i < n; ++i) acc[i] = g[i];
    // ln(1+g) = g - g^2/2 + g^3/3 - ...; g starts at order >= 1 so the
    // iteration terminates once powers exceed the truncation order.
    std::size_t lowest = 1;
    while (g[lowest] == 0.0 && lowest + 1 < n) ++lowest;
    for (std::size_t p = 2; p * lowest < n; ++p) {
        std::vector<double> next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (term[i] == 0.0) continue;
            for (std::size_t j = 0; i + j < n; ++j) {
                if (g[j] == 0.0) continue;
                next[i + j] += term[i] * g[j];
            }
        }
        term = std::move(next);
        const double sign = (p % 2 == 0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) acc[i] += sign * term[i] / double(p);
    }
    return acc;
}

} // namespace dissipath::quad
