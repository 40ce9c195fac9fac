// quadrature.hpp — integration kit: adaptive Gauss-Kronrod, tanh-sinh panels,
// half-period chunking with Euler acceleration for oscillatory tails, and
// Euler-Maclaurin tails for inverse-power series.
#pragma once

#include <functional>
#include <vector>

#include "dissipath/common.hpp"

namespace dissipath::quad {

struct Config {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    int max_depth = 16;
};

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7/15 on [a, b].
double gk_adaptive(const Fn& f, double a, double b, const Config& cfg = {});

// As above but with interior breakpoints forced as panel boundaries.
double gk_adaptive(const Fn& f, double a, double b,
                   const std::vector<double>& breakpoints, const Config& cfg = {});

// tanh-sinh (double exponential) rule on [a, b]; robust near endpoint
// singularities and sharp peaks.
double de_finite(const Fn& f, double a, double b, double tol = 1e-12);

// int_a^inf f, f smooth and decaying (exp-sinh map).
double de_halfline(const Fn& f, double a, double tol = 1e-12);

enum class Trig { cosine, sine };

struct OscResult {
    double value = 0.0;
    bool converged = false;
    int chunks = 0;
};

// int_a^inf f(w) * cos(w t) dw (or sin): half-period chunks of width pi/t,
// each integrated by fixed Gauss-Legendre, partial sums accelerated by the
// iterated Euler transform. breakpoints are honored inside chunks.
// min_chunks must push past any interior peaks of f.
OscResult oscillatory_halfline(const Fn& f, double t, Trig trig, double a = 0.0,
                               int min_chunks = 48,
                               const std::vector<double>& breakpoints = {},
                               double tail_tol = 1e-13);

// Iterated-mean Euler transform of the sequence of partial sums of `terms`.
double euler_accelerate(std::vector<double> partial_sums);

// sum_{n > N} n^{-k} by Euler-Maclaurin (k >= 2, N >= ~50 for full precision).
double inverse_power_tail(int k, double N);

// Series coefficients of ln(1 + g(u)) given coefficients of the polynomial
// g(u) = sum_k g[k] u^k with g[0] = 0; truncated at g.size()-1.
std::vector<double> log1p_series(const std::vector<double>& g);

} // namespace dissipath::quad
