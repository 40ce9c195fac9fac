// pathgrid.hpp — grid-based Trotter split-step engine for the discretized path
// integral, in real and imaginary time. Kinetic steps act in momentum space
// (exact free evolution per slice); a dense real-space reference path keeps
// the literal short-time-kernel discretization available as an oracle.
#pragma once

#include <cstdint>
#include <vector>

#include "dissipath/common.hpp"

namespace dissipath::pathgrid {

struct Grid1D {
    double x_min = -10.0;
    double x_max = 10.0;
    int n_points = 256;

    double dx() const { return (x_max - x_min) / n_points; }
    double x(int j) const { return x_min + j * dx(); }
};

enum class NormConvention { sum_dx, unit_vector };

struct GridState {
    Grid1D grid{};
    std::vector<complex> amplitudes;
    NormConvention norm_convention = NormConvention::sum_dx;

    double norm() const; // under the stated convention
};

// Gaussian wave packet (1/pi sigma^2)^{1/4} e^{-(x-x0)^2/2 sigma^2 + i k0 x}
GridState gaussian_state(const Grid1D& grid, double x0, double sigma, double k0 = 0.0);

struct PotentialTable {
    std::vector<double> values;     // V(x_j)
    std::vector<std::uint8_t> mask; // 1 = allowed; empty = no hard walls
};

PotentialTable harmonic_potential(const Grid1D& grid, double mass, double omega);
PotentialTable box_potential(const Grid1D& grid, double wall_lo, double wall_hi);

enum class TimeAxis { real_time, imaginary_time };
enum class Splitting { VT, TV, strang };
enum class Boundary { periodic, dirichlet };

struct TrotterPlan {
    int n_slices = 128;
    double dt = 1e-2; // slice magnitude (real time, or Delta tau)
    TimeAxis axis = TimeAxis::real_time;
    Splitting splitting = Splitting::strang;
    Boundary boundary = Boundary::periodic;
    double mass = 1.0;
    GlobalConstants constants{};
};

struct TrotterResult {
    GridState state;
    double norm_drift = 0.0; // relative norm change (boundary leakage diagnostic)
};

// N split steps, kinetic part via FFT.
TrotterResult trotter_propagate(const GridState& state, const PotentialTable& potential,
                                const TrotterPlan& plan);

// Dense real-space reference path: the literal discretized-propagator kernel
// with the potential at the left point (VT ordering). Small grids only.
GridState trotter_propagate_reference(const GridState& state,
                                      const PotentialTable& potential,
                                      const TrotterPlan& plan);

// Propagator column K(., t, x_i, 0) with delta initial data represented by a
// normalized Gaussian of width smearing_width (>= 2 dx). Comparisons against
// closed forms convolve the exact kernel with the same Gaussian; equivalently
// the column deconvolves by exp(+k^2 w^2/2) in momentum space.
GridState trotter_kernel_column(const Grid1D& grid, int x_i_index,
                                const PotentialTable& potential, const TrotterPlan& plan,
                                double smearing_width);

// Unnormalized thermal matrix <x|e^{-beta H}|x'> built from the short-time
// Gaussian kinetic kernel and exp(-V dt/hbar) factors, contracted by repeated
// squaring (n_slices must be a power of two). Entries are scaled by
// exp(log_scale) to prevent underflow at large beta.
struct ThermalMatrix {
    Grid1D grid{};
    std::vector<double> values; // row-major n x n, times exp(log_scale)
    double log_scale = 0.0;

    double entry(int i, int j) const;
    double trace() const; // Z = sum_j M_jj dx
};
ThermalMatrix imaginary_trotter(const Grid1D& grid, const PotentialTable& potential,
                                const TrotterPlan& plan);

// Imaginary-time evolution of a state with per-slice renormalization.
struct ImaginaryStateResult {
    GridState state;
    double log_norm = 0.0;
};
ImaginaryStateResult imaginary_trotter_state(const GridState& state,
                                             const PotentialTable& potential,
                                             const TrotterPlan& plan);

// Windowed autocorrelation spectroscopy: propagate psi0, Fourier-transform
// <psi0|psi(t)> over [0, t_max] with a Hann window, return spectral peaks.
struct SpectralPeak {
    double energy;
    double weight;
};
struct SpectralScanResult {
    std::vector<SpectralPeak> peaks;
    double resolution; // 2 pi / t_max
};
SpectralScanResult spectral_scan(const GridState& psi0, const PotentialTable& potential,
                                 const TrotterPlan& plan, double t_max,
                                 double peak_threshold = 0.02);

} // namespace dissipath::pathgrid
