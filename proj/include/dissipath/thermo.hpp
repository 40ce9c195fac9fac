// thermo.hpp — equilibrium thermodynamics of the damped harmonic oscillator:
// partition functions (Matsubara products with analytic tails), free energy,
// ground-state energy, perturbative shift, level widths, the HO density
// matrix, and the density of states by numerical inverse Laplace transform.
#pragma once

#include <vector>

#include "dissipath/bath.hpp"
#include "dissipath/common.hpp"
#include "dissipath/quadrature.hpp"

namespace dissipath::thermo {

struct DampedOscillator {
    OscillatorSpec spec{};              // mass m, frequency omega_0
    bath::SpectralDensity environment{}; // J(omega)
};

// Undamped partition function 1/(2 sinh(hbar beta omega/2)).
double z_undamped(const OscillatorSpec& spec, const ThermalState& thermal);

// Matsubara product route (1/hbar beta omega) prod nu_n^2/(nu_n^2+omega^2),
// truncated at series.n_max, with the analytic log-tail when enabled.
double z_undamped_product(const OscillatorSpec& spec, const ThermalState& thermal,
                          const SeriesConfig& series = {});

// Damped partition function
// (1/hbar beta omega0) prod nu_n^2/(nu_n^2 + nu_n ghat(nu_n) + omega0^2).
// Strictly ohmic damping is rejected (the product needs a cutoff).
double z_damped(const DampedOscillator& dosc, const ThermalState& thermal,
                const SeriesConfig& series = {});

// ln Z at complex beta (analytic continuation of the product; used by the
// inverse-Laplace machinery). skip_factor > 0 omits that Matsubara factor.
complex log_z_damped_ct(const DampedOscillator& dosc, complex beta,
                        const SeriesConfig& series = {}, int skip_factor = 0);

// F = -ln Z / beta via the explicit log-sum.
double free_energy(const DampedOscillator& dosc, const ThermalState& thermal,
                   const SeriesConfig& series = {});

// eps0 = (hbar/2 pi) int_0^inf dnu ln(1 + ghat(nu)/nu + omega0^2/nu^2).
double ground_state_energy(const DampedOscillator& dosc, const quad::Config& cfg = {});

// Second-order perturbative shift and its large-cutoff asymptote terms.
struct LambShift {
    double value;        // -(hbar/2 pi m omega0) int dw J(w)/(omega0+w)
    double renorm_term;  // -hbar gamma omega_d / (4 omega0)
    double log_term;     // +(hbar gamma / 2 pi) ln(omega_d/omega0)
};
LambShift lamb_shift_weak(const DampedOscillator& dosc, const quad::Config& cfg = {});

// Golden-rule width of level n: n J(omega0) / (m omega0).
double level_width(const DampedOscillator& dosc, int n);

// Normalized HO equilibrium density matrix rho_beta(x, x').
double ho_density_matrix(const OscillatorSpec& spec, const ThermalState& thermal,
                         double x, double x_prime);

// Z e^{beta eps0} with cutoff-cancelling grouping, plus the weak-coupling
// digamma form for cross-checking.
struct RegularizedPartition {
    double value;
    double weak_coupling_digamma;
};
RegularizedPartition regularized_partition(const DampedOscillator& dosc,
                                           const ThermalState& thermal,
                                           const SeriesConfig& series = {});

// ---- density of states ----

enum class DosMethod { bromwich, talbot };

struct DosOptions {
    DosMethod method = DosMethod::talbot;
    int talbot_nodes = 48;
    int bromwich_min_chunks = 48;
    double roundtrip_tol = 1e-3;     // ill-conditioned diagnostic threshold
    std::vector<double> roundtrip_hbw = {0.5, 1.0, 2.0, 3.0, 5.0};
};

struct DosResult {
    std::vector<double> energies; // E - eps0 grid
    std::vector<double> density;
    DosMethod method = DosMethod::talbot;
    double eps0 = 0.0;
    double delta_weight = 0.0;       // weight of the omitted delta at E = eps0
    double roundtrip_residual = 0.0; // max relative residual on the beta window
    double average_density = 0.0;    // 1/(hbar omega0)
};

DosResult density_of_states(const DampedOscillator& dosc,
                            const std::vector<double>& energy_grid,
                            const DosOptions& options = {},
                            const SeriesConfig& series = {});

// Pole table of Z(beta) e^{beta eps0} (poles of the analytically continued
// Matsubara product). Exposed for tests and for the pole-sum evaluation.
struct PoleTable {
    std::vector<complex> pole;    // oscillatory family, Im p < 0 member of each pair
    std::vector<complex> residue; // matching residues of Z e^{beta eps0}
    std::vector<double> pole_real;
    std::vector<double> residue_real;
    double eps0 = 0.0;
    double w_delta = 0.0;
    double avg_density = 0.0;
};
PoleTable build_pole_table(const DampedOscillator& dosc, int n_osc, int n_real,
                           const SeriesConfig& series = {});

// rho_c(u) from the residue expansion alone (u = E - eps0 > 0).
double dos_pole_sum(const PoleTable& table, double u);

// Local Lorentzian least-squares peak fit with linear baseline and iterative
// subtraction of neighbouring peaks.
struct PeakFit {
    double center;
    double width;
    double area;
};
std::vector<PeakFit> fit_dos_peaks(const DosResult& dos, int n_levels,
                                   double width_guess_scale);

// Cubic roots -a_k of nu^2 + nu ghat(nu) + omega0^2 (Drude): helper shared by
// the pole table and tests.
struct DrudeRoots {
    double a_real;   // ~ omega_d - gamma
    complex a_osc;   // ~ gamma/2 + i omega_bar
};
DrudeRoots drude_denominator_roots(const DampedOscillator& dosc);

} // namespace dissipath::thermo
