#include "dissipath/pathgrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <cblas.h>
#include <fftw3.h>

namespace dissipath::pathgrid {

namespace {

const complex I{0.0, 1.0};

struct FftBuffer {
    int n = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd{}, bwd{};

    explicit FftBuffer(int n_) : n(n_) {
        buf = fftw_alloc_complex(n);
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftBuffer() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;

    complex* data() { return reinterpret_cast<complex*>(buf); }
};

std::vector<double> momenta(const Grid1D& g) {
    std::vector<double> k(g.n_points);
    const double dk = 2.0 * pi / (g.n_points * g.dx());
    for (int j = 0; j < g.n_points; ++j) {
        const int jj = j <= g.n_points / 2 ? j : j - g.n_points;
        k[j] = jj * dk;
    }
    return k;
}

void check_plan(const PotentialTable& potential, const TrotterPlan& plan, int n) {
    require(plan.n_slices >= 1, errc::precondition, "trotter: n_slices must be >= 1");
    require(plan.dt != 0.0, errc::precondition, "trotter: dt must be nonzero");
    require(static_cast<int>(potential.values.size()) == n, errc::precondition,
            "trotter: potential table does not match the grid");
    if (!potential.mask.empty()) {
        require(static_cast<int>(potential.mask.size()) == n, errc::precondition,
                "trotter: mask size does not match the grid");
        require(plan.boundary == Boundary::dirichlet, errc::precondition,
                "trotter: hard-wall mask with periodic boundary is inconsistent");
    }
}

void apply_mask(const PotentialTable& pot, complex* psi, int n) {
    if (pot.mask.empty()) return;
    for (int j = 0; j < n; ++j)
        if (!pot.mask[j]) psi[j] = 0.0;
}

} // namespace

double GridState::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return norm_convention == NormConvention::sum_dx ? std::sqrt(s * grid.dx())
                                                     : std::sqrt(s);
}

GridState gaussian_state(const Grid1D& grid, double x0, double sigma, double k0) {
    GridState st;
    st.grid = grid;
    st.amplitudes.resize(grid.n_points);
    const double norm = std::pow(pi * sigma * sigma, -0.25);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        const double dx = x - x0;
        st.amplitudes[j] = norm * std::exp(complex{-dx * dx / (2.0 * sigma * sigma), k0 * x});
    }
    return st;
}

PotentialTable harmonic_potential(const Grid1D& grid, double mass, double omega) {
    PotentialTable p;
    p.values.resize(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        p.values[j] = 0.5 * mass * omega * omega * x * x;
    }
    return p;
}

PotentialTable box_potential(const Grid1D& grid, double wall_lo, double wall_hi) {
    PotentialTable p;
    p.values.assign(grid.n_points, 0.0);
    p.mask.resize(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        p.mask[j] = (x > wall_lo && x < wall_hi) ? 1 : 0;
    }
    return p;
}

TrotterResult trotter_propagate(const GridState& state, const PotentialTable& potential,
                                const TrotterPlan& plan) {
    const int n = state.grid.n_points;
    check_plan(potential, plan, n);
    require(plan.axis == TimeAxis::real_time, errc::precondition,
            "trotter_propagate: real-time plan expected (use imaginary_trotter)");
    const double hbar = plan.constants.hbar;
    const double dt = plan.dt;

    FftBuffer fft(n);
    complex* psi = fft.data();
    std::copy(state.amplitudes.begin(), state.amplitudes.end(), psi);

    const auto k = momenta(state.grid);
    std::vector<complex> kin(n), vfull(n), vhalf(n);
    for (int j = 0; j < n; ++j) {
        kin[j] = std::exp(-I * hbar * k[j] * k[j] * dt / (2.0 * plan.mass));
        vfull[j] = std::exp(-I * potential.values[j] * dt / hbar);
        vhalf[j] = std::exp(-I * potential.values[j] * dt / (2.0 * hbar));
    }
    const double inv_n = 1.0 / n;
    const double norm0 = state.norm();

    auto kinetic = [&] {
        fftw_execute(fft.fwd);
        for (int j = 0; j < n; ++j) psi[j] *= kin[j] * inv_n;
        fftw_execute(fft.bwd);
    };
    auto pot_apply = [&](const std::vector<complex>& v) {
        for (int j = 0; j < n; ++j) psi[j] *= v[j];
        apply_mask(potential, psi, n);
    };

    for (int s = 0; s < plan.n_slices; ++s) {
        switch (plan.splitting) {
            case Splitting::strang:
                pot_apply(vhalf);
                kinetic();
                pot_apply(vhalf);
                break;
            case Splitting::VT: // exp(-iT dt) exp(-iV dt): potential acts first
                pot_apply(vfull);
                kinetic();
                break;
            case Splitting::TV:
                kinetic();
                pot_apply(vfull);
                break;
        }
    }

    TrotterResult out;
    out.state = state;
    std::copy(psi, psi + n, out.state.amplitudes.begin());
    const double norm1 = out.state.norm();
    out.norm_drift = norm0 > 0.0 ? (norm1 - norm0) / norm0 : 0.0;
    return out;
}

GridState trotter_propagate_reference(const GridState& state,
                                      const PotentialTable& potential,
                                      const TrotterPlan& plan) {
    const int n = state.grid.n_points;
    check_plan(potential, plan, n);
    require(n <= 1024, errc::precondition,
            "trotter_propagate_reference: dense reference path is limited to small grids");
    const double hbar = plan.constants.hbar;
    const double dt = plan.dt;
    const double dx = state.grid.dx();

    // literal short-time kernel sqrt(m/2 pi i hbar dt) e^{i m (x-x')^2/2 hbar dt} dx'
    std::vector<complex> kernel(n * n);
    const complex pref = std::sqrt(plan.mass / (2.0 * pi * hbar * dt) / I) * dx;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = state.grid.x(i) - state.grid.x(j);
            kernel[i * n + j] =
                pref * std::exp(I * plan.mass * d * d / (2.0 * hbar * dt));
        }
    std::vector<complex> vfull(n);
    for (int j = 0; j < n; ++j) vfull[j] = std::exp(-I * potential.values[j] * dt / hbar);

    GridState out = state;
    std::vector<complex> tmp(n);
    for (int s = 0; s < plan.n_slices; ++s) {
        for (int j = 0; j < n; ++j) out.amplitudes[j] *= vfull[j]; // V at the left point
        apply_mask(potential, out.amplitudes.data(), n);
        for (int i = 0; i < n; ++i) {
            complex acc = 0.0;
            const complex* row = &kernel[std::size_t(i) * n];
            for (int j = 0; j < n; ++j) acc += row[j] * out.amplitudes[j];
            tmp[i] = acc;
        }
        out.amplitudes.swap(tmp);
    }
    return out;
}

GridState trotter_kernel_column(const Grid1D& grid, int x_i_index,
                                const PotentialTable& potential, const TrotterPlan& plan,
                                double smearing_width) {
    require(x_i_index >= 0 && x_i_index < grid.n_points, errc::precondition,
            "trotter_kernel_column: x_i index out of range");
    require(smearing_width >= 2.0 * grid.dx(), errc::precondition,
            "trotter_kernel_column: smearing width below grid resolution");
    GridState delta;
    delta.grid = grid;
    delta.amplitudes.resize(grid.n_points);
    const double x0 = grid.x(x_i_index);
    const double w = smearing_width;
    for (int j = 0; j < grid.n_points; ++j) {
        const double d = grid.x(j) - x0;
        // unit-integral Gaussian surrogate for delta(x - x_i)
        delta.amplitudes[j] =
            std::exp(-d * d / (2.0 * w * w)) / (w * std::sqrt(2.0 * pi));
    }
    return trotter_propagate(delta, potential, plan).state;
}

double ThermalMatrix::entry(int i, int j) const {
    return values[std::size_t(i) * grid.n_points + j] * std::exp(log_scale);
}

double ThermalMatrix::trace() const {
    const int n = grid.n_points;
    double t = 0.0;
    for (int j = 0; j < n; ++j) t += values[std::size_t(j) * n + j];
    return t * grid.dx() * std::exp(log_scale);
}

ThermalMatrix imaginary_trotter(const Grid1D& grid, const PotentialTable& potential,
                                const TrotterPlan& plan) {
    const int n = grid.n_points;
    check_plan(potential, plan, n);
    require(plan.axis == TimeAxis::imaginary_time, errc::precondition,
            "imaginary_trotter: plan must use the imaginary axis");
    require((plan.n_slices & (plan.n_slices - 1)) == 0, errc::precondition,
            "imaginary_trotter: n_slices must be a power of two (kernel squaring)");
    const double hbar = plan.constants.hbar;
    const double dtau = plan.dt;
    const double dx = grid.dx();

    // B = e^{-dtau V/2 hbar} K e^{-dtau V/2 hbar}, K the exact free heat kernel
    ThermalMatrix tm;
    tm.grid = grid;
    tm.values.assign(std::size_t(n) * n, 0.0);
    const double pref = std::sqrt(plan.mass / (2.0 * pi * hbar * dtau));
    std::vector<double> ev(n);
    for (int j = 0; j < n; ++j) ev[j] = std::exp(-0.5 * dtau * potential.values[j] / hbar);
    for (int i = 0; i < n; ++i) {
        const bool mi = potential.mask.empty() || potential.mask[i];
        for (int j = 0; j < n; ++j) {
            const bool mj = potential.mask.empty() || potential.mask[j];
            if (!mi || !mj) continue;
            const double d = grid.x(i) - grid.x(j);
            tm.values[std::size_t(i) * n + j] =
                ev[i] * pref * std::exp(-plan.mass * d * d / (2.0 * hbar * dtau)) * ev[j];
        }
    }

    int squarings = 0;
    for (int s = plan.n_slices; s > 1; s >>= 1) ++squarings;
    std::vector<double> work(std::size_t(n) * n);
    for (int s = 0; s < squarings; ++s) {
        cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, n, n, n, dx,
                    tm.values.data(), n, tm.values.data(), n, 0.0, work.data(), n);
        tm.values.swap(work);
        double mx = 0.0;
        for (double v : tm.values) mx = std::max(mx, std::abs(v));
        if (mx > 0.0) {
            const double inv = 1.0 / mx;
            for (double& v : tm.values) v *= inv;
            tm.log_scale = 2.0 * tm.log_scale + std::log(mx);
        } else {
            tm.log_scale *= 2.0;
        }
    }
    return tm;
}

ImaginaryStateResult imaginary_trotter_state(const GridState& state,
                                             const PotentialTable& potential,
                                             const TrotterPlan& plan) {
    const int n = state.grid.n_points;
    check_plan(potential, plan, n);
    require(plan.axis == TimeAxis::imaginary_time, errc::precondition,
            "imaginary_trotter_state: plan must use the imaginary axis");
    const double hbar = plan.constants.hbar;
    const double dtau = plan.dt;

    FftBuffer fft(n);
    complex* psi = fft.data();
    std::copy(state.amplitudes.begin(), state.amplitudes.end(), psi);
    const auto k = momenta(state.grid);
    std::vector<double> kin(n), vhalf(n);
    for (int j = 0; j < n; ++j) {
        kin[j] = std::exp(-hbar * k[j] * k[j] * dtau / (2.0 * plan.mass));
        vhalf[j] = std::exp(-0.5 * dtau * potential.values[j] / hbar);
    }
    const double inv_n = 1.0 / n;
    ImaginaryStateResult out;
    for (int s = 0; s < plan.n_slices; ++s) {
        for (int j = 0; j < n; ++j) psi[j] *= vhalf[j];
        apply_mask(potential, psi, n);
        fftw_execute(fft.fwd);
        for (int j = 0; j < n; ++j) psi[j] *= kin[j] * inv_n;
        fftw_execute(fft.bwd);
        for (int j = 0; j < n; ++j) psi[j] *= vhalf[j];
        apply_mask(potential, psi, n);
        double mx = 0.0;
        for (int j = 0; j < n; ++j) mx = std::max(mx, std::abs(psi[j]));
        if (mx > 0.0) {
            for (int j = 0; j < n; ++j) psi[j] /= mx;
            out.log_norm += std::log(mx);
        }
    }
    out.state = state;
    std::copy(psi, psi + n, out.state.amplitudes.begin());
    return out;
}

SpectralScanResult spectral_scan(const GridState& psi0, const PotentialTable& potential,
                                 const TrotterPlan& plan, double t_max,
                                 double peak_threshold) {
    const int n = psi0.grid.n_points;
    check_plan(potential, plan, n);
    require(plan.axis == TimeAxis::real_time, errc::precondition,
            "spectral_scan: real-time plan required");
    const double hbar = plan.constants.hbar;
    const double dt = plan.dt;
    const int nst = static_cast<int>(std::round(t_max / dt));
    const double dx = psi0.grid.dx();

    FftBuffer fft(n);
    complex* psi = fft.data();
    std::copy(psi0.amplitudes.begin(), psi0.amplitudes.end(), psi);
    const auto k = momenta(psi0.grid);
    std::vector<complex> kin(n), vhalf(n);
    for (int j = 0; j < n; ++j) {
        kin[j] = std::exp(-I * hbar * k[j] * k[j] * dt / (2.0 * plan.mass));
        vhalf[j] = std::exp(-I * potential.values[j] * dt / (2.0 * hbar));
    }
    const double inv_n = 1.0 / n;

    std::vector<complex> ac(nst + 1);
    auto overlap = [&] {
        complex s = 0.0;
        for (int j = 0; j < n; ++j) s += std::conj(psi0.amplitudes[j]) * psi[j];
        return s * dx;
    };
    ac[0] = overlap();
    for (int s = 0; s < nst; ++s) {
        for (int j = 0; j < n; ++j) psi[j] *= vhalf[j];
        apply_mask(potential, psi, n);
        fftw_execute(fft.fwd);
        for (int j = 0; j < n; ++j) psi[j] *= kin[j] * inv_n;
        fftw_execute(fft.bwd);
        for (int j = 0; j < n; ++j) psi[j] *= vhalf[j];
        apply_mask(potential, psi, n);
        ac[s + 1] = overlap();
    }

    // Hann window, zero-padded transform A(E) = int dt a(t) e^{i E t / hbar}
    int pad = 1;
    while (pad < 8 * (nst + 1)) pad <<= 1;
    FftBuffer spec(pad);
    complex* buf = spec.data();
    std::fill(buf, buf + pad, complex{0.0, 0.0});
    for (int s = 0; s <= nst; ++s) {
        const double wwin = 0.5 * (1.0 + std::cos(pi * s / double(nst)));
        buf[s] = ac[s] * wwin;
    }
    // a(t) ~ e^{-i E t/hbar}: the inverse-sign transform sum_j a_j e^{+2 pi i j k/N}
    // peaks at bin k = E pad dt/(2 pi hbar)
    fftw_execute(spec.bwd);
    std::vector<double> mag(pad);
    double mx = 0.0;
    for (int j = 0; j < pad; ++j) {
        mag[j] = std::abs(buf[j]);
        mx = std::max(mx, mag[j]);
    }
    SpectralScanResult out;
    out.resolution = 2.0 * pi * hbar / t_max;
    const double dE = 2.0 * pi * hbar / (pad * dt);
    for (int j = 1; j + 1 < pad / 2; ++j) {
        if (mag[j] > mag[j - 1] && mag[j] > mag[j + 1] && mag[j] > peak_threshold * mx) {
            // three-point parabolic refinement on the magnitude
            const double denom = mag[j - 1] - 2.0 * mag[j] + mag[j + 1];
            const double corr =
                denom != 0.0 ? 0.5 * (mag[j - 1] - mag[j + 1]) / denom : 0.0;
            out.peaks.push_back({(j + corr) * dE, mag[j] * dt});
        }
    }
    return out;
}

} // namespace dissipath::pathgrid
