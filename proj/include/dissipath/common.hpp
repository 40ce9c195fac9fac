// common.hpp — shared domain types, constants and the error taxonomy
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace dissipath {

inline constexpr double pi = 3.14159265358979323846;
using complex = std::complex<double>;

// Natural units hbar = k_B = 1 by default; kept as explicit parameters so
// classical-limit sweeps (hbar -> 0) stay testable.
struct GlobalConstants {
    double hbar = 1.0;
    double k_boltzmann = 1.0;
};

struct ThermalState {
    double beta = 1.0;
    GlobalConstants constants{};

    // Matsubara frequency nu_n = 2 pi n / (hbar beta)
    double nu(int n) const { return 2.0 * pi * n / (constants.hbar * beta); }
    double hbar_beta() const { return constants.hbar * beta; }
};

struct OscillatorSpec {
    double mass = 1.0;
    double omega = 1.0; // omega = 0 degenerates to the free particle
    GlobalConstants constants{};
};

struct SeriesConfig {
    int n_max = 4096;
    enum class TailPolicy { none, log_tail } tail_policy = TailPolicy::log_tail;
    double tolerance = 1e-10;
};

// Typed domain failures; the CLI maps these onto exit codes.
enum class errc {
    precondition,        // violated operation precondition
    conjugate_point,     // fluctuation determinant vanishes
    divergence,          // quantity is infinite for the requested bath
    distributional,      // result is a tagged distribution, not a number
    unsupported_regime,  // e.g. overdamped pole sum
    convergence_failure, // series/quadrature did not reach tolerance
    ill_conditioned      // inversion residual above tolerance
};

class domain_error : public std::runtime_error {
  public:
    domain_error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::precondition: return "precondition";
        case errc::conjugate_point: return "conjugate_point";
        case errc::divergence: return "divergence";
        case errc::distributional: return "distributional";
        case errc::unsupported_regime: return "unsupported_regime";
        case errc::convergence_failure: return "convergence_failure";
        case errc::ill_conditioned: return "ill_conditioned";
    }
    return "unknown";
}

// Exit-code contract: 0 success, 2 validation failure, 3 domain/precondition,
// 4 convergence failure.
inline int errc_exit_code(errc c) {
    switch (c) {
        case errc::convergence_failure:
        case errc::ill_conditioned: return 4;
        default: return 3;
    }
}

inline void require(bool cond, errc code, const std::string& msg) {
    if (!cond) throw domain_error(code, msg);
}

} // namespace dissipath
