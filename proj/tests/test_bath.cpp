#include <doctest.h>

#include <cmath>

#include "dissipath/bath.hpp"
#include "oracle_helpers.hpp"

using namespace dissipath;
using bath::SpectralDensity;

namespace {
const ThermalState kBeta2{2.0, {}};
} // namespace

TEST_CASE("spectral density values") {
    const auto ohm = SpectralDensity::ohmic(0.1);
    const auto dru = SpectralDensity::drude(0.1, 10.0);
    CHECK(bath::j_value(ohm, 2.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(bath::j_value(dru, 10.0) == doctest::Approx(0.5).epsilon(1e-15)); // cutoff halves
    // low-frequency limit matches ohmic to first order
    CHECK(bath::j_value(dru, 1e-4) ==
          doctest::Approx(bath::j_value(ohm, 1e-4)).epsilon(1e-7));
    CHECK_THROWS_AS(bath::j_value(ohm, -1.0), domain_error);
}

TEST_CASE("damping kernel, Laplace domain") {
    CHECK(bath::damping_kernel_laplace(SpectralDensity::ohmic(0.1), 7.0) ==
          doctest::Approx(0.1).epsilon(1e-15));
    const auto dru = SpectralDensity::drude(0.1, 10.0);
    CHECK(bath::damping_kernel_laplace(dru, 10.0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(bath::damping_kernel_laplace(dru, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("damping kernel, time domain") {
    const auto dru = SpectralDensity::drude(0.1, 10.0);
    const auto v0 = bath::damping_kernel_time(dru, 0.0);
    CHECK_FALSE(v0.is_distribution);
    CHECK(v0.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bath::damping_kernel_time(dru, 0.1).value ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    const auto oh = bath::damping_kernel_time(SpectralDensity::ohmic(0.1), 0.3);
    CHECK(oh.is_distribution);
    CHECK(oh.delta_weight == doctest::Approx(0.2));
}

TEST_CASE("Laplace transform of gamma(t) reproduces ghat(z)") {
    const auto dru = SpectralDensity::drude(0.25, 7.0);
    for (double z : {0.0, 1.0, 5.0, 40.0}) {
        const double numeric = quad::de_halfline(
            [&](double t) {
                return std::exp(-z * t) * bath::damping_kernel_time(dru, t).value;
            },
            0.0, 1e-13);
        CHECK(numeric ==
              doctest::Approx(bath::damping_kernel_laplace(dru, z)).epsilon(1e-8));
    }
}

TEST_CASE("noise correlation: frozen values, symmetry, K'' identity") {
    const auto dru = SpectralDensity::drude(0.1, 10.0);

    const auto k03 = bath::noise_correlation(dru, kBeta2, 0.3);
    CHECK(k03.convention == bath::KernelConvention::with_hbar);
    CHECK(k03.value.real() == doctest::Approx(-0.34516760331786553).epsilon(2e-9));
    CHECK(k03.value.imag() == doctest::Approx(-0.24893534183931971).epsilon(2e-9));

    const auto k10 = bath::noise_correlation(dru, kBeta2, 1.0);
    CHECK(k10.value.real() == doctest::Approx(-0.017324253043096657).epsilon(2e-7));

    // detailed symmetry: Re even, Im odd
    const auto kp = bath::noise_correlation(dru, kBeta2, 0.45);
    const auto km = bath::noise_correlation(dru, kBeta2, -0.45);
    CHECK(kp.value.real() == doctest::Approx(km.value.real()).epsilon(1e-12));
    CHECK(kp.value.imag() == doctest::Approx(-km.value.imag()).epsilon(1e-12));

    // K'' = (m hbar/2) dgamma/dt, derivative by central differences
    for (double t : {0.3, 1.0}) {
        const double h = 1e-5;
        const double dgam = (bath::damping_kernel_time(dru, t + h).value -
                             bath::damping_kernel_time(dru, t - h).value) /
                            (2.0 * h);
        const double kpp = bath::noise_correlation(dru, kBeta2, t).value.imag();
        CHECK(kpp == doctest::Approx(0.5 * dgam).epsilon(1e-6));
    }
}

TEST_CASE("noise correlation: classical limit hbar -> 0") {
    const auto dru = SpectralDensity::drude(0.1, 10.0);
    ThermalState th{2.0, {1e-4, 1.0}};
    const double t = 0.3;
    const auto k = bath::noise_correlation(dru, th, t);
    const double classical =
        1.0 / th.beta * bath::damping_kernel_time(dru, t).value; // m kB T gamma(t)
    CHECK(k.value.real() == doctest::Approx(classical).epsilon(1e-6));
    // linear-in-hbar approach at fixed t
    ThermalState th2{2.0, {2e-4, 1.0}};
    const double d1 = std::abs(bath::noise_correlation(dru, th, t).value.real() - classical);
    const double d2 = std::abs(bath::noise_correlation(dru, th2, t).value.real() - classical);
    CHECK(d2 / std::max(d1, 1e-300) ==
          doctest::Approx(4.0).epsilon(0.3)); // quadratic in hbar here (even function)
}

TEST_CASE("strictly ohmic noise kernel needs a cap") {
    const auto ohm = SpectralDensity::ohmic(0.1);
    CHECK_THROWS_AS(bath::noise_correlation(ohm, kBeta2, 0.5), domain_error);
    bath::NoiseQuadrature nq;
    nq.omega_cap = 200.0;
    CHECK_NOTHROW(bath::noise_correlation(ohm, kBeta2, 0.5, nq));
}

TEST_CASE("ohmic real-part closed form") {
    const double hb = kBeta2.hbar_beta();
    const auto v = bath::noise_real_ohmic_closed_form(0.1, 1.0, kBeta2, 0.5 * hb);
    CHECK(v.convention == bath::KernelConvention::per_hbar);
    CHECK(v.value.real() == doctest::Approx(-0.014830091163875103).epsilon(1e-14));
    // symmetry
    CHECK(bath::noise_real_ohmic_closed_form(0.1, 1.0, kBeta2, -0.4).value.real() ==
          doctest::Approx(bath::noise_real_ohmic_closed_form(0.1, 1.0, kBeta2, 0.4)
                              .value.real())
              .epsilon(1e-15));
    // beta -> infinity: value * t^2 -> -m gamma / pi
    ThermalState cold{1e5, {}};
    const double tail =
        bath::noise_real_ohmic_closed_form(0.1, 1.0, cold, 1.0).value.real();
    CHECK(tail == doctest::Approx(-0.1 / pi).epsilon(1e-8));
    CHECK_THROWS_AS(bath::noise_real_ohmic_closed_form(0.1, 1.0, kBeta2, 0.0), domain_error);
    // the quadrature route is the arbiter of the hbar convention:
    // hbar * (per_hbar closed form) ~ Re K from J-quadrature at large cutoff
    const auto dru = SpectralDensity::drude(0.1, 200.0);
    const double quadv = bath::noise_correlation(dru, kBeta2, 0.5).value.real();
    const double closed =
        bath::noise_real_ohmic_closed_form(0.1, 1.0, kBeta2, 0.5).value.real();
    CHECK(quadv == doctest::Approx(closed).epsilon(2e-3));
}

TEST_CASE("matsubara kernel: ohmic closed form and Drude series route") {
    const double hb = kBeta2.hbar_beta();
    // ohmic at tau = hb/2: -pi m gamma/(hb)^2
    const double v = bath::matsubara_kernel(SpectralDensity::ohmic(0.1), kBeta2, 0.5 * hb);
    CHECK(v == doctest::Approx(-pi * 0.1 / (hb * hb)).epsilon(1e-14));

    const auto dru = SpectralDensity::drude(0.1, 50.0);
    // frozen reference (independent imaginary-time quadrature of -K(-i tau))
    CHECK(bath::matsubara_kernel(dru, kBeta2, 0.6) ==
          doctest::Approx(-0.1193988086935336).epsilon(1e-10));
    // periodicity k(tau) = k(hb - tau)
    CHECK(bath::matsubara_kernel(dru, kBeta2, 0.37) ==
          doctest::Approx(bath::matsubara_kernel(dru, kBeta2, hb - 0.37)).epsilon(1e-10));
    // dual route: series equals -continuum quadrature of K(-i tau)
    for (double tau : {0.2, 0.9, 1.5}) {
        CHECK(bath::matsubara_kernel(dru, kBeta2, tau) ==
              doctest::Approx(-bath::continuum_kernel_quadrature(dru, kBeta2, tau))
                  .epsilon(1e-9));
    }
    // large-cutoff approach to the ohmic closed form
    const auto dru_big = SpectralDensity::drude(0.1, 2500.0); // omega_D hbar beta = 5000
    const double tau = 0.5 * hb;
    const double closed = -pi * 0.1 / (hb * hb); // sin^2 = 1
    CHECK(bath::matsubara_kernel(dru_big, kBeta2, tau) ==
          doctest::Approx(closed).epsilon(1e-6));
    CHECK_THROWS_AS(bath::matsubara_kernel(dru, kBeta2, -0.1), domain_error);
    CHECK_THROWS_AS(bath::matsubara_kernel(dru, kBeta2, hb), domain_error);
}

TEST_CASE("zero Matsubara mode of the nonlocal kernel vanishes") {
    // equivalent statement: int_0^{hb} K(-i tau) dtau equals the delta-comb
    // weight m gamma omega_d (so comb minus kernel integrates to zero)
    const auto dru = SpectralDensity::drude(0.1, 10.0);
    const double hb = kBeta2.hbar_beta();
    const double integral = quad::de_finite(
        [&](double tau) { return bath::continuum_kernel_quadrature(dru, kBeta2, tau); },
        1e-9, hb - 1e-9, 1e-9);
    CHECK(integral == doctest::Approx(0.1 * 10.0).epsilon(1e-6));
}

TEST_CASE("single-oscillator kernel") {
    const bath::BathOscillator osc{1.3, 2.1, 1.3 * 2.1 * 2.1};
    const double hb = kBeta2.hbar_beta();
    CHECK(bath::single_oscillator_kernel(osc, kBeta2, 0.0) ==
          doctest::Approx(bath::single_oscillator_kernel(osc, kBeta2, hb)).epsilon(1e-13));
    const bath::BathOscillator stiff{1.0, 500.0, 1.0 * 500.0 * 500.0};
    CHECK(bath::single_oscillator_kernel(stiff, kBeta2, 0.5 * hb) <
          1e-30 * bath::single_oscillator_kernel(stiff, kBeta2, 0.0));
}

TEST_CASE("discrete bath reproduces continuum kernels") {
    const auto dru = SpectralDensity::drude(0.1, 5.0);
    const auto db = bath::discretize_bath(dru, 10000, 100.0);
    const double tau = 0.3 * kBeta2.hbar_beta();
    const double cont = bath::continuum_kernel_quadrature(dru, kBeta2, tau);
    CHECK(bath::discrete_kernel_sum(db, kBeta2, tau) ==
          doctest::Approx(cont).epsilon(1e-3));

    // gamma(0+) from the cosine sum vs the Drude kernel (needs a wide grid)
    const auto db_wide = bath::discretize_bath(dru, 10000, 4000.0);
    CHECK(bath::discrete_damping_kernel(db_wide, 1.0, 0.0) ==
          doctest::Approx(bath::damping_kernel_time(dru, 0.0).value).epsilon(1e-3));

    // a single-oscillator bath carries the whole bin weight
    const auto one = bath::discretize_bath(dru, 1, 10.0);
    REQUIRE(one.oscillators.size() == 1);
    const auto& o = one.oscillators.front();
    CHECK(o.coupling == doctest::Approx(o.mass * o.omega * o.omega).epsilon(1e-15));

    // total discrete mass keeps growing with count for ohmic-type J
    const auto ohm = SpectralDensity::ohmic(0.1);
    double mprev = 0.0;
    for (int count : {100, 1000, 10000}) {
        const auto d = bath::discretize_bath(ohm, count, 50.0);
        double msum = 0.0;
        for (const auto& oo : d.oscillators) msum += oo.mass;
        CHECK(msum > mprev);
        mprev = msum;
    }
}

TEST_CASE("potential renormalization and total mass") {
    CHECK(bath::potential_renormalization(SpectralDensity::drude(0.1, 10.0)) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // linear in gamma
    CHECK(bath::potential_renormalization(SpectralDensity::drude(0.2, 10.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(bath::potential_renormalization(SpectralDensity::ohmic(0.1)),
                    domain_error);

    CHECK(bath::bath_total_mass(SpectralDensity::ohmic(0.1)).infrared_divergent);
    CHECK(bath::bath_total_mass(SpectralDensity::drude(0.1, 10.0)).infrared_divergent);
    // synthetic tabulated J(w) = w^3 on [0, 1]
    CHECK(bath::total_mass_from_j([](double w) { return w * w * w; }, 1.0) ==
          doctest::Approx(2.0 / pi).epsilon(1e-8));
}
