#include <doctest.h>

#include <cmath>

#include "bilattice/core.hpp"
#include "support.hpp"

using namespace bilattice;
using testing::rel_err;

TEST_CASE("Rb D2 preset carries the radiative cross section and a consistent dipole") {
    const AtomSpecies rb = rb85_d2();
    const double lambda = 780e-9;
    CHECK(rel_err(rb.wavelength(), lambda) < 1e-14);
    CHECK(rel_err(rb.linewidth(), 2.0 * constants::pi * 6e6) < 1e-15);
    CHECK(rel_err(rb.cross_section(), 3.0 * lambda * lambda / (2.0 * constants::pi)) < 1e-14);
    // Wigner-Weisskopf: gamma = omega^3 D^2 / (3 pi eps0 hbar c^3).
    const double w = rb.frequency();
    const double d = rb.dipole_moment();
    const double gamma_ww = w * w * w * d * d /
                            (3.0 * constants::pi * constants::epsilon0 * constants::hbar * std::pow(constants::c, 3));
    CHECK(rel_err(gamma_ww, rb.linewidth()) < 1e-12);
}

TEST_CASE("species constructors round-trip between dipole and cross section") {
    const AtomSpecies a = AtomSpecies::with_cross_section(2.4e15, 3.7e7, 1.1e-13);
    const AtomSpecies b = AtomSpecies::with_dipole(2.4e15, 3.7e7, a.dipole_moment());
    CHECK(rel_err(b.cross_section(), 1.1e-13) < 1e-13);
    const AtomSpecies shifted = a.shifted_to(2.5e15);
    CHECK(shifted.dipole_moment() == doctest::Approx(a.dipole_moment()).epsilon(1e-15));
    CHECK(shifted.frequency() == 2.5e15);
    CHECK_THROWS_AS(AtomSpecies::with_dipole(-1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(AtomSpecies::with_cross_section(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("polarizability is a Lorentzian in the probe detuning") {
    const AtomSpecies rb = rb85_d2();
    const double g = rb.linewidth();
    const cdouble on = polarizability(rb.frequency(), rb);
    CHECK(std::abs(on.real()) < 1e-12 * std::abs(on));
    const cdouble half = polarizability(rb.frequency() + 0.5 * g, rb);
    // At delta = gamma/2 the imaginary part halves and |Re| = Im.
    CHECK(rel_err(half.imag(), 0.5 * on.imag()) < 1e-6);
    CHECK(rel_err(std::abs(half.real()), half.imag()) < 1e-6);
    // Red of resonance (omega_p < omega_j) the real part is positive.
    CHECK(polarizability(rb.frequency() - 3.0 * g, rb).real() > 0.0);
}

TEST_CASE("xi on resonance equals i n_s sigma0 / 2") {
    const AtomSpecies rb = rb85_d2();
    const double ns = 5.7e10;
    const cdouble xi = xi_parameter(rb.frequency(), rb, ns);
    CHECK(std::abs(xi.real()) < 1e-12);
    CHECK(rel_err(xi.imag(), 0.5 * ns * rb.cross_section()) < 1e-12);
    CHECK(xi_parameter(rb.frequency(), rb, 0.0) == cdouble(0.0));
}

TEST_CASE("beta spacings match the minima of the double-well potential") {
    const double lambda = 1.0;
    for (double beta : {0.0, 0.5, 1.0, 1.5, 1.9}) {
        const auto [d1, d2] = beta_to_spacings(beta, lambda);
        CHECK(d1 + d2 == doctest::Approx(lambda).epsilon(1e-14));
        // Oracle: locate the minima of U(x) = beta^2 cos^2(pi x) + cos^2(2 pi x) on [0, 1).
        const int n = 2000000;
        // The potential is symmetric about x = 1/2, with one minimum in each half.
        auto u = [&](double x) {
            const double c1 = std::cos(constants::pi * x);
            const double c2 = std::cos(2.0 * constants::pi * x);
            return beta * beta * c1 * c1 + c2 * c2;
        };
        std::vector<double> minima;
        for (int half = 0; half < 2; ++half) {
            double best_x = 0.0;
            double best_u = 1e300;
            for (int i = 0; i < n / 2; ++i) {
                const double x = 0.5 * half + (i + 0.5) / n;
                if (u(x) < best_u) {
                    best_u = u(x);
                    best_x = x;
                }
            }
            minima.push_back(best_x);
        }
        const double gap = minima[1] - minima[0];
        const double shorter = std::min(gap, 1.0 - gap);
        CHECK(std::abs(shorter - std::min(d1, d2)) < 2e-6);
    }
    CHECK(beta_to_spacings(0.0, 1.0).first == doctest::Approx(0.5));
    CHECK(beta_to_spacings(2.0, 1.0).first == doctest::Approx(0.0).epsilon(1e-7));
    CHECK_THROWS_AS(beta_to_spacings(2.01, 1.0), DomainError);
}

TEST_CASE("collective free-space coupling is sqrt(M) G with V = A M a") {
    const AtomSpecies rb = rb85_d2();
    const double area = gaussian_mode_area(5e-6);
    const double a = 780e-9;
    const double w = rb.frequency();
    for (double m : {1.0, 100.0, 1e6}) {
        CHECK(rel_err(std::sqrt(m) * freespace_coupling(rb, w, area * m * a),
                      collective_freespace_coupling(rb, w, area, a)) < 1e-12);
    }
    // M G^2 = omega_j sigma c gamma / (4 A a omega_k).
    const double g = collective_freespace_coupling(rb, 1.1 * w, area, a);
    const double expected = w * rb.cross_section() * constants::c * rb.linewidth() / (4.0 * area * a * 1.1 * w);
    CHECK(rel_err(g * g, expected) < 1e-12);
    CHECK(gaussian_mode_area(2.0) == doctest::Approx(constants::pi));
}

TEST_CASE("cavity coupling for the reference resonator") {
    const AtomSpecies rb = rb85_d2();
    const CavityGeometry cav{0.085, 130e-6, 3000.0};
    const double g = cavity_coupling(rb, cav);
    const double area = constants::pi * 130e-6 * 130e-6 / 4.0;
    const double expected = std::sqrt(rb.cross_section() / (4.0 * constants::pi * area)) *
                            std::sqrt(rb.linewidth() * 2.0 * constants::pi * constants::c / 0.085) *
                            std::sqrt(3000.0);
    CHECK(rel_err(g, expected) < 1e-14);
    CHECK(g / rb.linewidth() == doctest::Approx(1.7525).epsilon(1e-3));
    CHECK(cavity_coupling(rb, {0.085, 130e-6, 0.0}) == 0.0);
    CHECK_THROWS_AS(cavity_coupling(rb, {0.0, 130e-6, 1.0}), DomainError);
}

TEST_CASE("lattice validation and plane positions") {
    LatticeConfig cfg = testing::rb_lattice(0.2);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.plane_position(0) == 0.0);
    CHECK(cfg.plane_position(1) == doctest::Approx(0.2 * cfg.cell_size));
    CHECK(cfg.plane_position(4) == doctest::Approx(2.0 * cfg.cell_size));
    CHECK(cfg.plane_position(5) == doctest::Approx(2.2 * cfg.cell_size));
    cfg.intracell_distance = 1.1 * cfg.cell_size;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = testing::rb_lattice(0.2);
    cfg.cell_count = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = testing::rb_lattice(0.2);
    cfg.areal_density = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("warnings go to the installed handler") {
    testing::WarningCapture capture;
    warn("hello");
    CHECK(capture.contains("hello"));
}
