// Physical constants, atomic species and lattice geometry shared by all engines.
#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace bilattice {

using cdouble = std::complex<double>;

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double c = 299'792'458.0;            // m/s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double hbar = 1.054571817e-34;       // J s
}  // namespace constants

/// Raised for inputs outside the validity domain of a formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a numerical procedure cannot produce a finite answer.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed or inconsistent user configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Warning sink. Defaults to stderr; tests may silence it.
void warn(std::string_view message);
void set_warning_handler(void (*handler)(std::string_view));

/// One dipolar transition. Exactly one of cross section or dipole moment is
/// supplied at construction; the other is derived from
/// cross_section = 2 omega D^2 / (epsilon0 hbar c gamma).
class AtomSpecies {
public:
    /// Species with the radiative resonant cross section 3 lambda^2 / (2 pi).
    static AtomSpecies from_wavelength(double wavelength_m, double linewidth_rad_s);
    static AtomSpecies with_cross_section(double frequency_rad_s, double linewidth_rad_s,
                                          double cross_section_m2);
    static AtomSpecies with_dipole(double frequency_rad_s, double linewidth_rad_s,
                                   double dipole_cm);

    /// Same transition shifted to another frequency (light shift, other
    /// hyperfine state); keeps the dipole moment.
    [[nodiscard]] AtomSpecies shifted_to(double frequency_rad_s) const;

    [[nodiscard]] double frequency() const { return omega_; }
    [[nodiscard]] double linewidth() const { return gamma_; }
    [[nodiscard]] double wavelength() const { return 2.0 * constants::pi * constants::c / omega_; }
    [[nodiscard]] double cross_section() const { return cross_section_; }
    [[nodiscard]] double dipole_moment() const { return dipole_; }

private:
    AtomSpecies(double omega, double gamma, double cross_section, double dipole);
    double omega_;
    double gamma_;
    double cross_section_;
    double dipole_;
};

/// 85Rb D2 line with the values used throughout: 780 nm, gamma = 2 pi x 6 MHz.
AtomSpecies rb85_d2();

struct LatticeConfig {
    double cell_size = 780e-9;           // a (m)
    double intracell_distance = 0.0;     // rho (m), 0 <= rho <= a
    long long cell_count = 1000;         // M; the lattice has N = 2M planes
    double areal_density = 5.7e10;       // n_s (m^-2)
    AtomSpecies species_even = rb85_d2();  // planes x = l a
    AtomSpecies species_odd = rb85_d2();   // planes x = l a + rho
    double mode_area = constants::pi * 25e-12 / 4.0;  // A_eff (m^2), 5 um waist

    /// Throws DomainError naming the violated invariant.
    void validate() const;
    /// Position of plane j (0-based): x_{2l} = l a, x_{2l+1} = l a + rho.
    [[nodiscard]] double plane_position(long long j) const;
    [[nodiscard]] double reciprocal_vector() const { return 2.0 * constants::pi / cell_size; }
};

/// Gaussian-mode effective area pi w^2 / 4.
double gaussian_mode_area(double waist_m);

/// Well spacings of U(x) ~ beta^2 cos^2(kx/2) + cos^2(kx); d1 + d2 = lambda.
std::pair<double, double> beta_to_spacings(double beta, double wavelength_m);

/// Lorentzian polarizability (3 / 4 pi^2) lambda_p^3 (2 delta/gamma + i) / (1 + 4 delta^2/gamma^2),
/// delta = omega_j - omega_p, returned in m^3 (i.e. divided by epsilon0 / hbar).
cdouble polarizability(double probe_rad_s, const AtomSpecies& species);

/// Dimensionless plane strength xi. The 4 pi of the Gaussian-form field equation is
/// absorbed here, so on resonance xi = i n_s sigma0 / 2 (Beer-law thin sheet).
cdouble xi_parameter(double probe_rad_s, const AtomSpecies& species, double areal_density);

/// |G| = omega_j D sqrt(1 / (2 V epsilon0 hbar omega_k)) for field polarization parallel
/// to the dipole.
double freespace_coupling(const AtomSpecies& species, double mode_rad_s, double volume_m3);

/// sqrt(M) |G| with V = A_eff M a; independent of M.
double collective_freespace_coupling(const AtomSpecies& species, double mode_rad_s,
                                     double mode_area_m2, double cell_size_m);

struct CavityGeometry {
    double length;  // L (m)
    double waist;   // w_c (m)
    double occupancy = 1.0;  // mean atoms per site n̄
};

/// g = sqrt(sigma / (4 pi A)) sqrt(gamma * 2 pi c / L), A = pi w^2 / 4, times sqrt(n̄).
double cavity_coupling(const AtomSpecies& species, const CavityGeometry& cavity);

}  // namespace bilattice
