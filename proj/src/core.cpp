#include "bilattice/core.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace bilattice {

namespace {

void default_warning(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

void (*g_warning_handler)(std::string_view) = &default_warning;

double radiative_cross_section(double wavelength) {
    return 3.0 * wavelength * wavelength / (2.0 * constants::pi);
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

void warn(std::string_view message) { g_warning_handler(message); }

void set_warning_handler(void (*handler)(std::string_view)) {
    g_warning_handler = handler ? handler : &default_warning;
}

AtomSpecies::AtomSpecies(double omega, double gamma, double cross_section, double dipole)
    : omega_(omega), gamma_(gamma), cross_section_(cross_section), dipole_(dipole) {}

AtomSpecies AtomSpecies::with_cross_section(double frequency, double linewidth,
                                            double cross_section) {
    require_positive(frequency, "transition frequency");
    require_positive(linewidth, "linewidth");
    if (!(cross_section >= 0.0)) throw DomainError("cross section must be non-negative");
    const double dipole = std::sqrt(cross_section * constants::epsilon0 * constants::hbar *
                                    constants::c * linewidth / (2.0 * frequency));
    return {frequency, linewidth, cross_section, dipole};
}

AtomSpecies AtomSpecies::with_dipole(double frequency, double linewidth, double dipole) {
    require_positive(frequency, "transition frequency");
    require_positive(linewidth, "linewidth");
    if (!(dipole >= 0.0)) throw DomainError("dipole moment must be non-negative");
    const double cross_section = 2.0 * frequency * dipole * dipole /
                                 (constants::epsilon0 * constants::hbar * constants::c * linewidth);
    return {frequency, linewidth, cross_section, dipole};
}

AtomSpecies AtomSpecies::from_wavelength(double wavelength, double linewidth) {
    require_positive(wavelength, "wavelength");
    const double omega = 2.0 * constants::pi * constants::c / wavelength;
    return with_cross_section(omega, linewidth, radiative_cross_section(wavelength));
}

AtomSpecies AtomSpecies::shifted_to(double frequency) const {
    return with_dipole(frequency, gamma_, dipole_);
}

AtomSpecies rb85_d2() { return AtomSpecies::from_wavelength(780e-9, 2.0 * constants::pi * 6e6); }

void LatticeConfig::validate() const {
    require_positive(cell_size, "cell_size a");
    if (!(intracell_distance >= 0.0 && intracell_distance <= cell_size)) {
        throw DomainError("intracell distance must satisfy 0 <= rho <= a");
    }
    if (cell_count < 1) throw DomainError("cell count M must be >= 1");
    require_positive(areal_density, "areal density n_s");
    require_positive(mode_area, "mode area A_eff");
}

double LatticeConfig::plane_position(long long j) const {
    const auto cell = static_cast<double>(j / 2);
    return cell * cell_size + ((j % 2 == 0) ? 0.0 : intracell_distance);
}

double gaussian_mode_area(double waist) {
    require_positive(waist, "waist");
    return constants::pi * waist * waist / 4.0;
}

std::pair<double, double> beta_to_spacings(double beta, double wavelength) {
    const double arg = -beta * beta / 4.0;
    if (!(arg >= -1.0)) {
        std::ostringstream msg;
        msg << "beta^2 = " << beta * beta << " exceeds 4: no double-well lattice";
        throw DomainError(msg.str());
    }
    const double d2 = wavelength / constants::pi * std::acos(arg);
    return {wavelength - d2, d2};
}

cdouble polarizability(double probe, const AtomSpecies& species) {
    require_positive(probe, "probe frequency");
    const double lambda_p = 2.0 * constants::pi * constants::c / probe;
    const double s = 2.0 * (species.frequency() - probe) / species.linewidth();
    const double prefactor = 3.0 / (4.0 * constants::pi * constants::pi) * lambda_p * lambda_p * lambda_p;
    return prefactor * cdouble(s, 1.0) / (1.0 + s * s);
}

cdouble xi_parameter(double probe, const AtomSpecies& species, double areal_density) {
    if (!(areal_density >= 0.0)) throw DomainError("areal density must be non-negative");
    const double k = probe / constants::c;
    return 2.0 * constants::pi * k * areal_density * polarizability(probe, species) /
           (4.0 * constants::pi);
}

double freespace_coupling(const AtomSpecies& species, double mode, double volume) {
    require_positive(mode, "mode frequency");
    require_positive(volume, "quantization volume");
    return species.frequency() * species.dipole_moment() *
           std::sqrt(1.0 / (2.0 * volume * constants::epsilon0 * constants::hbar * mode));
}

double collective_freespace_coupling(const AtomSpecies& species, double mode, double mode_area,
                                     double cell_size) {
    // M G^2 with V = A M a; the cell count drops out.
    require_positive(mode, "mode frequency");
    require_positive(mode_area, "mode area");
    require_positive(cell_size, "cell size");
    const double d = species.dipole_moment();
    return species.frequency() * d /
           std::sqrt(2.0 * mode_area * cell_size * constants::epsilon0 * constants::hbar * mode);
}

double cavity_coupling(const AtomSpecies& species, const CavityGeometry& cavity) {
    require_positive(cavity.length, "cavity length");
    require_positive(cavity.waist, "cavity waist");
    if (!(cavity.occupancy >= 0.0)) throw DomainError("occupancy must be non-negative");
    const double area = constants::pi * cavity.waist * cavity.waist / 4.0;
    const double free_spectral_range = 2.0 * constants::pi * constants::c / cavity.length;
    return std::sqrt(species.cross_section() / (4.0 * constants::pi * area)) *
           std::sqrt(species.linewidth() * free_spectral_range) * std::sqrt(cavity.occupancy);
}

}  // namespace bilattice
