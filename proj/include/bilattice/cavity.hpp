// Driven single-mode cavity containing the two-atom lattice: mean-field steady state
// of the linearized Heisenberg-Langevin equations, dressed eigenfrequencies and the
// output photon flux.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bilattice/core.hpp"

namespace bilattice::cavity {

struct CavityConfig {
    double mode_frequency = 0.0;          // omega_c (rad/s)
    std::optional<double> linewidth;      // kappa (rad/s); derived from the finesse when absent
    double length = 0.0;                  // L (m)
    std::optional<double> finesse;        // F
    double waist = 0.0;                   // w_c (m)
    double phase = 0.0;                   // phi (rad)
    double pump = 1.0;                    // eta (s^-1)
    double occupancy = 1.0;               // atoms per site
    double plane_count = 2.0;             // N; M = N / 2 cells
    double cell_size = 0.0;               // a (m)
    bool commensurate = false;            // cavity wave number k = mode_index * pi / a
    int mode_index = 2;
    std::optional<double> mirror_reflectivity;  // metadata only
    AtomSpecies species_even = rb85_d2();
    AtomSpecies species_odd = rb85_d2();

    /// Throws DomainError.
    void validate() const;
    /// Warns when kappa and pi c / (L F) differ by more than 20 %.
    void check_consistency() const;
    [[nodiscard]] double kappa() const;
    [[nodiscard]] double cells() const { return 0.5 * plane_count; }
    /// Cavity wave number mode_index * pi / a.
    [[nodiscard]] double wave_number() const;
    /// Spin-wave momentum excited in the commensurate case: 0 or pi / a.
    [[nodiscard]] double selected_momentum() const;
    [[nodiscard]] double coupling_even() const;
    [[nodiscard]] double coupling_odd() const;
};

/// Incommensurate: (g1^2 + g2^2) / 2. Commensurate: g1^2 cos^2 phi + g2^2 cos^2(k rho + phi).
double collective_R(double g1, double g2, double k, double rho, double phi, bool commensurate);

/// M R / (2 kappa gamma).
double cooperativity(double m_r, double kappa, double gamma);

struct Eigenfrequencies {
    cdouble nu0;
    cdouble nu_plus;
    cdouble nu_minus;
};

/// Dressed frequencies in the frame rotating at the probe; delta_c = omega_c - omega_p,
/// delta = omega_a - omega_p. nu0 is the uncoupled spin wave.
Eigenfrequencies eigenfrequencies(double delta_c, double delta, double kappa, double gamma,
                                  double cells, double r);

/// Same from a configuration; refuses unequal transitions or linewidths.
Eigenfrequencies eigenfrequencies(const CavityConfig& cfg, double probe_rad_s, double rho);

/// Mean amplitudes for b_{+Q}, b_{-Q}, d_{+Q}, d_{-Q}. In the commensurate case only
/// the standing-wave combination is excited and the -Q slots mirror the +Q ones.
struct SteadyState {
    cdouble a;
    cdouble b_plus;
    cdouble b_minus;
    cdouble d_plus;
    cdouble d_minus;
};

/// Solves the 5x5 linear system for general detunings and linewidths.
SteadyState steady_state(const CavityConfig& cfg, double probe_rad_s, double rho);

/// 2 kappa |a|^2 in photons/s.
double output_intensity(const CavityConfig& cfg, double probe_rad_s, double rho);

/// Closed form 2 kappa eta^2 |kappa + i delta_c + M R / (gamma/2 + i delta)|^-2 for
/// equal transitions.
double output_intensity_closed_form(const CavityConfig& cfg, double probe_rad_s, double rho);

struct Peak {
    double position;
    double height;
};

/// Local maxima of y(x), each refined by a parabola through its neighbours.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y);

/// (omega_c + omega_a)/2 -+ sqrt(((omega_c - omega_a)/2)^2 + M R).
std::array<double, 2> rabi_peaks(double omega_c, double omega_a, double m_r);

struct CavityPoint {
    double probe;       // rad/s
    double detuning;    // (omega_p - omega_even) / gamma_even
    double intensity;   // photons/s
    double normalized;  // intensity * kappa / (2 eta^2); 1 at an empty-cavity resonance
};

struct CavitySpectrum {
    double rho;
    double phase;
    double m_r;  // rad^2/s^2
    std::vector<CavityPoint> points;
    std::vector<Peak> peaks;       // positions in rad/s
    std::array<double, 2> predicted;  // Rabi peak positions in rad/s
};

/// One spectrum per (rho, phi), rho-major. Warns when the probe step exceeds kappa / 5.
std::vector<CavitySpectrum> cavity_spectrum_scan(const CavityConfig& cfg,
                                                 const std::vector<double>& probe_grid,
                                                 const std::vector<double>& rho_grid,
                                                 const std::vector<double>& phase_grid,
                                                 unsigned workers = 1);

}  // namespace bilattice::cavity
