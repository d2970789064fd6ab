// Probe transmission and reflection of a finite two-atom lattice with absorption,
// from 2x2 unimodular transfer matrices and their Chebyshev powers.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "bilattice/core.hpp"

namespace bilattice::tmm {

/// Maps left-side (forward, backward) amplitudes to right-side ones.
struct ScatterMatrix {
    cdouble m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    [[nodiscard]] cdouble det() const { return m11 * m22 - m12 * m21; }
    [[nodiscard]] cdouble half_trace() const { return 0.5 * (m11 + m22); }
    [[nodiscard]] cdouble transmission() const { return 1.0 / m22; }
    [[nodiscard]] cdouble reflection() const { return m12 / m22; }

    friend ScatterMatrix operator*(const ScatterMatrix& a, const ScatterMatrix& b) {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
};

struct PlaneResponse {
    cdouble r;
    cdouble t;
};

/// r = i xi / (1 - i xi), t = 1 / (1 - i xi). xi = -i is singular.
PlaneResponse plane_coefficients(cdouble xi);

/// Plane followed by free propagation over d.
ScatterMatrix period_matrix(cdouble xi, double distance, double k_probe);

/// Per-frequency quantities of one cell.
struct CellResponse {
    cdouble xi_even;
    cdouble xi_odd;
    double k_probe;
    ScatterMatrix dimer;  // M_{d1} M_{d2}, d1 = rho, d2 = a - rho
};

CellResponse cell_response(const LatticeConfig& cfg, double probe_rad_s);
ScatterMatrix dimer_matrix(const LatticeConfig& cfg, double probe_rad_s);

struct Dephasing {
    cdouble cell;   // Theta, Im >= 0
    cdouble even;   // Theta_1 of the slice (xi_1, d1)
    cdouble odd;    // Theta_2 of the slice (xi_2, d2)
};

/// Cell and slice dephasings. cos Theta equals half the trace of the dimer matrix;
/// it is evaluated from the closed form
///   1 - cos Theta = 2 sin^2(k a / 2) + (xi1 + xi2) sin k a - 2 xi1 xi2 sin k d1 sin k d2
/// so that Theta stays accurate near the band centre.
Dephasing cell_dephasing(const LatticeConfig& cfg, double probe_rad_s);

/// Principal-branch Theta from cos Theta with Im Theta >= 0.
cdouble dephasing_from_cos(cdouble cos_theta);

/// Exact slice decomposition cos Theta = cos(T1 + T2) + sin T1 sin T2 - X with
/// X = s1 s2 (1 - xi1 xi2) + xi1 c1 s2 + xi2 s1 c2, s_j = sin k d_j, c_j = cos k d_j.
cdouble cos_dephasing_from_slices(const CellResponse& cell, double d1, double d2);

struct StackResponse {
    cdouble t;
    cdouble r;
};

/// t_n = 1 / (M^n)_22 and r_n = (M^n)_12 / (M^n)_22 by the Chebyshev identity for
/// unimodular powers, evaluated with z = e^{i Theta} so that no term overflows.
/// Handles the degenerate sin Theta = 0 case as the limit U_{n-1} -> +-n.
StackResponse stack_response(const ScatterMatrix& cell, cdouble theta, std::uint64_t n);

cdouble transmission_closed_form(const LatticeConfig& cfg, double probe_rad_s, std::uint64_t n);

struct AsymptoticTransmission {
    cdouble value;
    bool valid;  // Im Theta exceeds the distance of Re Theta from the nearest multiple of pi
};

/// Large-n limit 2 e^{i n Theta} sin Theta / (sin Theta + i (M22 - M11) / 2).
AsymptoticTransmission transmission_asymptotic(const LatticeConfig& cfg, double probe_rad_s,
                                               std::uint64_t n);

struct SpectrumPoint {
    double probe;     // rad/s
    double detuning;  // (omega_p - omega_ref) / gamma_1
    double transmittance;
    double reflectance;
    double absorbance;
};

/// Spectrum of the n = cell_count stack on the given probe grid; detunings are
/// reported relative to `reference_rad_s` in units of the even-site linewidth.
std::vector<SpectrumPoint> spectrum_scan(const LatticeConfig& cfg,
                                         const std::vector<double>& probe_grid,
                                         double reference_rad_s, unsigned workers = 1);

}  // namespace bilattice::tmm
