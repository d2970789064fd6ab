#include "bilattice/transfer_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bilattice/parallel.hpp"

namespace bilattice::tmm {

namespace {

constexpr cdouble kI{0.0, 1.0};

// e^x - 1 without cancellation for small |x|.
cdouble expm1(cdouble x) {
    const double a = x.real();
    const double b = x.imag();
    const double s = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

cdouble one_minus_cos_theta(const CellResponse& cell, double d1, double d2) {
    const double k = cell.k_probe;
    const double ka = k * (d1 + d2);
    const double half = std::sin(0.5 * ka);
    return 2.0 * half * half + (cell.xi_even + cell.xi_odd) * std::sin(ka) -
           2.0 * cell.xi_even * cell.xi_odd * std::sin(k * d1) * std::sin(k * d2);
}

cdouble enforce_attenuating(cdouble theta) { return theta.imag() < 0.0 ? -theta : theta; }

cdouble theta_from_one_minus_cos(cdouble one_minus) {
    const cdouble cos_theta = 1.0 - one_minus;
    if (cos_theta.real() >= 0.0) {
        // Theta = 2 asin(sqrt((1 - cos) / 2)) is well conditioned near the band centre.
        return enforce_attenuating(2.0 * std::asin(std::sqrt(0.5 * one_minus)));
    }
    return dephasing_from_cos(cos_theta);
}

}  // namespace

PlaneResponse plane_coefficients(cdouble xi) {
    const cdouble denom = 1.0 - kI * xi;
    if (std::abs(denom) == 0.0) {
        throw DomainError("xi = -i makes the plane response singular (gain-like input)");
    }
    return {kI * xi / denom, 1.0 / denom};
}

ScatterMatrix period_matrix(cdouble xi, double distance, double k_probe) {
    if (!(distance >= 0.0)) throw DomainError("propagation distance must be non-negative");
    const auto [r, t] = plane_coefficients(xi);
    const cdouble forward = std::polar(1.0, k_probe * distance);
    const cdouble backward = std::polar(1.0, -k_probe * distance);
    const ScatterMatrix plane{(t * t - r * r) / t, r / t, -r / t, 1.0 / t};
    const ScatterMatrix propagation{forward, 0.0, 0.0, backward};
    return plane * propagation;
}

CellResponse cell_response(const LatticeConfig& cfg, double probe) {
    cfg.validate();
    const double k = probe / constants::c;
    const cdouble xi1 = xi_parameter(probe, cfg.species_even, cfg.areal_density);
    const cdouble xi2 = xi_parameter(probe, cfg.species_odd, cfg.areal_density);
    const double d1 = cfg.intracell_distance;
    const double d2 = cfg.cell_size - cfg.intracell_distance;
    return {xi1, xi2, k, period_matrix(xi1, d1, k) * period_matrix(xi2, d2, k)};
}

ScatterMatrix dimer_matrix(const LatticeConfig& cfg, double probe) {
    return cell_response(cfg, probe).dimer;
}

cdouble dephasing_from_cos(cdouble cos_theta) { return enforce_attenuating(std::acos(cos_theta)); }

Dephasing cell_dephasing(const LatticeConfig& cfg, double probe) {
    const CellResponse cell = cell_response(cfg, probe);
    const double d1 = cfg.intracell_distance;
    const double d2 = cfg.cell_size - cfg.intracell_distance;
    const double k = cell.k_probe;
    auto slice = [k](cdouble xi, double d) {
        return dephasing_from_cos(std::cos(k * d) - xi * std::sin(k * d));
    };
    return {theta_from_one_minus_cos(one_minus_cos_theta(cell, d1, d2)), slice(cell.xi_even, d1),
            slice(cell.xi_odd, d2)};
}

cdouble cos_dephasing_from_slices(const CellResponse& cell, double d1, double d2) {
    const double k = cell.k_probe;
    const double s1 = std::sin(k * d1), c1 = std::cos(k * d1);
    const double s2 = std::sin(k * d2), c2 = std::cos(k * d2);
    const cdouble x1 = cell.xi_even, x2 = cell.xi_odd;
    const cdouble t1 = std::acos(c1 - x1 * s1);
    const cdouble t2 = std::acos(c2 - x2 * s2);
    const cdouble remainder = s1 * s2 * (1.0 - x1 * x2) + x1 * c1 * s2 + x2 * s1 * c2;
    return std::cos(t1 + t2) + std::sin(t1) * std::sin(t2) - remainder;
}

StackResponse stack_response(const ScatterMatrix& cell, cdouble theta, std::uint64_t n) {
    if (n == 0) throw DomainError("cell count n must be >= 1");
    theta = enforce_attenuating(theta);
    const double nn = static_cast<double>(n);

    // S = sum_{k<n} z^{2k}, with L = 2 i Theta reduced by multiples of 2 pi i.
    const double m = std::round(theta.real() / constants::pi);
    const cdouble reduced = 2.0 * kI * (theta - m * constants::pi);
    const cdouble denom = expm1(reduced);
    const cdouble sum = (std::abs(denom) == 0.0) ? cdouble(nn) : expm1(nn * reduced) / denom;

    const cdouble z_inv = std::exp(-kI * theta);
    const cdouble z_pow = std::exp(kI * (nn - 1.0) * theta);        // z^{n-1}
    const cdouble z_pow2 = std::exp(kI * (2.0 * nn - 1.0) * theta);  // z^{2n-1}
    const cdouble h = 0.5 * (cell.m22 - cell.m11);
    const cdouble scaled_m22 = 0.5 * (z_pow2 + z_inv) + h * sum;  // z^{n-1} (M^n)_22
    if (std::abs(scaled_m22) == 0.0 || !std::isfinite(std::abs(scaled_m22))) {
        throw NumericError("matrix power element (M^n)_22 vanished");
    }
    return {z_pow / scaled_m22, cell.m12 * sum / scaled_m22};
}

cdouble transmission_closed_form(const LatticeConfig& cfg, double probe, std::uint64_t n) {
    const Dephasing theta = cell_dephasing(cfg, probe);
    return stack_response(dimer_matrix(cfg, probe), theta.cell, n).t;
}

AsymptoticTransmission transmission_asymptotic(const LatticeConfig& cfg, double probe,
                                               std::uint64_t n) {
    const ScatterMatrix cell = dimer_matrix(cfg, probe);
    const cdouble theta = cell_dephasing(cfg, probe).cell;
    const cdouble s = std::sin(theta);
    const cdouble h = 0.5 * (cell.m22 - cell.m11);
    const cdouble value = 2.0 * std::exp(kI * static_cast<double>(n) * theta) * s / (s + kI * h);
    const double offset = std::abs(theta.real() - constants::pi * std::round(theta.real() / constants::pi));
    return {value, theta.imag() > offset};
}

std::vector<SpectrumPoint> spectrum_scan(const LatticeConfig& cfg,
                                         const std::vector<double>& probe_grid,
                                         double reference, unsigned workers) {
    if (probe_grid.empty()) throw DomainError("probe grid is empty");
    cfg.validate();
    const double gamma = cfg.species_even.linewidth();
    const auto n = static_cast<std::uint64_t>(cfg.cell_count);
    return parallel_map(probe_grid.size(), workers, [&](std::size_t i) {
        const double probe = probe_grid[i];
        const CellResponse cell = cell_response(cfg, probe);
        const cdouble theta = cell_dephasing(cfg, probe).cell;
        const StackResponse stack = stack_response(cell.dimer, theta, n);
        const double transmittance = std::norm(stack.t);
        const double reflectance = std::norm(stack.r);
        return SpectrumPoint{probe, (probe - reference) / gamma, transmittance, reflectance,
                             1.0 - transmittance - reflectance};
    });
}

}  // namespace bilattice::tmm
