#include "bilattice/cavity.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "bilattice/parallel.hpp"

namespace bilattice::cavity {

namespace {

constexpr cdouble kI{0.0, 1.0};

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

double total_r(const CavityConfig& cfg, double rho) {
    return collective_R(cfg.coupling_even(), cfg.coupling_odd(), cfg.wave_number(), rho,
                        cfg.phase, cfg.commensurate);
}

}  // namespace

void CavityConfig::validate() const {
    require_positive(mode_frequency, "cavity mode frequency");
    require_positive(length, "cavity length");
    require_positive(waist, "cavity waist");
    require_positive(cell_size, "cell size");
    require_positive(plane_count, "plane count");
    if (!(occupancy >= 0.0)) throw DomainError("occupancy must be non-negative");
    if (!std::isfinite(pump)) throw DomainError("pump must be finite");
    if (mode_index < 1) throw DomainError("mode index must be >= 1");
    if (finesse) require_positive(*finesse, "finesse");
    if (linewidth) require_positive(*linewidth, "cavity linewidth kappa");
    if (!linewidth && !finesse) throw DomainError("cavity needs a linewidth or a finesse");
}

void CavityConfig::check_consistency() const {
    if (linewidth && finesse) {
        const double from_finesse = constants::pi * constants::c / (length * *finesse);
        if (std::abs(*linewidth - from_finesse) > 0.2 * *linewidth) {
            std::ostringstream msg;
            msg << "cavity linewidth " << *linewidth << " rad/s differs from pi c/(L F) = "
                << from_finesse << " rad/s by more than 20%; using the linewidth";
            warn(msg.str());
        }
    }
}

double CavityConfig::kappa() const {
    if (linewidth) return *linewidth;
    if (finesse) return constants::pi * constants::c / (length * *finesse);
    throw DomainError("cavity needs a linewidth or a finesse");
}

double CavityConfig::wave_number() const { return mode_index * constants::pi / cell_size; }

double CavityConfig::selected_momentum() const {
    return (mode_index % 2 == 0) ? 0.0 : constants::pi / cell_size;
}

double CavityConfig::coupling_even() const {
    return cavity_coupling(species_even, {length, waist, occupancy});
}

double CavityConfig::coupling_odd() const {
    return cavity_coupling(species_odd, {length, waist, occupancy});
}

double collective_R(double g1, double g2, double k, double rho, double phi, bool commensurate) {
    if (!commensurate) return 0.5 * (g1 * g1 + g2 * g2);
    const double c1 = std::cos(phi);
    const double c2 = std::cos(k * rho + phi);
    return g1 * g1 * c1 * c1 + g2 * g2 * c2 * c2;
}

double cooperativity(double m_r, double kappa, double gamma) {
    require_positive(kappa, "kappa");
    require_positive(gamma, "gamma");
    return m_r / (2.0 * kappa * gamma);
}

Eigenfrequencies eigenfrequencies(double delta_c, double delta, double kappa, double gamma,
                                  double cells, double r) {
    const cdouble mean = 0.5 * (delta_c + delta - kI * (kappa + 0.5 * gamma));
    const cdouble half_split = 0.5 * (delta_c - delta - kI * kappa + kI * 0.5 * gamma);
    const cdouble root = std::sqrt(half_split * half_split + cells * r);
    return {delta - kI * 0.5 * gamma, mean + root, mean - root};
}

Eigenfrequencies eigenfrequencies(const CavityConfig& cfg, double probe, double rho) {
    cfg.validate();
    const double w1 = cfg.species_even.frequency();
    const double w2 = cfg.species_odd.frequency();
    const double g1 = cfg.species_even.linewidth();
    const double g2 = cfg.species_odd.linewidth();
    if (std::abs(w1 - w2) > 1e-12 * w1 || std::abs(g1 - g2) > 1e-12 * g1) {
        throw DomainError("closed-form eigenfrequencies need equal transitions and linewidths; "
                          "use the steady state instead");
    }
    return eigenfrequencies(cfg.mode_frequency - probe, w1 - probe, cfg.kappa(), g1, cfg.cells(),
                            total_r(cfg, rho));
}

SteadyState steady_state(const CavityConfig& cfg, double probe, double rho) {
    cfg.validate();
    const double m_sqrt = std::sqrt(cfg.cells());
    const double g1 = cfg.coupling_even();
    const double g2 = cfg.coupling_odd();
    const double odd_phase = cfg.wave_number() * rho + cfg.phase;

    // Couplings of a to (b+, b-, d+, d-); H contains G a^dag s + h.c.
    std::array<cdouble, 4> couplings{};
    if (cfg.commensurate) {
        couplings = {m_sqrt * g1 * std::cos(cfg.phase), 0.0, m_sqrt * g2 * std::cos(odd_phase), 0.0};
    } else {
        couplings = {0.5 * m_sqrt * g1 * std::polar(1.0, cfg.phase),
                     0.5 * m_sqrt * g1 * std::polar(1.0, -cfg.phase),
                     0.5 * m_sqrt * g2 * std::polar(1.0, odd_phase),
                     0.5 * m_sqrt * g2 * std::polar(1.0, -odd_phase)};
    }
    const std::array<const AtomSpecies*, 4> species{&cfg.species_even, &cfg.species_even,
                                                    &cfg.species_odd, &cfg.species_odd};

    Eigen::Matrix<cdouble, 5, 5> system = Eigen::Matrix<cdouble, 5, 5>::Zero();
    Eigen::Matrix<cdouble, 5, 1> drive = Eigen::Matrix<cdouble, 5, 1>::Zero();
    system(0, 0) = cfg.kappa() + kI * (cfg.mode_frequency - probe);
    drive(0) = cfg.pump;
    for (int s = 0; s < 4; ++s) {
        const int row = s + 1;
        if (cfg.commensurate && (s == 1 || s == 3)) {
            // The -Q slot is the same standing-wave operator as the +Q slot.
            system(row, row) = 1.0;
            system(row, row - 1) = -1.0;
            continue;
        }
        system(0, row) = kI * couplings[s];
        system(row, row) = 0.5 * species[s]->linewidth() + kI * (species[s]->frequency() - probe);
        system(row, 0) = kI * std::conj(couplings[s]);
    }

    Eigen::FullPivLU<Eigen::Matrix<cdouble, 5, 5>> lu(system);
    if (!lu.isInvertible()) {
        std::ostringstream msg;
        msg << "singular steady-state system at probe " << probe << " rad/s";
        throw NumericError(msg.str());
    }
    const Eigen::Matrix<cdouble, 5, 1> x = lu.solve(drive);
    for (int i = 0; i < 5; ++i) {
        if (!std::isfinite(x(i).real()) || !std::isfinite(x(i).imag())) {
            throw NumericError("non-finite steady-state amplitude");
        }
    }
    return {x(0), x(1), x(2), x(3), x(4)};
}

double output_intensity(const CavityConfig& cfg, double probe, double rho) {
    return 2.0 * cfg.kappa() * std::norm(steady_state(cfg, probe, rho).a);
}

double output_intensity_closed_form(const CavityConfig& cfg, double probe, double rho) {
    cfg.validate();
    const double kappa = cfg.kappa();
    const double gamma = cfg.species_even.linewidth();
    const double delta = cfg.species_even.frequency() - probe;
    const cdouble denom = kappa + kI * (cfg.mode_frequency - probe) +
                          cfg.cells() * total_r(cfg, rho) / (0.5 * gamma + kI * delta);
    return 2.0 * kappa * cfg.pump * cfg.pump / std::norm(denom);
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("peak search needs equal-length x and y");
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        const double h = x[i + 1] - x[i];
        const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
        Peak p{x[i], y[i]};
        if (curvature < 0.0 && std::abs(x[i] - x[i - 1] - h) <= 1e-9 * std::abs(h)) {
            const double shift = 0.5 * (y[i - 1] - y[i + 1]) / curvature;
            p.position = x[i] + shift * h;
            p.height = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift;
        }
        peaks.push_back(p);
    }
    return peaks;
}

std::array<double, 2> rabi_peaks(double omega_c, double omega_a, double m_r) {
    const double centre = 0.5 * (omega_c + omega_a);
    const double half = 0.5 * (omega_c - omega_a);
    const double split = std::sqrt(half * half + m_r);
    return {centre - split, centre + split};
}

std::vector<CavitySpectrum> cavity_spectrum_scan(const CavityConfig& cfg,
                                                 const std::vector<double>& probe_grid,
                                                 const std::vector<double>& rho_grid,
                                                 const std::vector<double>& phase_grid,
                                                 unsigned workers) {
    if (probe_grid.empty() || rho_grid.empty() || phase_grid.empty()) {
        throw DomainError("cavity scan needs non-empty probe, rho and phi grids");
    }
    cfg.validate();
    cfg.check_consistency();
    const double kappa = cfg.kappa();
    for (std::size_t i = 1; i < probe_grid.size(); ++i) {
        if (std::abs(probe_grid[i] - probe_grid[i - 1]) > 0.2 * kappa * (1.0 + 1e-9)) {
            warn("probe step exceeds kappa/5; peak positions may be coarse");
            break;
        }
    }

    const double gamma = cfg.species_even.linewidth();
    const double reference = cfg.species_even.frequency();
    const double norm = kappa / (2.0 * cfg.pump * cfg.pump);
    const std::size_t np = probe_grid.size();
    const std::size_t nphi = phase_grid.size();
    const std::size_t total = rho_grid.size() * nphi * np;

    const auto values = parallel_map(total, workers, [&](std::size_t idx) {
        CavityConfig local = cfg;
        local.phase = phase_grid[(idx / np) % nphi];
        return output_intensity(local, probe_grid[idx % np], rho_grid[idx / (np * nphi)]);
    });

    std::vector<CavitySpectrum> out;
    out.reserve(rho_grid.size() * nphi);
    for (std::size_t ir = 0; ir < rho_grid.size(); ++ir) {
        for (std::size_t ip = 0; ip < nphi; ++ip) {
            CavityConfig local = cfg;
            local.phase = phase_grid[ip];
            CavitySpectrum spec;
            spec.rho = rho_grid[ir];
            spec.phase = phase_grid[ip];
            spec.m_r = local.cells() * total_r(local, spec.rho);
            spec.predicted = rabi_peaks(cfg.mode_frequency, reference, spec.m_r);
            std::vector<double> intensity(np);
            for (std::size_t k = 0; k < np; ++k) {
                const double value = values[(ir * nphi + ip) * np + k];
                intensity[k] = value;
                spec.points.push_back({probe_grid[k], (probe_grid[k] - reference) / gamma, value,
                                       std::isfinite(norm) ? value * norm : value});
            }
            spec.peaks = find_peaks(probe_grid, intensity);
            out.push_back(std::move(spec));
        }
    }
    return out;
}

}  // namespace bilattice::cavity
