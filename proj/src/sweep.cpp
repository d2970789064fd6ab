#include "bilattice/sweep.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bilattice/parallel.hpp"
#include "bilattice/transfer_matrix.hpp"

namespace bilattice::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Geometry {
    std::optional<double> beta;
    LatticeConfig lattice;
};

std::string format_number(double value) {
    std::ostringstream out;
    out << std::setprecision(12) << value;
    return out.str();
}

std::vector<Geometry> geometries(const SweepSpec& spec) {
    std::vector<Geometry> out;
    if (!spec.beta_grid.empty()) {
        for (double beta : spec.beta_grid) {
            LatticeConfig cfg = spec.lattice;
            cfg.intracell_distance = beta_to_spacings(beta, cfg.cell_size).first;
            out.push_back({beta, cfg});
        }
        return out;
    }
    if (spec.rho_grid.empty()) return {{std::nullopt, spec.lattice}};
    for (double rho : spec.rho_grid) {
        LatticeConfig cfg = spec.lattice;
        cfg.intracell_distance = rho;
        out.push_back({std::nullopt, cfg});
    }
    return out;
}

/// Leading parameter columns shared by every engine.
struct GeometryColumns {
    bool beta = false;
    bool rho = false;

    void names(std::vector<std::string>& columns) const {
        if (beta) columns.emplace_back("beta");
        if (rho) columns.emplace_back("rho_over_a");
    }
    void values(const Geometry& g, std::vector<double>& row) const {
        if (beta) row.push_back(*g.beta);
        if (rho) row.push_back(g.lattice.intracell_distance / g.lattice.cell_size);
    }
    std::string describe(const Geometry& g) const {
        std::string s = "rho_over_a=" + format_number(g.lattice.intracell_distance / g.lattice.cell_size);
        if (g.beta) s = "beta=" + format_number(*g.beta) + " " + s;
        return s;
    }
};

struct CellOutcome {
    std::vector<std::vector<double>> rows;
    std::exception_ptr error;
    std::string message;
};

std::string message_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

/// Runs every cell, turning failures into NaN rows built by `fallback`.
template <typename Compute, typename Fallback, typename Describe>
void run_cells(std::size_t count, unsigned workers, bool fail_fast, SweepResult& result,
               Compute&& compute, Fallback&& fallback, Describe&& describe) {
    const auto outcomes = parallel_map(count, workers, [&](std::size_t i) {
        CellOutcome outcome;
        try {
            outcome.rows = compute(i);
        } catch (...) {
            outcome.error = std::current_exception();
            outcome.message = message_of(outcome.error);
            outcome.rows = fallback(i);
        }
        return outcome;
    });
    for (std::size_t i = 0; i < count; ++i) {
        const auto& outcome = outcomes[i];
        if (outcome.error) {
            if (fail_fast) std::rethrow_exception(outcome.error);
            result.errors.push_back({describe(i), outcome.message, outcome.error});
        }
        for (const auto& row : outcome.rows) result.table.add_row(row);
    }
}

std::vector<double> nan_row(std::size_t width, std::vector<double> prefix) {
    prefix.resize(width, kNaN);
    return prefix;
}

void run_bands(const SweepSpec& spec, const std::vector<Geometry>& geos, const GeometryColumns& gc,
               SweepResult& result) {
    const double gamma = spec.lattice.species_even.linewidth();
    const int band_count = 2 * spec.band_options.n_bz + 3;
    auto& columns = result.table.columns;
    gc.names(columns);
    columns.emplace_back("q_rad_m");
    columns.emplace_back("q_over_G0");
    for (int b = 1; b <= band_count; ++b) {
        std::ostringstream name;
        name << "band_" << std::setw(3) << std::setfill('0') << b << "_gamma";
        columns.push_back(name.str());
    }
    bands::BandOptions options = spec.band_options;
    options.workers = spec.workers;
    run_cells(
        geos.size(), 1, spec.fail_fast, result,
        [&](std::size_t i) {
            const auto bs = bands::compute_bands(geos[i].lattice, options);
            const double g0 = geos[i].lattice.reciprocal_vector();
            std::vector<std::vector<double>> rows;
            for (std::size_t iq = 0; iq < bs.q_grid.size(); ++iq) {
                std::vector<double> row;
                gc.values(geos[i], row);
                row.push_back(bs.q_grid[iq]);
                row.push_back(bs.q_grid[iq] / g0);
                for (double nu : bs.bands[iq]) row.push_back((nu - spec.reference) / gamma);
                rows.push_back(std::move(row));
            }
            return rows;
        },
        [&](std::size_t i) {
            std::vector<double> prefix;
            gc.values(geos[i], prefix);
            return std::vector<std::vector<double>>{nan_row(columns.size(), prefix)};
        },
        [&](std::size_t i) { return gc.describe(geos[i]); });
}

void run_gaps(const SweepSpec& spec, const std::vector<Geometry>& geos, GeometryColumns gc,
              SweepResult& result) {
    const double gamma = spec.lattice.species_even.linewidth();
    gc.rho = true;  // the x column of a gap table
    auto& columns = result.table.columns;
    gc.names(columns);
    columns.emplace_back("gap_count");
    for (int g = 1; g <= kGapSlots; ++g) {
        const std::string p = "gap" + std::to_string(g) + "_";
        columns.push_back(p + "low_gamma");
        columns.push_back(p + "high_gamma");
        columns.push_back(p + "width_gamma");
    }
    for (const char* name : {"analytic_nu1m_gamma", "analytic_nu2m_gamma", "analytic_nu2p_gamma",
                             "analytic_nu1p_gamma", "analytic_lower_width_gamma",
                             "analytic_upper_width_gamma"}) {
        columns.emplace_back(name);
    }

    bands::BandOptions options = spec.band_options;
    const unsigned outer = geos.size() >= spec.workers ? spec.workers : 1;
    options.workers = outer > 1 ? 1 : spec.workers;
    bool overflow = false;
    run_cells(
        geos.size(), outer, spec.fail_fast, result,
        [&](std::size_t i) {
            const LatticeConfig& cfg = geos[i].lattice;
            const auto bs = bands::compute_bands(cfg, options);
            const auto gaps = bands::find_gaps(bs, spec.gap_options.value_or(bands::default_gap_options(cfg)));
            std::vector<double> row;
            gc.values(geos[i], row);
            row.push_back(static_cast<double>(gaps.size()));
            for (int g = 0; g < kGapSlots; ++g) {
                if (g < static_cast<int>(gaps.size())) {
                    row.push_back((gaps[g].lower_edge - spec.reference) / gamma);
                    row.push_back((gaps[g].upper_edge - spec.reference) / gamma);
                    row.push_back(gaps[g].width() / gamma);
                } else {
                    row.insert(row.end(), 3, kNaN);
                }
            }
            const bool equal = std::abs(cfg.species_even.frequency() - cfg.species_odd.frequency()) <=
                               1e-12 * cfg.species_even.frequency();
            if (equal) {
                const auto edges = bands::analytic_band_edges(cfg);
                for (double e : edges) row.push_back((e - spec.reference) / gamma);
                row.push_back((edges[1] - edges[0]) / gamma);
                row.push_back((edges[3] - edges[2]) / gamma);
            } else {
                row.insert(row.end(), 6, kNaN);
            }
            return std::vector<std::vector<double>>{row};
        },
        [&](std::size_t i) {
            std::vector<double> prefix;
            gc.values(geos[i], prefix);
            return std::vector<std::vector<double>>{nan_row(columns.size(), prefix)};
        },
        [&](std::size_t i) { return gc.describe(geos[i]); });
    for (const auto& row : result.table.rows) {
        if (row[result.table.column_index("gap_count")] > kGapSlots) overflow = true;
    }
    if (overflow) warn("some rows have more gaps than the table lists; see gap_count");
}

void run_transmit(const SweepSpec& spec, const std::vector<Geometry>& geos,
                  const GeometryColumns& gc, SweepResult& result) {
    const double gamma = spec.lattice.species_even.linewidth();
    auto& columns = result.table.columns;
    gc.names(columns);
    for (const char* name : {"omega_p_rad_s", "detuning_gamma", "T", "R", "A"}) columns.emplace_back(name);
    const std::size_t np = spec.probe_grid.size();
    run_cells(
        geos.size() * np, spec.workers, spec.fail_fast, result,
        [&](std::size_t i) {
            const auto& geo = geos[i / np];
            const auto point = tmm::spectrum_scan(geo.lattice, {spec.probe_grid[i % np]}, spec.reference).front();
            std::vector<double> row;
            gc.values(geo, row);
            row.insert(row.end(), {point.probe, point.detuning, point.transmittance, point.reflectance,
                                   point.absorbance});
            if (!std::isfinite(point.transmittance) || !std::isfinite(point.reflectance)) {
                throw NumericError("non-finite transmission");
            }
            return std::vector<std::vector<double>>{row};
        },
        [&](std::size_t i) {
            std::vector<double> prefix;
            gc.values(geos[i / np], prefix);
            const double probe = spec.probe_grid[i % np];
            prefix.push_back(probe);
            prefix.push_back((probe - spec.reference) / gamma);
            return std::vector<std::vector<double>>{nan_row(columns.size(), prefix)};
        },
        [&](std::size_t i) {
            return gc.describe(geos[i / np]) + " omega_p_rad_s=" + format_number(spec.probe_grid[i % np]);
        });
}

void run_cavity(const SweepSpec& spec, const std::vector<Geometry>& geos, const GeometryColumns& gc,
                SweepResult& result) {
    const auto& base = *spec.cavity;
    base.check_consistency();
    const double gamma = base.species_even.linewidth();
    const double kappa = base.kappa();
    const std::vector<double> phases =
        spec.phase_grid.empty() ? std::vector<double>{base.phase} : spec.phase_grid;
    const bool phase_column = spec.parameter_columns || phases.size() > 1;

    auto& columns = result.table.columns;
    gc.names(columns);
    if (phase_column) columns.emplace_back("phi_rad");
    for (const char* name : {"omega_p_rad_s", "detuning_gamma", "I_photons_s", "I_norm"}) {
        columns.emplace_back(name);
    }

    for (std::size_t i = 1; i < spec.probe_grid.size(); ++i) {
        if (std::abs(spec.probe_grid[i] - spec.probe_grid[i - 1]) > 0.2 * kappa * (1.0 + 1e-9)) {
            warn("probe step exceeds kappa/5; peak positions may be coarse");
            break;
        }
    }

    const std::size_t np = spec.probe_grid.size();
    const std::size_t nphi = phases.size();
    const double norm = kappa / (2.0 * base.pump * base.pump);
    auto prefix_of = [&](std::size_t i) {
        std::vector<double> row;
        gc.values(geos[i / (np * nphi)], row);
        if (phase_column) row.push_back(phases[(i / np) % nphi]);
        const double probe = spec.probe_grid[i % np];
        row.push_back(probe);
        row.push_back((probe - spec.reference) / gamma);
        return row;
    };
    run_cells(
        geos.size() * nphi * np, spec.workers, spec.fail_fast, result,
        [&](std::size_t i) {
            cavity::CavityConfig cfg = base;
            cfg.phase = phases[(i / np) % nphi];
            const double intensity =
                cavity::output_intensity(cfg, spec.probe_grid[i % np], geos[i / (np * nphi)].lattice.intracell_distance);
            auto row = prefix_of(i);
            row.push_back(intensity);
            row.push_back(std::isfinite(norm) ? intensity * norm : kNaN);
            return std::vector<std::vector<double>>{row};
        },
        [&](std::size_t i) { return std::vector<std::vector<double>>{nan_row(columns.size(), prefix_of(i))}; },
        [&](std::size_t i) {
            return gc.describe(geos[i / (np * nphi)]) + " phi_rad=" + format_number(phases[(i / np) % nphi]) +
                   " omega_p_rad_s=" + format_number(spec.probe_grid[i % np]);
        });

    // Peak summary per spectrum, in units of gamma from the reference.
    auto& meta = result.table.metadata;
    meta.emplace_back("cavity_linewidth_rad_s", format_number(kappa));
    meta.emplace_back("commensurate", base.commensurate ? "true" : "false");
    if (base.commensurate) {
        meta.emplace_back("spin_wave_momentum", base.selected_momentum() == 0.0 ? "0" : "pi/a");
    }
    const std::size_t intensity_col = result.table.column_index("I_photons_s");
    for (std::size_t ig = 0; ig < geos.size(); ++ig) {
        for (std::size_t ip = 0; ip < nphi; ++ip) {
            cavity::CavityConfig cfg = base;
            cfg.phase = phases[ip];
            const double rho = geos[ig].lattice.intracell_distance;
            const double m_r = cfg.cells() * cavity::collective_R(cfg.coupling_even(), cfg.coupling_odd(),
                                                                   cfg.wave_number(), rho, cfg.phase,
                                                                   cfg.commensurate);
            std::vector<double> y(np);
            for (std::size_t k = 0; k < np; ++k) {
                y[k] = result.table.rows[(ig * nphi + ip) * np + k][intensity_col];
            }
            const auto peaks = cavity::find_peaks(spec.probe_grid, y);
            const auto predicted = cavity::rabi_peaks(cfg.mode_frequency, cfg.species_even.frequency(), m_r);
            std::ostringstream value;
            value << std::setprecision(12) << "found";
            for (const auto& p : peaks) value << ' ' << (p.position - spec.reference) / gamma;
            value << "; predicted " << (predicted[0] - spec.reference) / gamma << ' '
                  << (predicted[1] - spec.reference) / gamma;
            meta.emplace_back("peaks_gamma " + gc.describe(geos[ig]) + " phi_rad=" + format_number(phases[ip]),
                              value.str());
        }
    }
}

}  // namespace

const char* engine_name(Engine engine) {
    switch (engine) {
        case Engine::bands: return "bands";
        case Engine::gaps: return "gaps";
        case Engine::transmit: return "transmit";
        case Engine::cavity: return "cavity";
    }
    return "unknown";
}

void SweepSpec::validate() const {
    try {
        lattice.validate();
        if (cavity) cavity->validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if ((engine == Engine::transmit || engine == Engine::cavity) && probe_grid.empty()) {
        throw ConfigError(std::string(engine_name(engine)) + " sweep needs a non-empty probe grid");
    }
    if (engine == Engine::cavity && !cavity) throw ConfigError("cavity sweep needs a cavity configuration");
    if (!beta_grid.empty() && !rho_grid.empty()) throw ConfigError("give either a rho grid or a beta grid");
    for (double beta : beta_grid) {
        if (!(beta * beta <= 4.0)) throw ConfigError("beta = " + format_number(beta) + " exceeds 2");
    }
    for (double rho : rho_grid) {
        if (!(rho >= 0.0 && rho <= lattice.cell_size)) {
            throw ConfigError("rho = " + format_number(rho) + " m outside [0, a]");
        }
    }
    for (double p : probe_grid) {
        if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("probe frequencies must be positive");
    }
    if (band_options.n_bz < 1) throw ConfigError("n_bz must be >= 1");
    if (band_options.n_q < 3) throw ConfigError("n_q must be >= 3");
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto geos = geometries(spec);
    GeometryColumns gc;
    gc.beta = !spec.beta_grid.empty() && (spec.parameter_columns || spec.beta_grid.size() > 1);
    gc.rho = spec.parameter_columns || geos.size() > 1;

    SweepResult result;
    result.table.metadata.emplace_back("engine", engine_name(spec.engine));
    result.table.metadata.emplace_back("reference_rad_s", format_number(spec.reference));
    result.table.metadata.emplace_back("gamma_rad_s", format_number(spec.lattice.species_even.linewidth()));
    switch (spec.engine) {
        case Engine::bands: run_bands(spec, geos, gc, result); break;
        case Engine::gaps: run_gaps(spec, geos, gc, result); break;
        case Engine::transmit: run_transmit(spec, geos, gc, result); break;
        case Engine::cavity: run_cavity(spec, geos, gc, result); break;
    }
    return result;
}

}  // namespace bilattice::sweep
