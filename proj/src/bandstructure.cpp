#include "bilattice/bandstructure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bilattice/parallel.hpp"

namespace bilattice::bands {

namespace {

double fold_into_zone(double q, double g0) {
    const double folded = q - g0 * std::round(q / g0);
    std::ostringstream msg;
    msg << "quasi-momentum " << q << " rad/m outside the first zone, folded to " << folded;
    warn(msg.str());
    return folded;
}

}  // namespace

BlochMatrix build_bloch_matrix(double q, const LatticeConfig& cfg, int n_bz, bool coupled) {
    cfg.validate();
    if (n_bz < 1) throw DomainError("n_bz must be >= 1");
    const double g0 = cfg.reciprocal_vector();
    if (std::abs(q) > 0.5 * g0 * (1.0 + 1e-12)) q = fold_into_zone(q, g0);

    BlochMatrix block{q, n_bz, Eigen::MatrixXcd::Zero(2 * n_bz + 3, 2 * n_bz + 3)};
    auto& h = block.matrix;
    const auto b = block.even_spin_index();
    const auto d = block.odd_spin_index();
    h(b, b) = cfg.species_even.frequency();
    h(d, d) = cfg.species_odd.frequency();

    for (int m = -n_bz; m <= n_bz; ++m) {
        const Eigen::Index i = m + n_bz;
        const double k = q + m * g0;
        const double omega_k = constants::c * std::abs(k);
        h(i, i) = omega_k;
        if (!coupled || m == 0) continue;
        const double g1 = collective_freespace_coupling(cfg.species_even, omega_k, cfg.mode_area,
                                                        cfg.cell_size);
        const cdouble g2 = std::polar(collective_freespace_coupling(cfg.species_odd, omega_k,
                                                                    cfg.mode_area, cfg.cell_size),
                                      m * g0 * cfg.intracell_distance);
        h(b, i) = g1;
        h(i, b) = g1;
        h(d, i) = g2;
        h(i, d) = std::conj(g2);
    }
    return block;
}

std::vector<double> bloch_eigenvalues(const BlochMatrix& block) {
    // Diagonalize relative to the mean spin frequency to keep the relevant
    // eigenvalues away from the large absolute offset.
    const auto b = block.even_spin_index();
    const auto d = block.odd_spin_index();
    const double shift = 0.5 * (block.matrix(b, b).real() + block.matrix(d, d).real());
    Eigen::MatrixXcd shifted = block.matrix;
    shifted.diagonal().array() -= shift;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(shifted, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eigensolver did not converge at q = " << block.quasi_momentum << " rad/m";
        throw NumericError(msg.str());
    }
    std::vector<double> values(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + solver.eigenvalues().size());
    for (auto& v : values) v += shift;
    std::sort(values.begin(), values.end());
    return values;
}

BandStructure compute_bands(const LatticeConfig& cfg, const BandOptions& options) {
    if (options.n_q < 3) throw DomainError("n_q must be >= 3");
    const double half_zone = 0.5 * cfg.reciprocal_vector();
    const double q_max = options.q_max.value_or(half_zone);
    if (!(q_max > 0.0 && q_max <= half_zone * (1.0 + 1e-12))) {
        throw DomainError("q_max must lie in (0, G0/2]");
    }

    BandStructure bs;
    bs.n_bz = options.n_bz;
    bs.q_grid.resize(static_cast<std::size_t>(options.n_q));
    const int n = options.n_q;
    for (int i = 0; i < n; ++i) {
        // Symmetric construction so that q and -q are exact negatives.
        const double t = (2.0 * i - (n - 1)) / static_cast<double>(n - 1);
        bs.q_grid[static_cast<std::size_t>(i)] = (i == (n - 1) / 2 && n % 2 == 1) ? 0.0 : t * q_max;
    }
    bs.bands = parallel_map(bs.q_grid.size(), options.workers, [&](std::size_t i) {
        return bloch_eigenvalues(build_bloch_matrix(bs.q_grid[i], cfg, options.n_bz, options.coupled));
    });
    return bs;
}

double collective_coupling_scale(const LatticeConfig& cfg) {
    const double omega_q = constants::c * cfg.reciprocal_vector();
    const double g1 = collective_freespace_coupling(cfg.species_even, omega_q, cfg.mode_area, cfg.cell_size);
    const double g2 = collective_freespace_coupling(cfg.species_odd, omega_q, cfg.mode_area, cfg.cell_size);
    return std::sqrt(g1 * g1 + g2 * g2);
}

std::array<double, 4> analytic_band_edges(const LatticeConfig& cfg) {
    cfg.validate();
    const double w1 = cfg.species_even.frequency();
    const double w2 = cfg.species_odd.frequency();
    if (std::abs(w1 - w2) > 1e-12 * w1) {
        throw DomainError("analytic band edges require equal transition frequencies");
    }
    const double g0 = cfg.reciprocal_vector();
    const double omega_q = constants::c * g0;
    const double g1 = collective_freespace_coupling(cfg.species_even, omega_q, cfg.mode_area, cfg.cell_size);
    const double g2 = collective_freespace_coupling(cfg.species_odd, omega_q, cfg.mode_area, cfg.cell_size);
    const double total2 = g1 * g1 + g2 * g2;

    const double ratio = 2.0 * g1 * g2 / total2;
    const double s = std::sin(g0 * cfg.intracell_distance);
    const double root = std::sqrt(std::max(0.0, 1.0 - ratio * ratio * s * s));
    const double centre = 0.5 * (omega_q + w1);
    const double half_detuning = 0.5 * (omega_q - w1);
    auto nu = [&](int j, int sign) {
        const double inner = total2 * (1.0 - (j == 1 ? -1.0 : 1.0) * root);
        return centre + sign * std::sqrt(half_detuning * half_detuning + inner);
    };
    return {nu(1, -1), nu(2, -1), nu(2, +1), nu(1, +1)};
}

GapOptions default_gap_options(const LatticeConfig& cfg) {
    const double omega_q = constants::c * cfg.reciprocal_vector();
    const double lo = std::min({cfg.species_even.frequency(), cfg.species_odd.frequency(), omega_q});
    const double hi = std::max({cfg.species_even.frequency(), cfg.species_odd.frequency(), omega_q});
    const double gamma = cfg.species_even.linewidth();
    const double pad = 10.0 * collective_coupling_scale(cfg) + 100.0 * gamma;
    return {lo - pad, hi + pad, 0.1 * gamma};
}

std::vector<Gap> find_gaps(const BandStructure& bs, const GapOptions& options) {
    std::vector<Gap> gaps;
    if (!(options.window_high > options.window_low) || bs.bands.size() < 2) return gaps;

    std::vector<std::pair<double, double>> covered;
    const std::size_t nb = bs.band_count();
    for (std::size_t band = 0; band < nb; ++band) {
        double lo = bs.bands.front()[band];
        double hi = lo;
        for (const auto& at_q : bs.bands) {
            lo = std::min(lo, at_q[band]);
            hi = std::max(hi, at_q[band]);
        }
        if (hi - lo < options.cover_tol) continue;  // dark, dispersionless
        if (hi < options.window_low || lo > options.window_high) continue;
        for (std::size_t iq = 0; iq + 1 < bs.bands.size(); ++iq) {
            const double a = bs.bands[iq][band];
            const double b = bs.bands[iq + 1][band];
            covered.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(covered.begin(), covered.end());

    std::vector<std::pair<double, double>> merged;
    for (const auto& [lo, hi] : covered) {
        if (!merged.empty() && lo <= merged.back().second + 2.0 * options.cover_tol) {
            merged.back().second = std::max(merged.back().second, hi);
        } else {
            merged.emplace_back(lo, hi);
        }
    }

    double cursor = options.window_low;
    auto emit = [&](double lo, double hi) {
        lo = std::max(lo, options.window_low);
        hi = std::min(hi, options.window_high);
        if (hi - lo > 2.0 * options.cover_tol) {
            gaps.push_back({lo, hi, static_cast<int>(gaps.size()) + 1});
        }
    };
    for (const auto& [lo, hi] : merged) {
        if (lo > cursor) emit(cursor, lo);
        cursor = std::max(cursor, hi);
        if (cursor >= options.window_high) break;
    }
    if (cursor < options.window_high) emit(cursor, options.window_high);
    return gaps;
}

std::vector<GapScanRow> gap_widths_vs_rho(const LatticeConfig& base,
                                          const std::vector<double>& rho_grid,
                                          const BandOptions& band_options,
                                          const std::optional<GapOptions>& gap_options) {
    std::vector<GapScanRow> rows;
    rows.reserve(rho_grid.size());
    const bool equal_frequencies =
        std::abs(base.species_even.frequency() - base.species_odd.frequency()) <=
        1e-12 * base.species_even.frequency();
    for (double rho : rho_grid) {
        LatticeConfig cfg = base;
        cfg.intracell_distance = rho;
        cfg.validate();
        GapScanRow row{rho, std::nullopt, {}};
        if (equal_frequencies) row.analytic = analytic_band_edges(cfg);
        const auto bs = compute_bands(cfg, band_options);
        row.numeric = find_gaps(bs, gap_options.value_or(default_gap_options(cfg)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace bilattice::bands
