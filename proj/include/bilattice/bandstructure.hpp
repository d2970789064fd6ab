// Polariton band structure of the two-atom lattice: the coupled spin-wave / photon
// block H_q, its dense diagonalization, gap detection and the analytic band edges.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "bilattice/core.hpp"

namespace bilattice::bands {

inline constexpr int kDefaultBrillouinZones = 40;
inline constexpr int kDefaultQPoints = 401;

/// Hermitian block for one quasi-momentum. Index layout: photon modes q + 2 pi m / a
/// for m = -n_bz..n_bz, then the even-site spin wave b_q, then the odd-site d_q.
struct BlochMatrix {
    double quasi_momentum;
    int n_bz;
    Eigen::MatrixXcd matrix;

    [[nodiscard]] Eigen::Index photon_count() const { return 2 * n_bz + 1; }
    [[nodiscard]] Eigen::Index even_spin_index() const { return photon_count(); }
    [[nodiscard]] Eigen::Index odd_spin_index() const { return photon_count() + 1; }
};

struct BandStructure {
    std::vector<double> q_grid;              // rad/m
    std::vector<std::vector<double>> bands;  // bands[iq] sorted ascending (rad/s)
    int n_bz = kDefaultBrillouinZones;

    [[nodiscard]] std::size_t band_count() const { return bands.empty() ? 0 : bands.front().size(); }
};

struct Gap {
    double lower_edge;  // rad/s
    double upper_edge;  // rad/s
    int index;          // 1 = lowest frequency

    [[nodiscard]] double width() const { return upper_edge - lower_edge; }
};

struct GapOptions {
    double window_low;   // rad/s
    double window_high;  // rad/s
    double cover_tol;    // rad/s
};

/// Photon couplings are sqrt(M) G_{j, q+G} from collective_freespace_coupling. The
/// odd-site coupling carries +e^{iG rho}; the opposite sign is a phase redefinition of
/// d_q and leaves the spectrum unchanged. The G = 0 branch lies below omega_0 / 2 where the rotating-wave
/// coupling ~ omega_k^{-1/2} diverges; it stays in the matrix uncoupled.
/// q outside the first zone is folded back with a warning.
BlochMatrix build_bloch_matrix(double q, const LatticeConfig& cfg, int n_bz,
                               bool coupled = true);

/// Sorted real eigenvalues of one block; throws NumericError naming q on failure.
std::vector<double> bloch_eigenvalues(const BlochMatrix& block);

struct BandOptions {
    int n_bz = kDefaultBrillouinZones;
    int n_q = kDefaultQPoints;
    /// Half-width of the symmetric q window; defaults to the zone edge G0 / 2.
    std::optional<double> q_max;
    unsigned workers = 1;
    bool coupled = true;
};

BandStructure compute_bands(const LatticeConfig& cfg, const BandOptions& options = {});

/// The four q = 0 edges (nu_{1,-}, nu_{2,-}, nu_{2,+}, nu_{1,+}) of the two-mode
/// truncation with Q = +-G0. Requires equal transition frequencies.
std::array<double, 4> analytic_band_edges(const LatticeConfig& cfg);

/// Collective coupling scale sqrt(M (|G_1Q|^2 + |G_2Q|^2)) at Q = G0.
double collective_coupling_scale(const LatticeConfig& cfg);

/// Frequency intervals inside the window that no dispersive band reaches. A band at
/// q samples k, k+1 covers every value between them (sorted bands are continuous in
/// q); covered stretches closer than 2 cover_tol are merged; bands whose total spread
/// is below cover_tol are dark and ignored.
std::vector<Gap> find_gaps(const BandStructure& bs, const GapOptions& options);

/// Default window: the span of the two transitions and omega_Q, padded by
/// 10 x the coupling scale plus 100 linewidths.
GapOptions default_gap_options(const LatticeConfig& cfg);

struct GapScanRow {
    double rho;  // m
    std::optional<std::array<double, 4>> analytic;  // present when omega_1 = omega_2
    std::vector<Gap> numeric;
};

std::vector<GapScanRow> gap_widths_vs_rho(const LatticeConfig& base,
                                          const std::vector<double>& rho_grid,
                                          const BandOptions& band_options,
                                          const std::optional<GapOptions>& gap_options = {});

}  // namespace bilattice::bands
