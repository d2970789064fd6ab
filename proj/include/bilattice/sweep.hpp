// Parameter sweeps that turn one engine plus parameter grids into a single table.
#pragma once

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "bilattice/bandstructure.hpp"
#include "bilattice/cavity.hpp"
#include "bilattice/core.hpp"
#include "bilattice/table.hpp"

namespace bilattice::sweep {

enum class Engine { bands, gaps, transmit, cavity };

const char* engine_name(Engine engine);

/// Number of gap slots in the gaps table; extra gaps are counted but not listed.
inline constexpr int kGapSlots = 4;

struct SweepSpec {
    Engine engine = Engine::transmit;
    LatticeConfig lattice;
    std::optional<cavity::CavityConfig> cavity;  // required by the cavity engine

    std::vector<double> probe_grid;  // rad/s; transmit and cavity
    std::vector<double> rho_grid;    // m; empty means the lattice's own rho
    std::vector<double> phase_grid;  // rad; cavity only, empty means the cavity's own phi
    std::vector<double> beta_grid;   // double-well parameter; replaces rho_grid when set

    double reference = 0.0;  // rad/s; detunings are (omega - reference) / gamma_even

    bands::BandOptions band_options;
    std::optional<bands::GapOptions> gap_options;

    unsigned workers = 1;
    bool fail_fast = false;
    /// Prepend parameter columns even when a grid has a single value.
    bool parameter_columns = false;

    /// Throws ConfigError naming the problem.
    void validate() const;
};

struct CellError {
    std::string parameters;  // e.g. "rho_over_a=0.25 omega_p_rad_s=2.41e15"
    std::string message;
    std::exception_ptr exception;
};

struct SweepResult {
    Table table;
    std::vector<CellError> errors;  // in row order
};

/// Rows follow the lexicographic order of (beta or rho, phi, probe or q). Failed grid
/// cells become rows of NaN values and an entry in `errors`; with fail_fast the first
/// failure is rethrown instead. The result does not depend on the worker count.
SweepResult run_sweep(const SweepSpec& spec);

}  // namespace bilattice::sweep
