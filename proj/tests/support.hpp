// Shared helpers for the unit tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "bilattice/core.hpp"

namespace testing {

/// Collects warnings emitted by the library while in scope.
class WarningCapture {
public:
    WarningCapture();
    ~WarningCapture();
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

    [[nodiscard]] const std::vector<std::string>& messages() const;
    [[nodiscard]] bool contains(std::string_view fragment) const;
};

/// Even/odd Rb D2 lattice with a = lambda_L for a lattice laser detuned by
/// `lattice_detuning_gamma` from the atomic line.
bilattice::LatticeConfig rb_lattice(double rho_over_a, double lattice_detuning_gamma = 10.0,
                                    double areal_density = 5.7e10, long long cells = 500000);

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
