#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"

namespace {

std::vector<std::string> g_messages;
int g_depth = 0;

void capture(std::string_view message) { g_messages.emplace_back(message); }
void discard(std::string_view) {}

}  // namespace

namespace testing {

WarningCapture::WarningCapture() {
    if (g_depth++ == 0) g_messages.clear();
    bilattice::set_warning_handler(&capture);
}

WarningCapture::~WarningCapture() {
    if (--g_depth == 0) bilattice::set_warning_handler(&discard);
}

const std::vector<std::string>& WarningCapture::messages() const { return g_messages; }

bool WarningCapture::contains(std::string_view fragment) const {
    return std::any_of(g_messages.begin(), g_messages.end(),
                       [&](const std::string& m) { return m.find(fragment) != std::string::npos; });
}

bilattice::LatticeConfig rb_lattice(double rho_over_a, double lattice_detuning_gamma,
                                    double areal_density, long long cells) {
    using namespace bilattice;
    const AtomSpecies rb = rb85_d2();
    const double omega_lattice = rb.frequency() + lattice_detuning_gamma * rb.linewidth();
    const double a = 2.0 * constants::pi * constants::c / omega_lattice;
    return LatticeConfig{a, rho_over_a * a, cells, areal_density, rb, rb, gaussian_mode_area(5e-6)};
}

}  // namespace testing

int main(int argc, char** argv) {
    bilattice::set_warning_handler(&discard);
    doctest::Context context(argc, argv);
    return context.run();
}
