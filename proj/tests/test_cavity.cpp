#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include "bilattice/cavity.hpp"
#include "support.hpp"

using namespace bilattice;
using namespace bilattice::cavity;
using testing::rel_err;

namespace {

constexpr cdouble kI{0.0, 1.0};

double gamma_rb() { return rb85_d2().linewidth(); }

// High-finesse cavity on the atomic line with a 200-plane commensurate lattice.
CavityConfig base_config(bool commensurate = true) {
    const AtomSpecies rb = rb85_d2();
    CavityConfig cfg{};
    cfg.mode_frequency = rb.frequency();
    cfg.linewidth = 2.0 * constants::pi * 21e3;
    cfg.length = 85e-3;
    cfg.waist = 130e-6;
    cfg.phase = 0.0;
    cfg.pump = 1e6;
    cfg.occupancy = 3000.0;
    cfg.plane_count = 200.0;
    cfg.cell_size = rb.wavelength();
    cfg.commensurate = commensurate;
    cfg.mode_index = 2;
    cfg.species_even = rb;
    cfg.species_odd = rb;
    return cfg;
}

double probe_at(double detuning_gamma) { return rb85_d2().frequency() + detuning_gamma * gamma_rb(); }

double empty_cavity(const CavityConfig& cfg, double probe) {
    const double kappa = cfg.kappa();
    const double dc = cfg.mode_frequency - probe;
    return 2.0 * kappa * cfg.pump * cfg.pump / (kappa * kappa + dc * dc);
}

}  // namespace

TEST_CASE("collective coupling R") {
    const double g1 = 3.0, g2 = 5.0, k = 2.0;
    CHECK(collective_R(g1, g2, k, 0.37, 1.1, false) == doctest::Approx(17.0));
    CHECK(collective_R(g1, g2, k, 0.0, 0.0, true) == doctest::Approx(34.0));
    // Odd sublattice at a node of the standing wave.
    CHECK(collective_R(g1, g2, k, constants::pi / (2.0 * k), 0.0, true) == doctest::Approx(9.0));
    CHECK(collective_R(g1, g2, k, 0.0, constants::pi / 2.0, true) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cooperativity(40.0, 2.0, 5.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(cooperativity(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("dressed eigenfrequencies") {
    const double kappa = 0.3, gamma = 1.0;
    SUBCASE("no coupling leaves the bare poles") {
        const auto ev = eigenfrequencies(2.0, -1.0, kappa, gamma, 100.0, 0.0);
        const std::array<cdouble, 2> got{ev.nu_plus, ev.nu_minus};
        const cdouble cavity = 2.0 - kI * kappa;
        const cdouble atom = -1.0 - kI * 0.5 * gamma;
        CHECK(std::min(std::abs(got[0] - cavity), std::abs(got[1] - cavity)) < 1e-14);
        CHECK(std::min(std::abs(got[0] - atom), std::abs(got[1] - atom)) < 1e-14);
        CHECK(std::abs(ev.nu0 - atom) < 1e-14);
    }
    SUBCASE("resonant lossless splitting is 2 sqrt(M R)") {
        const auto ev = eigenfrequencies(0.0, 0.0, 0.0, 0.0, 50.0, 2.0);
        CHECK(std::abs(ev.nu_plus - ev.nu_minus) == doctest::Approx(20.0));
    }
    SUBCASE("agrees with a general complex eigensolver") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        std::uniform_real_distribution<double> pos(0.01, 2.0);
        for (int draw = 0; draw < 200; ++draw) {
            const double dc = u(rng), d = u(rng), k = pos(rng), g = pos(rng), m = 1.0 + 100.0 * pos(rng),
                         r = pos(rng);
            Eigen::Matrix2cd h;
            h << dc - kI * k, std::sqrt(m * r), std::sqrt(m * r), d - kI * 0.5 * g;
            Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(h);
            const auto ev = eigenfrequencies(dc, d, k, g, m, r);
            for (int i = 0; i < 2; ++i) {
                const cdouble e = solver.eigenvalues()(i);
                const double scale = std::max(1.0, std::abs(e));
                CHECK(std::min(std::abs(e - ev.nu_plus), std::abs(e - ev.nu_minus)) / scale < 1e-12);
            }
        }
    }
    SUBCASE("configuration form refuses unequal transitions") {
        CavityConfig cfg = base_config();
        CHECK_NOTHROW(eigenfrequencies(cfg, probe_at(0.0), 0.2 * cfg.cell_size));
        cfg.species_odd = cfg.species_odd.shifted_to(cfg.species_odd.frequency() + 10.0 * gamma_rb());
        CHECK_THROWS_AS(eigenfrequencies(cfg, probe_at(0.0), 0.2 * cfg.cell_size), DomainError);
        CHECK_NOTHROW(steady_state(cfg, probe_at(0.0), 0.2 * cfg.cell_size));
    }
}

TEST_CASE("steady state: trivial drives and couplings") {
    CavityConfig cfg = base_config();
    cfg.pump = 0.0;
    const auto zero = steady_state(cfg, probe_at(3.0), 0.1 * cfg.cell_size);
    CHECK(zero.a == cdouble(0.0));
    CHECK(zero.b_plus == cdouble(0.0));
    CHECK(zero.d_plus == cdouble(0.0));

    cfg = base_config();
    cfg.occupancy = 0.0;
    for (double det : {-2.0, -0.001, 0.0, 0.004, 7.0}) {
        const double p = probe_at(det);
        CHECK(rel_err(output_intensity(cfg, p, 0.3 * cfg.cell_size), empty_cavity(cfg, p)) < 1e-12);
    }
}

TEST_CASE("output scales with the pump power") {
    CavityConfig cfg = base_config();
    const double p = probe_at(20.0), rho = 0.2 * cfg.cell_size;
    const double one = output_intensity(cfg, p, rho);
    cfg.pump *= 3.0;
    CHECK(rel_err(output_intensity(cfg, p, rho), 9.0 * one) < 1e-12);
}

TEST_CASE("linear solve matches the closed form for equal transitions") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> det(-40.0, 40.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        CavityConfig cfg = base_config(i % 2 == 0);
        cfg.phase = 2.0 * constants::pi * unit(rng);
        cfg.mode_frequency += (unit(rng) - 0.5) * 10.0 * gamma_rb();
        const double rho = unit(rng) * cfg.cell_size;
        const double p = probe_at(det(rng));
        worst = std::max(worst, rel_err(output_intensity(cfg, p, rho), output_intensity_closed_form(cfg, p, rho)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("incommensurate output is independent of rho and phi") {
    const CavityConfig cfg = base_config(false);
    const double p = probe_at(17.0);
    const double ref = output_intensity(cfg, p, 0.0);
    for (double rho : {0.1, 0.25, 0.4, 0.9}) {
        for (double phi : {0.0, 0.7, 1.5707963267948966, 3.0}) {
            CavityConfig local = cfg;
            local.phase = phi;
            CHECK(rel_err(output_intensity(local, p, rho * cfg.cell_size), ref) < 1e-12);
        }
    }
}

TEST_CASE("commensurate lattice at the nodes decouples from the cavity") {
    CavityConfig cfg = base_config();
    cfg.phase = constants::pi / 2.0;
    for (double det : {-1.0, 0.0, 1e-4, 25.0}) {
        const double p = probe_at(det);
        CHECK(rel_err(output_intensity(cfg, p, 0.0), empty_cavity(cfg, p)) < 1e-10);
    }
    // Normalized output is 1 on the empty-cavity resonance.
    const auto spectra = cavity_spectrum_scan(cfg, {probe_at(0.0)}, {0.0}, {cfg.phase});
    CHECK(spectra[0].points[0].normalized == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("M cells act as one cell with coupling sqrt(M) g") {
    const CavityConfig many = base_config();
    CavityConfig one = many;
    one.plane_count = 2.0;
    one.occupancy = many.occupancy * many.cells();
    for (double det : {-24.0, -3.0, 0.0, 0.5, 24.8}) {
        const double p = probe_at(det);
        CHECK(rel_err(output_intensity(one, p, 0.2 * many.cell_size),
                      output_intensity(many, p, 0.2 * many.cell_size)) < 1e-12);
    }
}

TEST_CASE("resonant output falls as the inverse square of the cooperativity") {
    CavityConfig cfg = base_config(false);
    cfg.occupancy = 1.0;
    const double unit_c = cooperativity(cfg.cells() * collective_R(cfg.coupling_even(), cfg.coupling_odd(), 0.0,
                                                                   0.0, 0.0, false),
                                        cfg.kappa(), gamma_rb());
    std::vector<double> xs, ys;
    for (int i = 0; i <= 30; ++i) {
        const double target = std::pow(10.0, 1.0 + 3.0 * i / 30.0);
        cfg.occupancy = target / unit_c;
        xs.push_back(std::log(target));
        ys.push_back(std::log(output_intensity(cfg, cfg.mode_frequency, 0.0)));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.005));
}

TEST_CASE("peak finder") {
    auto f = [](double x) { return 1.0 - 4.0 * (x - 0.3037) * (x - 0.3037); };
    std::vector<double> x, y;
    for (int i = 0; i <= 60; ++i) {
        x.push_back(0.01 * i);
        y.push_back(f(x.back()));
    }
    for (int i = 61; i <= 100; ++i) {
        x.push_back(0.01 * i);
        y.push_back(std::exp(-std::pow((x.back() - 0.8123) / 0.05, 2)));
    }
    const auto peaks = find_peaks(x, y);
    REQUIRE(peaks.size() == 2);
    // Exact for a parabola, close for a well-sampled Gaussian.
    CHECK(peaks[0].position == doctest::Approx(0.3037).epsilon(1e-12));
    CHECK(peaks[0].height == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(peaks[1].position - 0.8123) < 1e-3);
    CHECK(find_peaks({0.0, 1.0}, {1.0, 2.0}).empty());
    CHECK_THROWS_AS(find_peaks({0.0}, {}), DomainError);
}

TEST_CASE("cavity linewidth from the finesse and consistency warning") {
    CavityConfig cfg = base_config();
    cfg.linewidth.reset();
    cfg.finesse = 170000.0;
    const double expected = constants::pi * constants::c / (cfg.length * 170000.0);
    CHECK(cfg.kappa() == doctest::Approx(expected));
    {
        testing::WarningCapture capture;
        cfg.linewidth = expected * 1.1;
        cfg.check_consistency();
        CHECK(capture.messages().empty());
        cfg.linewidth = expected * 2.0;
        cfg.check_consistency();
        CHECK(capture.contains("20%"));
    }
    cfg.linewidth.reset();
    cfg.finesse.reset();
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = base_config();
    cfg.waist = 0.0;
    CHECK_THROWS_AS(steady_state(cfg, probe_at(0.0), 0.0), DomainError);
}

TEST_CASE("spectrum scan finds the vacuum Rabi peaks") {
    const CavityConfig cfg = base_config();
    const double rho = 0.2 * cfg.cell_size;
    const double m_r = cfg.cells() * collective_R(cfg.coupling_even(), cfg.coupling_odd(), cfg.wave_number(), rho,
                                                  cfg.phase, true);
    const auto predicted = rabi_peaks(cfg.mode_frequency, cfg.species_even.frequency(), m_r);
    for (double centre : predicted) {
        std::vector<double> grid;
        for (int i = -100; i <= 100; ++i) grid.push_back(centre + 5e-4 * i * gamma_rb());
        testing::WarningCapture capture;
        const auto one = cavity_spectrum_scan(cfg, grid, {rho}, {cfg.phase}, 1);
        const auto four = cavity_spectrum_scan(cfg, grid, {rho}, {cfg.phase}, 4);
        CHECK(capture.messages().empty());
        REQUIRE(one[0].peaks.size() == 1);
        CHECK(std::abs(one[0].peaks[0].position - centre) < 0.01 * gamma_rb());
        CHECK(one[0].m_r == doctest::Approx(m_r));
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(one[0].points[i].intensity == four[0].points[i].intensity);
    }
    testing::WarningCapture capture;
    cavity_spectrum_scan(cfg, {probe_at(-1.0), probe_at(1.0)}, {rho}, {0.0});
    CHECK(capture.contains("kappa/5"));
    CHECK_THROWS_AS(cavity_spectrum_scan(cfg, {}, {rho}, {0.0}), DomainError);
}
