#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bilattice/cli_io.hpp"
#include "support.hpp"

using namespace bilattice;
using namespace bilattice::io;

namespace {

std::string error_of(std::string_view text, Command command = Command::transmit) {
    try {
        parse_config(text, command, "test.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kMinimal =
    "# minimal transmit run\n"
    "lattice_detuning = 10 gamma\n"
    "rho = 0.2 a\n"
    "areal_density = 5.7e-2 um^-2\n"
    "planes = 1000\n"
    "probe = linspace(-10, 10, 5) gamma\n";

Table sample_table() {
    Table t;
    t.columns = {"x", "y"};
    t.add_row({1.0, 0.1234567890123456});
    t.add_row({-2.5e-300, std::numeric_limits<double>::quiet_NaN()});
    t.add_row({6.02214076e23, 3.0});
    t.metadata = {{"engine", "transmit"}, {"note", "a, b"}};
    return t;
}

std::string serialize(const Table& t, Format f) {
    std::ostringstream out;
    write_table(t, out, f);
    return out.str();
}

}  // namespace

TEST_CASE("minimal configuration resolves units") {
    const RunConfig run = parse_config(kMinimal, Command::transmit);
    const auto& spec = run.spec;
    const double gamma = rb85_d2().linewidth();
    CHECK(spec.engine == sweep::Engine::transmit);
    // A single value sets the lattice itself; only lists become a grid.
    CHECK(spec.rho_grid.empty());
    CHECK(spec.lattice.intracell_distance == doctest::Approx(0.2 * spec.lattice.cell_size));
    CHECK(spec.lattice.cell_count == 500);
    CHECK(spec.lattice.areal_density == doctest::Approx(5.7e10));
    REQUIRE(spec.probe_grid.size() == 5);
    CHECK((spec.probe_grid[4] - rb85_d2().frequency()) / gamma == doctest::Approx(10.0));
    CHECK((spec.probe_grid[2] - rb85_d2().frequency()) / gamma == doctest::Approx(0.0).epsilon(1e-6));
    // The lattice laser sits 10 gamma above the line: a = 2 pi c / omega_L.
    const double omega_l = rb85_d2().frequency() + 10.0 * gamma;
    CHECK(spec.lattice.cell_size == doctest::Approx(2.0 * constants::pi * constants::c / omega_l).epsilon(1e-14));
}

TEST_CASE("frequency units agree") {
    const std::string base = "lattice_detuning = 10 gamma\nrho = 0 a\nareal_density = 5.7e10 m^-2\nplanes = 2\n";
    const auto mhz = parse_config(base + "probe = 6 MHz\n", Command::transmit);
    const auto gam = parse_config(base + "probe = 1 gamma\n", Command::transmit);
    const auto rad = parse_config(base + "probe = " + std::to_string(2.0 * constants::pi * 6e6) + " rad/s\n",
                                  Command::transmit);
    CHECK(mhz.spec.probe_grid[0] == doctest::Approx(gam.spec.probe_grid[0]).epsilon(1e-15));
    CHECK(rad.spec.probe_grid[0] == doctest::Approx(gam.spec.probe_grid[0]).epsilon(1e-12));
    const auto list = parse_config(base + "probe = [-1, 0, 2.5] gamma\n", Command::transmit);
    CHECK(list.spec.probe_grid.size() == 3);
}

TEST_CASE("bundled configurations load") {
    const std::filesystem::path dir = std::filesystem::path(BILATTICE_SOURCE_DIR) / "configs";
    const auto fig6 = load_config(dir / "fig6.cfg", Command::transmit);
    CHECK(fig6.title == "fig6");
    CHECK(fig6.spec.lattice.areal_density == doctest::Approx(5.7e10));
    CHECK(fig6.spec.lattice.cell_count == 500000);
    CHECK(fig6.spec.probe_grid.size() == 4801);

    const std::pair<const char*, Command> all[] = {
        {"fig2a", Command::bands},    {"fig2b", Command::gaps},     {"fig4", Command::gaps},
        {"fig5", Command::gaps},      {"fig6", Command::transmit},  {"fig7", Command::transmit},
        {"fig8", Command::transmit},  {"fig9", Command::cavity},    {"fig10", Command::cavity},
    };
    for (const auto& [name, command] : all) {
        testing::WarningCapture capture;
        CHECK_NOTHROW(load_config(dir / (std::string(name) + ".cfg"), command));
        CHECK_MESSAGE(capture.messages().empty(), name);
    }
    CHECK_THROWS_AS(load_config(dir / "missing.cfg", Command::transmit), ConfigError);
}

TEST_CASE("configuration errors name the line and key") {
    CHECK(error_of(std::string(kMinimal) + "bogus = 3\n") == "test.cfg:7: unknown key 'bogus'");
    CHECK(error_of(std::string(kMinimal) + "rho = 0.1 a\n").find("test.cfg:7: key 'rho' repeats line 3") == 0);
    CHECK(error_of("rho = 0.2 parsecs\n").find("test.cfg:1: key 'rho': unit 'parsecs'") == 0);
    CHECK(error_of("lattice_detuning = 10 gamma\nrho = 0 a\nplanes = 2\nprobe = 1 gamma\n")
              .find("areal_density") != std::string::npos);
    CHECK(error_of("lattice_detuning = 10 gamma\nrho = 1.2 a\nareal_density = 1 m^-2\nprobe = 1 gamma\n")
              .find("test.cfg:2: key 'rho'") == 0);
    CHECK(error_of("beta = 2.5\nareal_density = 1 m^-2\nprobe = 1 gamma\n").find("key 'beta'") != std::string::npos);
    CHECK(error_of("rho = 0 a\nplanes = 3\nareal_density = 1 m^-2\nprobe = 1 gamma\n").find("key 'planes'") != std::string::npos);
    CHECK(error_of("rho = 0 a\nplanes = 2\nprobe = linspace(0, 1) gamma\nareal_density = 1 m^-2\n").find("linspace") != std::string::npos);
    CHECK(error_of("just text\n") == "test.cfg:1: expected 'key = value'");
    CHECK(error_of("engine = gaps\n").find("does not match") != std::string::npos);
    CHECK(error_of("n_q = 10\n", Command::scan).find("'engine'") != std::string::npos);
    CHECK(error_of(kMinimal).empty());
}

TEST_CASE("unused keys warn") {
    testing::WarningCapture capture;
    parse_config(std::string(kMinimal) + "n_bz = 4\n", Command::transmit);
    CHECK(capture.contains("'n_bz' is not used"));
}

TEST_CASE("scan adds parameter columns and honours the engine key") {
    const auto run = parse_config("engine = gaps\nrho = 0.1 a\n", Command::scan);
    CHECK(run.spec.engine == sweep::Engine::gaps);
    CHECK(run.spec.parameter_columns);
    CHECK(parse_command("cavity") == Command::cavity);
    CHECK_THROWS_AS(parse_command("plot"), ConfigError);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("table round trips") {
    const Table t = sample_table();
    for (Format f : {Format::csv, Format::json}) {
        std::istringstream in(serialize(t, f));
        const Table back = read_table(in, f);
        CHECK(back.columns == t.columns);
        REQUIRE(back.rows.size() == t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            for (std::size_t j = 0; j < t.columns.size(); ++j) {
                const double want = round_significant(t.rows[i][j]);
                const double got = back.rows[i][j];
                CHECK((got == want || (std::isnan(got) && std::isnan(want))));
            }
        }
        // Writing twice gives identical bytes.
        CHECK(serialize(t, f) == serialize(t, f));
    }
    CHECK(serialize(t, Format::csv).rfind("x,y\n1,0.123456789012\n", 0) == 0);
    CHECK(serialize(t, Format::csv).find("nan") != std::string::npos);
    CHECK(serialize(t, Format::json).find("null") != std::string::npos);
    CHECK(round_significant(0.1234567890123456) == 0.123456789012);
}

TEST_CASE("an empty table is a header-only file") {
    Table t;
    t.columns = {"omega_p_rad_s", "T"};
    CHECK(serialize(t, Format::csv) == "omega_p_rad_s,T\n");
    std::istringstream in(serialize(t, Format::json));
    const Table back = read_table(in, Format::json);
    CHECK(back.columns == t.columns);
    CHECK(back.rows.empty());

    const auto path = std::filesystem::temp_directory_path() / "bilattice_empty.csv";
    write_table(t, path, Format::csv);
    std::ifstream file(path);
    std::stringstream content;
    content << file.rdbuf();
    CHECK(content.str() == "omega_p_rad_s,T\n");
    std::filesystem::remove(path);
}

TEST_CASE("transmit tables read back with the documented schema") {
    RunConfig run = parse_config(kMinimal, Command::transmit);
    const Table t = sweep::run_sweep(run.spec).table;
    std::istringstream in(serialize(t, Format::csv));
    const Table back = read_table(in, Format::csv);
    CHECK(back.columns == std::vector<std::string>{"omega_p_rad_s", "detuning_gamma", "T", "R", "A"});
    CHECK(back.rows.size() == 5);
    CHECK_THROWS(read_table(*std::make_unique<std::istringstream>("a,b\n1\n"), Format::csv));
}
