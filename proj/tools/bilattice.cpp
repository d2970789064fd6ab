// Command-line front end: one subcommand per engine plus a generic scan.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bilattice/cli_io.hpp"
#include "bilattice/sweep.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericError = 2;

struct Options {
    std::string config;
    std::string out = "-";
    std::string format = "csv";
    std::optional<unsigned> workers;
    bool quiet = false;
};

int run(bilattice::io::Command command, const Options& opt) {
    using namespace bilattice;
    io::Format format;
    io::RunConfig run_config;
    try {
        format = io::parse_format(opt.format);
        run_config = io::load_config(opt.config, command);
        if (opt.workers) run_config.spec.workers = *opt.workers;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    sweep::SweepResult result;
    try {
        result = sweep::run_sweep(run_config.spec);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumericError;
    }
    if (!run_config.title.empty()) result.table.metadata.insert(result.table.metadata.begin(), {"title", run_config.title});

    try {
        if (opt.out == "-") {
            io::write_table(result.table, std::cout, format);
        } else {
            io::write_table(result.table, opt.out, format);
        }
        if (!result.errors.empty()) {
            const std::string log_path = opt.out == "-" ? "" : opt.out + ".errors.log";
            std::ofstream log_file;
            if (!log_path.empty()) log_file.open(log_path);
            std::ostream& log = log_path.empty() ? std::cerr : log_file;
            for (const auto& e : result.errors) log << e.parameters << ": " << e.message << '\n';
            std::cerr << "warning: " << result.errors.size() << " grid cells failed"
                      << (log_path.empty() ? "" : "; see " + log_path) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kNumericError;
    }
    if (!opt.quiet) {
        for (const auto& [key, value] : result.table.metadata) std::cerr << "# " << key << ": " << value << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using bilattice::io::Command;
    CLI::App app{"Band structure, probe spectra and cavity response of two-atom optical lattices"};
    app.require_subcommand(1);

    Options opt;
    std::optional<Command> chosen;
    const std::pair<const char*, const char*> commands[] = {
        {"bands", "Polariton dispersion over the quasi-momentum grid"},
        {"gaps", "Band-gap edges and widths versus intracell distance"},
        {"transmit", "Probe transmission, reflection and absorption spectra"},
        {"cavity", "Cavity output spectra"},
        {"scan", "Generic sweep; the config selects the engine"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "Configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output file, '-' for stdout")->capture_default_str();
        sub->add_option("--format", opt.format, "Table format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--workers", opt.workers, "Worker threads (0 = all cores); overrides the config");
        sub->add_flag("--quiet", opt.quiet, "Do not print run metadata");
        const std::string n = name;
        sub->callback([&chosen, n] { chosen = bilattice::io::parse_command(n); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    return run(*chosen, opt);
}
