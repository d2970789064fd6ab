// Run configuration files and table serialization.
//
// A configuration is a list of `key = value [unit]` lines; `#` starts a comment.
// Values are a number, a list `[v1, v2, ...]` or `linspace(start, stop, count)`,
// followed by a unit. Frequencies are detunings from the reference transition
// (units gamma, MHz, kHz, Hz, rad/s; MHz, kHz and Hz are cycles per second).
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bilattice/sweep.hpp"
#include "bilattice/table.hpp"

namespace bilattice::io {

enum class Command { bands, gaps, transmit, cavity, scan };
enum class Format { csv, json };

/// Throws ConfigError for an unknown name.
Command parse_command(std::string_view name);
Format parse_format(std::string_view name);
const char* command_name(Command command);

struct RunConfig {
    Command command = Command::transmit;
    std::string title;
    sweep::SweepSpec spec;
};

/// Parses and validates a configuration for `command`. Errors are ConfigError
/// messages that start with "<source>:<line>:" when a line is at fault.
RunConfig parse_config(std::string_view text, Command command, std::string_view source = "config");

/// Reads the file and calls parse_config.
RunConfig load_config(const std::filesystem::path& path, Command command);

/// Sorted list of accepted configuration keys.
std::vector<std::string> known_keys();

/// CSV: a header row, then one row per record with 12 significant digits and
/// "nan" for missing values. JSON: {"columns", "rows", "metadata"} with null for NaN.
void write_table(const Table& table, std::ostream& out, Format format);
void write_table(const Table& table, const std::filesystem::path& path, Format format);

Table read_table(std::istream& in, Format format);
Table read_table(const std::filesystem::path& path, Format format);

/// Value rounded to 12 significant digits, as written to tables.
double round_significant(double value);

}  // namespace bilattice::io
