#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cli/cli.hpp"

namespace nuhlab::cli {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string fmt(double v);
std::string fmt(long v);
inline std::string fmt(int v) { return fmt(static_cast<long>(v)); }

using CsvRow = std::vector<std::string>;

/// One invocation: merged config, seed, output directory and the files written so far.
/// Nothing that depends on the worker count or the clock reaches the files.
struct Run {
    std::string subcommand;
    Config cfg;
    std::string source;  // "map", "table" or empty
    std::uint64_t seed = 1;
    int workers = 1;
    std::filesystem::path out_dir = ".";
    Json warnings = Json::array();
    std::vector<std::string> files;

    Json header() const;
    void warn(const std::string& kind, const std::string& message);

    /// "# <header JSON>", the column line, then the rows; cells with commas or quotes are quoted.
    void write_csv(const std::string& name, const CsvRow& columns, const std::vector<CsvRow>& rows);
    /// Two-column whitespace-separated plot data with a commented column line.
    void write_plot(const std::string& name, const std::array<std::string, 2>& columns,
                    const std::vector<std::array<double, 2>>& points);
    /// <subcommand>.json: the header fields plus result and warnings.
    void write_report(const Json& result, const Json& timing);
};

using Command = Json (*)(Run&);

/// Range-checked getters that throw ConfigError.
long integer_at_least(const Config& cfg, const std::string& key, long lo);
double number_in(const Config& cfg, const std::string& key, double lo, double hi);
Json to_json(Vec2 v);

Json run_lyapunov(Run& run);
Json run_preimage_condition(Run& run);
Json run_angle_tail(Run& run);
Json run_moment_check(Run& run);
Json run_hyperbolic_times(Run& run);
Json run_pliss(Run& run);
Json run_validate_acs(Run& run);
Json run_billiard_run(Run& run);
Json run_billiard_orbits(Run& run);
Json run_mme_report(Run& run);
Json run_pressure_check(Run& run);
Json run_tms(Run& run);

}  // namespace nuhlab::cli
