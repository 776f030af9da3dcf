#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nuhlab/billiard.hpp"
#include "nuhlab/linalg.hpp"
#include "nuhlab/maps.hpp"
#include "nuhlab/tms.hpp"
#include "nuhlab/viana.hpp"

namespace nuhlab::cli {

using Json = nlohmann::json;

/// Flat key/value run configuration. Files hold one `key = <JSON value>` per line; `#` starts a
/// comment and bracketed values may span lines. Every getter throws ConfigError naming the key.
class Config {
public:
    Config() = default;
    explicit Config(std::string origin) : origin_(std::move(origin)) {}

    void set(const std::string& key, Json value);
    void set_default(const std::string& key, Json value);
    /// key=value with a JSON value; bare words are taken as strings.
    void set_from_text(const std::string& assignment);
    bool has(const std::string& key) const { return values_.contains(key); }
    const Json& raw(const std::string& key) const;

    double number(const std::string& key) const;
    long integer(const std::string& key) const;
    std::string string(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<long> integers(const std::string& key) const;
    Vec2 vec2(const std::string& key) const;
    IntMatrix2 int_matrix(const std::string& key) const;
    std::vector<std::vector<double>> rows(const std::string& key, std::size_t width) const;

    /// Throws ConfigError for the first key outside allowed.
    void require_known(const std::set<std::string>& allowed) const;
    const Json& values() const { return values_; }
    const std::string& origin() const { return origin_; }

private:
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
    std::string origin_ = "<command line>";
    Json values_ = Json::object();
};

Config parse_config(std::istream& in, const std::string& origin);
Config load_config(const std::filesystem::path& path);

/// Keys understood by the experiment drivers, accepted in every map or table file.
const std::set<std::string>& experiment_keys();

/// kind = linear | sheared | product.
maps::TorusEndo make_torus_map(const Config& cfg);
/// kind = viana.
maps::VianaMap make_viana_map(const Config& cfg);
/// lattice, discs, coordinates, tau_max, optional horizon_rays.
billiard::BilliardTable make_table(const Config& cfg);
/// Validates the key set of a map or table file against its kind.
void validate_map_keys(const Config& cfg);
void validate_table_keys(const Config& cfg);

/// Runs one subcommand; returns 0 on success, 1 on a computation error, 2 on a config error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nuhlab::cli
