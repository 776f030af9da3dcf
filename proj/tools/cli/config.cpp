#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cli/cli.hpp"
#include "nuhlab/errors.hpp"

namespace nuhlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment and reports the bracket balance of what is left.
std::string strip_comment(const std::string& line, int& depth) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '#') return line.substr(0, i);
        else if (c == '[' || c == '{') ++depth;
        else if (c == ']' || c == '}') --depth;
    }
    return line;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

}  // namespace

void Config::fail(const std::string& key, const std::string& what) const {
    throw ConfigError(origin_ + ": key '" + key + "': " + what);
}

void Config::set(const std::string& key, Json value) {
    if (!valid_key(key)) throw ConfigError(origin_ + ": invalid key '" + key + "'");
    values_[key] = std::move(value);
}

void Config::set_default(const std::string& key, Json value) {
    if (!has(key)) set(key, std::move(value));
}

void Config::set_from_text(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string text = trim(assignment.substr(eq + 1));
    Json v = Json::parse(text, nullptr, false);
    if (v.is_discarded()) v = text;
    set(key, std::move(v));
}

const Json& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(key, "missing");
    return *it;
}

double Config::number(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
}

long Config::integer(const std::string& key) const {
    const Json& v = raw(key);
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long>(d);
    }
    fail(key, "expected an integer");
}

std::string Config::string(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> Config::numbers(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
        if (!e.is_number()) fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<long> Config::integers(const std::string& key) const {
    std::vector<long> out;
    for (double d : numbers(key)) {
        if (d != std::floor(d)) fail(key, "expected an array of integers");
        out.push_back(static_cast<long>(d));
    }
    return out;
}

Vec2 Config::vec2(const std::string& key) const {
    const auto v = numbers(key);
    if (v.size() != 2) fail(key, "expected two numbers");
    return {v[0], v[1]};
}

IntMatrix2 Config::int_matrix(const std::string& key) const {
    const auto r = rows(key, 2);
    if (r.size() != 2) fail(key, "expected a 2x2 integer matrix [[a, b], [c, d]]");
    for (const auto& row : r)
        for (double d : row)
            if (d != std::floor(d) || std::abs(d) > 1e9) fail(key, "expected integer entries");
    return {static_cast<std::int64_t>(r[0][0]), static_cast<std::int64_t>(r[0][1]),
            static_cast<std::int64_t>(r[1][0]), static_cast<std::int64_t>(r[1][1])};
}

std::vector<std::vector<double>> Config::rows(const std::string& key, std::size_t width) const {
    const Json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of rows");
    std::vector<std::vector<double>> out;
    for (const Json& row : v) {
        if (!row.is_array() || row.size() != width)
            fail(key, "expected rows of " + std::to_string(width) + " numbers");
        std::vector<double> r;
        for (const Json& e : row) {
            if (!e.is_number()) fail(key, "expected rows of numbers");
            r.push_back(e.get<double>());
        }
        out.push_back(std::move(r));
    }
    return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_.items())
        if (!allowed.contains(key)) throw ConfigError(origin_ + ": unknown key '" + key + "'");
}

Config parse_config(std::istream& in, const std::string& origin) {
    Config cfg(origin);
    std::string line, key, text;
    int depth = 0, line_no = 0, start_line = 0;
    const auto flush = [&] {
        Json v = Json::parse(text, nullptr, false);
        if (v.is_discarded())
            throw ConfigError(origin + ":" + std::to_string(start_line) + ": value of '" + key + "' is not valid JSON");
        if (cfg.has(key)) throw ConfigError(origin + ":" + std::to_string(start_line) + ": duplicate key '" + key + "'");
        cfg.set(key, std::move(v));
        key.clear();
        text.clear();
        depth = 0;
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = strip_comment(line, depth);
        if (!key.empty()) {
            text += "\n" + body;
            if (depth <= 0) flush();
            continue;
        }
        const std::string t = trim(body);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        key = trim(t.substr(0, eq));
        text = trim(t.substr(eq + 1));
        start_line = line_no;
        if (!valid_key(key)) throw ConfigError(origin + ":" + std::to_string(line_no) + ": invalid key '" + key + "'");
        if (depth <= 0) flush();
    }
    if (!key.empty()) throw ConfigError(origin + ":" + std::to_string(start_line) + ": unterminated value of '" + key + "'");
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

}  // namespace nuhlab::cli
