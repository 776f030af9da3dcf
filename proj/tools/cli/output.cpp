#include "cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "nuhlab/errors.hpp"

namespace nuhlab::cli {

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

}  // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

long integer_at_least(const Config& cfg, const std::string& key, long lo) {
    const long v = cfg.integer(key);
    if (v < lo) throw ConfigError(cfg.origin() + ": key '" + key + "' must be >= " + std::to_string(lo));
    return v;
}

double number_in(const Config& cfg, const std::string& key, double lo, double hi) {
    const double v = cfg.number(key);
    if (!(v >= lo && v <= hi))
        throw ConfigError(cfg.origin() + ": key '" + key + "' must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
    return v;
}

Json to_json(Vec2 v) { return Json::array({v.x, v.y}); }

std::string fmt(long v) { return std::to_string(v); }

Json Run::header() const {
    return Json{{"artifact", "nuhlab"}, {"version", NUHLAB_VERSION}, {"subcommand", subcommand},
                {"seed", seed}, {"config", cfg.values()}};
}

void Run::warn(const std::string& kind, const std::string& message) {
    warnings.push_back(Json{{"kind", kind}, {"message", message}});
}

void Run::write_csv(const std::string& name, const CsvRow& columns, const std::vector<CsvRow>& rows) {
    std::filesystem::create_directories(out_dir);
    auto out = open_output(out_dir / name);
    out << "# " << header().dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_cell(columns[i]);
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
    files.push_back(name);
}

void Run::write_plot(const std::string& name, const std::array<std::string, 2>& columns,
                     const std::vector<std::array<double, 2>>& points) {
    std::filesystem::create_directories(out_dir);
    auto out = open_output(out_dir / name);
    out << "# " << columns[0] << ' ' << columns[1] << '\n';
    for (const auto& p : points) out << fmt(p[0]) << ' ' << fmt(p[1]) << '\n';
    files.push_back(name);
}

void Run::write_report(const Json& result, const Json& timing) {
    std::filesystem::create_directories(out_dir);
    Json report = header();
    report["result"] = result;
    report["warnings"] = warnings;
    if (!timing.is_null()) report["timing"] = timing;
    const std::string name = subcommand + ".json";
    auto out = open_output(out_dir / name);
    out << report.dump(2) << '\n';
    files.push_back(name);
}

}  // namespace nuhlab::cli
