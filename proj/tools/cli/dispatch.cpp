#include <chrono>
#include <map>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cli/output.hpp"
#include "nuhlab/errors.hpp"

namespace nuhlab::cli {

namespace {

enum class Source { None, Map, Table, MapOrTable };

struct Override {
    const char* flag;
    const char* key;
    const char* help;
};

struct SubcommandSpec {
    const char* name;
    const char* help;
    Command run;
    Source source;
    std::vector<Override> overrides;
};

const std::vector<SubcommandSpec>& subcommands() {
    static const std::vector<SubcommandSpec> specs = {
        {"lyapunov", "QR Lyapunov exponents of a map or billiard table", run_lyapunov, Source::MapOrTable,
         {{"--steps", "steps", "orbit length"}}},
        {"preimage-condition", "sampled infimum of I(x, v, f^N) / N over a grid and direction fan",
         run_preimage_condition, Source::Map,
         {{"--N", "N", "tree depth"}, {"--grid", "grid", "grid points per axis"}, {"--directions", "directions", "direction fan size"}}},
        {"angle-tail", "empirical CDF of the angle between a fixed direction and E^u over sampled pre-orbits",
         run_angle_tail, Source::Map,
         {{"--samples", "samples", "number of pre-orbits"}, {"--depth", "depth", "pre-orbit depth"}}},
        {"moment-check", "exact-tree s-moments of |(df^N)^-1 v| and their decay rate", run_moment_check, Source::Map, {}},
        {"hyperbolic-times", "distribution of first backward hyperbolic times", run_hyperbolic_times, Source::Map,
         {{"--samples", "samples", "number of pre-orbits"}, {"--depth", "depth", "pre-orbit depth"}}},
        {"billiard-run", "trajectory dump with invariant and adaptedness diagnostics", run_billiard_run, Source::Table,
         {{"--steps", "steps", "number of collisions"}}},
        {"billiard-orbits", "periodic-orbit database", run_billiard_orbits, Source::Table,
         {{"--max-period", "max_period", "largest period (<= 8)"}}},
        {"mme-report", "expansion-rate report over periodic orbits", run_mme_report, Source::Table,
         {{"--max-period", "max_period", "largest period (<= 8)"}}},
        {"pressure-check", "Birkhoff mean of minus the geometric potential against lambda^+", run_pressure_check,
         Source::Table, {{"--steps", "steps", "number of collisions"}}},
        {"pliss", "finite-window Pliss times of a sequence", run_pliss, Source::Map,
         {{"--input", "input", "file with one number per line"}}},
        {"tms", "irreducible components, period, Gurevich entropy and Parry measure of a graph", run_tms, Source::None,
         {{"--graph", "graph", "edge-list file"},
          {"--ladder", "ladder", "nested family: renewal or full"},
          {"--levels", "levels", "number of ladder levels"}}},
        {"validate-acs", "matrix conditions, sampled C(f) and the Pesin entropy estimate of a sheared map",
         run_validate_acs, Source::Map, {{"--N", "N", "tree depth"}, {"--grid", "grid", "grid points per axis"}}},
    };
    return specs;
}

const std::set<std::string> kPathKeys = {"input", "graph", "ladder"};

void print_summary(std::ostream& out, const Run& run, const Json& result) {
    out << "nuhlab " << run.subcommand << " (seed " << run.seed << ")\n";
    for (const auto& [key, value] : result.items()) {
        if (value.is_primitive()) out << "  " << key << ": " << value.dump() << '\n';
        else if (value.is_array() && value.size() <= 6 && !value.empty() && value.front().is_primitive())
            out << "  " << key << ": " << value.dump() << '\n';
        else out << "  " << key << ": (" << value.size() << " entries)\n";
    }
    for (const auto& w : run.warnings)
        out << "  warning " << w["kind"].get<std::string>() << ": " << w["message"].get<std::string>() << '\n';
    out << "  wrote:";
    for (const auto& f : run.files) out << ' ' << (run.out_dir / f).string();
    out << '\n';
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"nuhlab: experiments on non-uniformly hyperbolic maps, billiards and Markov shifts", "nuhlab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string out_dir = ".";
    bool record_timing = false;
    std::vector<std::string> sets;
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--workers", workers, "worker threads; never changes the output")->check(CLI::Range(1, 1024));
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_flag("--record-timing", record_timing, "add wall time to the JSON report");
    app.add_option("--set", sets, "override a config key: key=value (JSON value)");

    struct Chosen {
        std::string map, table;
        std::map<std::string, std::string> overrides;
    };
    std::map<std::string, Chosen> chosen;
    std::map<std::string, CLI::App*> apps;
    for (const auto& spec : subcommands()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        Chosen& c = chosen[spec.name];
        if (spec.source == Source::Map || spec.source == Source::MapOrTable)
            sub->add_option("--map", c.map, "map config file");
        if (spec.source == Source::Table || spec.source == Source::MapOrTable)
            sub->add_option("--table", c.table, "billiard table config file");
        for (const auto& o : spec.overrides) sub->add_option(o.flag, c.overrides[o.key], o.help);
        apps[spec.name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "ConfigError: " << e.what() << '\n';
        return 2;
    }

    const SubcommandSpec* spec = nullptr;
    for (const auto& s : subcommands())
        if (apps[s.name]->parsed()) spec = &s;
    if (!spec) {
        err << "ConfigError: no subcommand given\n";
        return 2;
    }
    const Chosen& c = chosen[spec->name];

    Run run;
    run.subcommand = spec->name;
    run.workers = workers;
    run.out_dir = out_dir;
    try {
        if (!c.map.empty() && !c.table.empty()) throw ConfigError("give either --map or --table, not both");
        if (!c.map.empty()) {
            run.cfg = load_config(c.map);
            run.source = "map";
        } else if (!c.table.empty()) {
            run.cfg = load_config(c.table);
            run.source = "table";
        }
        for (const auto& s : sets) run.cfg.set_from_text(s);
        for (const auto& [key, value] : c.overrides) {
            if (value.empty()) continue;
            if (kPathKeys.contains(key)) run.cfg.set(key, value);
            else run.cfg.set_from_text(key + "=" + value);
        }
        if (run.source == "map") validate_map_keys(run.cfg);
        else if (run.source == "table") validate_table_keys(run.cfg);
        else run.cfg.require_known(experiment_keys());
        if (seed) run.seed = *seed;
        else if (run.cfg.has("seed")) run.seed = static_cast<std::uint64_t>(integer_at_least(run.cfg, "seed", 0));
        run.cfg.set("seed", run.seed);

        const auto t0 = std::chrono::steady_clock::now();
        const Json result = spec->run(run);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.write_report(result, record_timing ? Json{{"wall_time_s", wall}} : Json());
        print_summary(out, run, result);
        if (record_timing) out << "  wall time: " << wall << " s\n";
        return 0;
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const Json::exception& e) {
        err << "ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace nuhlab::cli
