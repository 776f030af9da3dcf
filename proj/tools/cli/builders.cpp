#include <cmath>

#include "cli/cli.hpp"
#include "nuhlab/errors.hpp"

namespace nuhlab::cli {

namespace {

std::set<std::string> with_experiment_keys(std::set<std::string> keys) {
    keys.insert(experiment_keys().begin(), experiment_keys().end());
    return keys;
}

template <class Fn>
auto as_config_error(const Config& cfg, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(cfg.origin() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.origin() + ": " + e.what());
    }
}

maps::CircleMap circle_map(const Config& cfg, const std::string& key) {
    const auto v = cfg.numbers(key);
    if (v.size() != 2 || v[0] != std::floor(v[0]))
        throw ConfigError(cfg.origin() + ": key '" + key + "': expected [degree, amplitude]");
    return {static_cast<std::int64_t>(v[0]), v[1]};
}

}  // namespace

const std::set<std::string>& experiment_keys() {
    static const std::set<std::string> keys = {
        "seed",      "x",         "v",          "start",   "steps",       "burn_in",   "batches",
        "N",         "N_list",    "grid",       "directions", "budget",   "samples",   "depth",
        "eta_grid",  "reference", "s",          "chi_bar", "chi",         "alpha1",    "alpha2",
        "eps",       "bootstrap", "tail_fraction", "length", "max_period", "delta_graze", "potential",
        "adapted_steps", "input", "graph", "ladder", "levels"};
    return keys;
}

void validate_map_keys(const Config& cfg) {
    const std::string kind = cfg.string("kind");
    if (kind == "linear") cfg.require_known(with_experiment_keys({"kind", "E"}));
    else if (kind == "sheared") cfg.require_known(with_experiment_keys({"kind", "E", "P", "t", "shear_sin", "shear_cos"}));
    else if (kind == "product") cfg.require_known(with_experiment_keys({"kind", "g1", "g2"}));
    else if (kind == "viana") cfg.require_known(with_experiment_keys({"kind", "d", "alpha", "a0", "margin"}));
    else throw ConfigError(cfg.origin() + ": unknown map kind '" + kind + "'");
}

void validate_table_keys(const Config& cfg) {
    cfg.require_known(with_experiment_keys({"lattice", "discs", "coordinates", "tau_max", "horizon_rays"}));
}

maps::TorusEndo make_torus_map(const Config& cfg) {
    validate_map_keys(cfg);
    const std::string kind = cfg.string("kind");
    if (kind == "viana") throw ConfigError(cfg.origin() + ": a torus map is required here, got kind 'viana'");
    return as_config_error(cfg, [&] {
        if (kind == "linear") return maps::TorusEndo::linear(cfg.int_matrix("E"));
        if (kind == "sheared") {
            std::vector<double> sn{1.0}, cs;
            if (cfg.has("shear_sin")) sn = cfg.numbers("shear_sin");
            if (cfg.has("shear_cos")) cs = cfg.numbers("shear_cos");
            return maps::TorusEndo::sheared(cfg.int_matrix("E"), cfg.int_matrix("P"), cfg.number("t"),
                                            maps::ShearFunction(sn, cs));
        }
        return maps::TorusEndo::product(circle_map(cfg, "g1"), circle_map(cfg, "g2"));
    });
}

maps::VianaMap make_viana_map(const Config& cfg) {
    validate_map_keys(cfg);
    if (cfg.string("kind") != "viana")
        throw ConfigError(cfg.origin() + ": a Viana map is required here, got kind '" + cfg.string("kind") + "'");
    return as_config_error(cfg, [&] {
        const int d = cfg.has("d") ? static_cast<int>(cfg.integer("d")) : 16;
        const double alpha = cfg.has("alpha") ? cfg.number("alpha") : 1e-2;
        const double a0 = cfg.has("a0") ? cfg.number("a0") : maps::preperiodic_quadratic_parameter();
        const double margin = cfg.has("margin") ? cfg.number("margin") : 0.05;
        return maps::VianaMap(a0, d, alpha, maps::find_invariant_interval(a0, alpha, margin));
    });
}

billiard::BilliardTable make_table(const Config& cfg) {
    validate_table_keys(cfg);
    billiard::Lattice lattice;
    if (cfg.has("lattice")) {
        if (cfg.raw("lattice").is_string()) {
            const std::string name = cfg.string("lattice");
            if (name == "square") lattice = billiard::Lattice::unit_square();
            else if (name == "hexagonal-three-site") lattice = billiard::Lattice::hexagonal_three_site();
            else throw ConfigError(cfg.origin() + ": unknown lattice '" + name + "'");
        } else {
            const auto b = cfg.rows("lattice", 2);
            if (b.size() != 2) throw ConfigError(cfg.origin() + ": key 'lattice': expected [[b1x, b1y], [b2x, b2y]]");
            lattice = {{b[0][0], b[0][1]}, {b[1][0], b[1][1]}};
        }
    }
    const std::string coords = cfg.has("coordinates") ? cfg.string("coordinates") : "cartesian";
    if (coords != "cartesian" && coords != "lattice")
        throw ConfigError(cfg.origin() + ": key 'coordinates': expected 'cartesian' or 'lattice'");
    std::vector<billiard::Disc> discs;
    for (const auto& row : cfg.rows("discs", 3)) {
        const Vec2 c = coords == "lattice" ? lattice.b1 * row[0] + lattice.b2 * row[1] : Vec2{row[0], row[1]};
        discs.push_back({c, row[2]});
    }
    return as_config_error(cfg, [&] {
        billiard::BilliardTable table(discs, cfg.number("tau_max"), lattice);
        if (cfg.has("horizon_rays")) table = table.with_validated_horizon(static_cast<int>(cfg.integer("horizon_rays")));
        return table;
    });
}

}  // namespace nuhlab::cli
