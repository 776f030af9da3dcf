#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>

#include "cli/output.hpp"
#include "nuhlab/cocycle.hpp"
#include "nuhlab/errors.hpp"
#include "nuhlab/pliss.hpp"
#include "nuhlab/preimage_stats.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::cli {

namespace {

Json lyapunov_json(const cocycle::LyapunovEstimate& e) {
    return Json{{"exponents", e.exponents},
                {"halfwidths", e.halfwidths},
                {"ci_halfwidth", e.ci_halfwidth},
                {"sum", e.exponents[0] + e.exponents[1]},
                {"mean_log_det", e.mean_log_det},
                {"n_iter", e.n_iter}};
}

void write_exponents(Run& run, const cocycle::LyapunovEstimate& e) {
    run.write_csv("lyapunov.csv", {"index", "exponent", "halfwidth"},
                  {{"1", fmt(e.exponents[0]), fmt(e.halfwidths[0])}, {"2", fmt(e.exponents[1]), fmt(e.halfwidths[1])}});
}

cocycle::QrOptions qr_options(Run& run) {
    run.cfg.set_default("burn_in", 100);
    run.cfg.set_default("batches", 20);
    return {integer_at_least(run.cfg, "burn_in", 0), static_cast<int>(integer_at_least(run.cfg, "batches", 2))};
}

maps::TorusEndo torus_map(Run& run) {
    if (run.source != "map") throw ConfigError(run.subcommand + " needs --map");
    return make_torus_map(run.cfg);
}

maps::TorusPoint base_point(Run& run) {
    run.cfg.set_default("x", Json::array({0.3, 0.7}));
    return maps::TorusPoint::reduced(run.cfg.vec2("x"));
}

Vec2 unit_vector(Run& run, const std::string& key, Json fallback) {
    run.cfg.set_default(key, std::move(fallback));
    const Vec2 v = run.cfg.vec2(key);
    if (!(norm(v) > 0.0)) throw ConfigError(run.cfg.origin() + ": key '" + key + "' must be a nonzero vector");
    return normalized(v);
}

preimage::TreeOptions tree_options(Run& run) {
    run.cfg.set_default("budget", 1000000);
    return {integer_at_least(run.cfg, "budget", 1), run.workers};
}

std::vector<double> eta_grid(Run& run) {
    if (run.cfg.has("eta_grid")) return run.cfg.numbers("eta_grid");
    std::vector<double> eta;
    for (int k = 0; k < 40; ++k) eta.push_back(std::pow(10.0, -4.0 + 0.1 * k));
    eta.push_back(std::numbers::pi / 2.0);
    return eta;
}

Json size_summary(std::vector<double> xs) {
    if (xs.empty()) return nullptr;
    return Json{{"median", stats::quantile(xs, 0.5)},
                {"q10", stats::quantile(xs, 0.1)},
                {"q90", stats::quantile(xs, 0.9)}};
}

}  // namespace

Json run_lyapunov(Run& run) {
    run.cfg.set_default("steps", 100000);
    const long steps = integer_at_least(run.cfg, "steps", 1000);
    const auto opt = qr_options(run);
    auto rng = stats::sample_rng(run.seed, 0);
    if (run.source == "table") {
        const auto table = make_table(run.cfg);
        run.cfg.set_default("start", Json::array({0, 0.1, 0.2}));
        const auto st = run.cfg.numbers("start");
        if (st.size() != 3) throw ConfigError(run.cfg.origin() + ": key 'start': expected [disc, r, phi]");
        const auto e = cocycle::lyapunov_qr(table, {static_cast<int>(st[0]), st[1], st[2]}, steps, rng, opt);
        write_exponents(run, e);
        Json res = lyapunov_json(e);
        res["system"] = "billiard";
        res["sum_within_ci"] = std::abs(e.exponents[0] + e.exponents[1]) <= e.halfwidths[0] + e.halfwidths[1];
        return res;
    }
    if (run.source != "map") throw ConfigError("lyapunov needs --map or --table");
    validate_map_keys(run.cfg);
    if (run.cfg.string("kind") == "viana") {
        const auto map = make_viana_map(run.cfg);
        run.cfg.set_default("start", Json::array({0.1234, 0.3}));
        const Vec2 st = run.cfg.vec2("start");
        const auto e = cocycle::lyapunov_qr(map, {st.x, st.y}, steps, rng, opt);
        run.cfg.set_default("adapted_steps", steps);
        auto rng_adapted = stats::sample_rng(run.seed, 0, 1);
        const auto tail = maps::viana_adaptedness(map, {st.x, st.y}, integer_at_least(run.cfg, "adapted_steps", 10),
                                                  rng_adapted);
        write_exponents(run, e);
        Json res = lyapunov_json(e);
        res["system"] = "viana";
        res["a0"] = map.a0();
        res["I0"] = Json::array({map.I0().lo, map.I0().hi});
        res["both_positive"] = e.exponents[1] - e.halfwidths[1] > 0.0;
        res["adaptedness"] = Json{{"mean_abs_log_t", tail.mean}, {"cauchy_tail", tail.cauchy_tail}, {"n", tail.n}};
        return res;
    }
    const auto map = make_torus_map(run.cfg);
    run.cfg.set_default("start", Json::array({0.1234, 0.5678}));
    const auto e = cocycle::lyapunov_qr(map, maps::TorusPoint::reduced(run.cfg.vec2("start")), steps, rng, opt);
    write_exponents(run, e);
    Json res = lyapunov_json(e);
    res["system"] = std::string(map.family_name());
    res["log_degree"] = std::log(static_cast<double>(map.degree()));
    return res;
}

Json run_preimage_condition(Run& run) {
    const auto map = torus_map(run);
    run.cfg.set_default("grid", 20);
    run.cfg.set_default("directions", 16);
    const int grid = static_cast<int>(integer_at_least(run.cfg, "grid", 1));
    const int dirs = static_cast<int>(integer_at_least(run.cfg, "directions", 1));
    run.cfg.set_default("N", 4);
    const int N = static_cast<int>(integer_at_least(run.cfg, "N", 0));
    const auto est = preimage::c_lower_estimate(map, grid, dirs, N, tree_options(run));
    std::vector<CsvRow> rows;
    for (const auto& r : est.rows)
        rows.push_back({fmt(r.x.x), fmt(r.x.y), fmt(r.v.x), fmt(r.v.y), fmt(r.N), fmt(r.value)});
    run.write_csv("preimage-condition.csv", {"x", "y", "vx", "vy", "N", "I"}, rows);
    return Json{{"N", N},
                {"c_lower", est.value},
                {"positive", est.value > 0.0},
                {"estimate_kind", "sampled infimum over the grid and direction fan"},
                {"samples", static_cast<long>(grid) * grid * dirs},
                {"argmin_x", Json::array({est.argmin_x.x, est.argmin_x.y})},
                {"argmin_v", to_json(est.argmin_v)}};
}

Json run_angle_tail(Run& run) {
    const auto map = torus_map(run);
    const auto x = base_point(run);
    const Vec2 E = unit_vector(run, "reference", Json::array({1.0, 0.0}));
    run.cfg.set_default("samples", 10000);
    run.cfg.set_default("depth", 30);
    run.cfg.set_default("bootstrap", 200);
    run.cfg.set_default("tail_fraction", 0.2);
    const long M = integer_at_least(run.cfg, "samples", 1);
    const int depth = static_cast<int>(integer_at_least(run.cfg, "depth", 20));
    const auto eta = eta_grid(run);
    preimage::TailOptions opt;
    opt.bootstrap = static_cast<int>(integer_at_least(run.cfg, "bootstrap", 10));
    opt.tail_fraction = number_in(run.cfg, "tail_fraction", 0.01, 1.0);
    opt.workers = run.workers;
    const auto fit = preimage::angle_tail_experiment(map, x, E, M, depth, eta, run.seed, opt);

    std::vector<CsvRow> rows;
    std::vector<std::array<double, 2>> plot;
    bool monotone = true;
    for (std::size_t i = 0; i < fit.eta_grid.size(); ++i) {
        rows.push_back({fmt(fit.eta_grid[i]), fmt(fit.empirical_cdf[i])});
        if (i > 0 && fit.eta_grid[i] >= fit.eta_grid[i - 1] && fit.empirical_cdf[i] < fit.empirical_cdf[i - 1])
            monotone = false;
        if (fit.empirical_cdf[i] > 0.0) plot.push_back({std::log(fit.eta_grid[i]), std::log(fit.empirical_cdf[i])});
    }
    run.write_csv("angle-tail.csv", {"eta", "cdf"}, rows);
    run.write_plot("angle-tail.dat", {"log_eta", "log_cdf"}, plot);
    if (fit.unconverged > 0)
        run.warn("DepthTooSmall", std::to_string(fit.unconverged) + " pre-orbits excluded by the depth test");
    return Json{{"beta_hat", fit.beta_hat},
                {"A_hat", fit.A_hat},
                {"ci", Json::array({fit.ci.first, fit.ci.second})},
                {"ci_excludes_zero", fit.ci.first > 0.0},
                {"cdf_monotone", monotone},
                {"samples", fit.samples},
                {"used", fit.used},
                {"unconverged", fit.unconverged}};
}

Json run_moment_check(Run& run) {
    const auto map = torus_map(run);
    const auto x = base_point(run);
    const Vec2 v = unit_vector(run, "v", Json::array({0.0, 1.0}));
    run.cfg.set_default("s", 0.25);
    run.cfg.set_default("N_list", Json::array({2, 3, 4, 5, 6}));
    const double s = number_in(run.cfg, "s", 0.0, 0.5);
    std::vector<int> Ns;
    for (long n : run.cfg.integers("N_list")) Ns.push_back(static_cast<int>(n));
    const auto rep = preimage::moment_bound_check(map, x, v, s, Ns, tree_options(run));
    std::vector<CsvRow> rows;
    std::vector<std::array<double, 2>> plot;
    for (const auto& r : rep.rows) {
        rows.push_back({fmt(r.N), fmt(r.moment), fmt(r.log_moment)});
        plot.push_back({static_cast<double>(r.N), r.log_moment});
    }
    run.write_csv("moment-check.csv", {"N", "moment", "log_moment"}, rows);
    run.write_plot("moment-check.dat", {"N", "log_moment"}, plot);
    return Json{{"s", rep.s}, {"chi_hat", rep.chi_hat}, {"monotone", rep.monotone}, {"chi_positive", rep.chi_hat > 0.0}};
}

Json run_hyperbolic_times(Run& run) {
    const auto map = torus_map(run);
    const auto x = base_point(run);
    const Vec2 v = unit_vector(run, "v", Json::array({0.0, 1.0}));
    run.cfg.set_default("s", 0.25);
    run.cfg.set_default("chi_bar", 0.1);
    run.cfg.set_default("samples", 10000);
    run.cfg.set_default("depth", 30);
    const double s = number_in(run.cfg, "s", 0.0, 0.5);
    const double chi_bar = run.cfg.number("chi_bar");
    const long M = integer_at_least(run.cfg, "samples", 1);
    const int depth = static_cast<int>(integer_at_least(run.cfg, "depth", 1));
    const auto st = preimage::hyperbolic_time_stats(map, x, v, chi_bar, s, M, depth, run.seed, run.workers);

    std::vector<CsvRow> rows;
    std::vector<std::array<double, 2>> plot;
    for (int n = 0; n <= depth + 1; ++n) {
        const long count = n < static_cast<int>(st.histogram.size()) ? st.histogram[static_cast<std::size_t>(n)] : 0;
        const double tail = n < static_cast<int>(st.tail_frequency.size()) ? st.tail_frequency[static_cast<std::size_t>(n)] : 0.0;
        rows.push_back({fmt(n), fmt(count), fmt(tail)});
        if (tail > 0.0) plot.push_back({static_cast<double>(n), std::log(tail)});
    }
    run.write_csv("hyperbolic-times.csv", {"n", "count_n0", "tail_frequency"}, rows);
    run.write_plot("hyperbolic-times.dat", {"n", "log_tail_frequency"}, plot);
    if (st.censored > 0)
        run.warn("Censored", std::to_string(st.censored) + " samples had no hyperbolic time within depth");
    return Json{{"samples", st.samples},
                {"censored", st.censored},
                {"tail_slope", st.slope_available ? Json(st.tail_slope) : Json(nullptr)},
                {"size_proxy", size_summary(st.size_proxy)},
                {"size_proxy_kind", "exp(-n0), a hyperbolic-time surrogate for the local unstable size"}};
}

Json run_pliss(Run& run) {
    std::vector<double> seq;
    std::optional<maps::TorusEndo> map;
    if (run.cfg.has("input")) {
        std::ifstream in(run.cfg.string("input"));
        if (!in) throw ConfigError("cannot open sequence file " + run.cfg.string("input"));
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                seq.push_back(std::stod(line));
            } catch (const std::exception&) {
                throw ConfigError("bad number '" + line + "' in " + run.cfg.string("input"));
            }
        }
    } else if (run.source == "map") {
        map = make_torus_map(run.cfg);
        run.cfg.set_default("start", Json::array({0.1234, 0.5678}));
        run.cfg.set_default("length", 200);
        seq = cocycle::center_log_expansions(*map, maps::TorusPoint::reduced(run.cfg.vec2("start")),
                                             static_cast<int>(integer_at_least(run.cfg, "length", 1)));
    } else {
        throw ConfigError("pliss needs --input or --map");
    }
    const double a1 = run.cfg.number("alpha1");
    const double a2 = run.cfg.number("alpha2");
    const double eps = run.cfg.number("eps");
    const auto res = cocycle::pliss_times(seq, a1, a2, eps);

    std::vector<char> is_time(seq.size(), 0);
    for (long t : res.times) is_time[static_cast<std::size_t>(t)] = 1;
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < seq.size(); ++i) rows.push_back({fmt(static_cast<long>(i)), fmt(seq[i]), fmt(static_cast<long>(is_time[i]))});
    run.write_csv("pliss.csv", {"index", "a", "pliss_time"}, rows);
    if (res.hypothesis_violated)
        run.warn("HypothesisViolated", "window average " + fmt(res.window_average) + " exceeds alpha2");

    Json out{{"length", static_cast<long>(seq.size())},
             {"count", static_cast<long>(res.times.size())},
             {"density", res.density},
             {"delta_bound", res.delta_bound},
             {"window_average", res.window_average},
             {"hypothesis_violated", res.hypothesis_violated},
             {"density_above_bound", res.density >= res.delta_bound - 1e-12}};
    if (run.cfg.has("chi")) {
        const double chi = run.cfg.number("chi");
        out["z_chi"] = cocycle::z_chi_test(seq, chi, static_cast<int>(seq.size()));
        if (map && run.cfg.has("samples")) {
            const auto fr = cocycle::z_chi_fraction(*map, chi, static_cast<int>(seq.size()),
                                                    integer_at_least(run.cfg, "samples", 1), run.seed, run.workers);
            out["z_chi_fraction"] = Json{{"fraction", fr.fraction}, {"ci_halfwidth", fr.ci_halfwidth},
                                         {"samples", fr.samples}, {"passed", fr.passed}, {"skipped", fr.skipped}};
        }
    }
    return out;
}

Json run_validate_acs(Run& run) {
    const auto map = torus_map(run);
    const auto E = map.linear_part();
    const auto m = maps::validate_acs_matrix(E);
    Json res{{"family", std::string(map.family_name())},
             {"degree", map.degree()},
             {"volume_preserving", map.volume_preserving()},
             {"det", m.det},
             {"gcd", m.gcd},
             {"not_homothety", m.not_homothety},
             {"no_unit_eigenvalue", m.no_unit_eigenvalue},
             {"det_over_gcd_above_four", m.det_over_gcd_above_four},
             {"matrix_conditions", m.all_pass()}};
    std::vector<CsvRow> rows{{"not_homothety", fmt(long(m.not_homothety))},
                             {"no_unit_eigenvalue", fmt(long(m.no_unit_eigenvalue))},
                             {"det_over_gcd_above_four", fmt(long(m.det_over_gcd_above_four))}};

    run.cfg.set_default("grid", 20);
    run.cfg.set_default("directions", 16);
    run.cfg.set_default("N", 4);
    const auto c = preimage::c_lower_estimate(map, static_cast<int>(integer_at_least(run.cfg, "grid", 1)),
                                              static_cast<int>(integer_at_least(run.cfg, "directions", 1)),
                                              static_cast<int>(integer_at_least(run.cfg, "N", 0)), tree_options(run));
    res["c_lower"] = c.value;
    res["c_lower_positive"] = c.value > 0.0;
    rows.push_back({"c_lower", fmt(c.value)});

    run.cfg.set_default("steps", 1000000);
    run.cfg.set_default("start", Json::array({0.1234, 0.5678}));
    const auto opt = qr_options(run);
    auto rng = stats::sample_rng(run.seed, 0);
    const auto p = cocycle::pesin_entropy_estimate(map, maps::TorusPoint::reduced(run.cfg.vec2("start")),
                                                   integer_at_least(run.cfg, "steps", 1000), rng, opt);
    const double log_det = std::log(static_cast<double>(std::abs(E.det())));
    res["pesin"] = Json{{"entropy", p.entropy},
                        {"ci_halfwidth", p.ci_halfwidth},
                        {"log_degree", p.log_degree},
                        {"exponents", p.lyapunov.exponents},
                        {"log_abs_det", log_det},
                        {"exceeds_log_det", p.entropy - p.ci_halfwidth > log_det}};
    rows.push_back({"pesin_entropy", fmt(p.entropy)});
    rows.push_back({"pesin_ci_halfwidth", fmt(p.ci_halfwidth)});
    run.write_csv("validate-acs.csv", {"check", "value"}, rows);
    return res;
}

}  // namespace nuhlab::cli
