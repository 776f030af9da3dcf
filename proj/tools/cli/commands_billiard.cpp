#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "cli/output.hpp"
#include "nuhlab/errors.hpp"
#include "nuhlab/orbits.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::cli {

namespace {

billiard::BilliardTable table_for(Run& run) {
    if (run.source != "table") throw ConfigError(run.subcommand + " needs --table");
    return make_table(run.cfg);
}

billiard::CollisionState start_state(Run& run, const billiard::BilliardTable& table) {
    run.cfg.set_default("start", Json::array({0, 0.1, 0.2}));
    const auto st = run.cfg.numbers("start");
    if (st.size() != 3 || st[0] != std::floor(st[0]) || st[0] < 0 || st[0] >= table.size())
        throw ConfigError(run.cfg.origin() + ": key 'start': expected [disc, r, phi] with a valid disc index");
    if (!(std::abs(st[2]) < std::numbers::pi / 2))
        throw ConfigError(run.cfg.origin() + ": key 'start': phi must satisfy |phi| < pi/2");
    return {static_cast<int>(st[0]), st[1], st[2]};
}

int max_period(Run& run) {
    run.cfg.set_default("max_period", 6);
    const long p = integer_at_least(run.cfg, "max_period", 2);
    if (p > 8) throw ConfigError(run.cfg.origin() + ": key 'max_period' must be <= 8");
    return static_cast<int>(p);
}

void horizon_warning(Run& run, const billiard::BilliardTable& table) {
    if (!table.finite_horizon_validated())
        run.warn("HorizonNotValidated", "table has no horizon_rays key; finite horizon was not checked");
}

std::string points_text(const billiard::PeriodicOrbit& o) {
    std::string s;
    for (const auto& p : o.points) {
        if (!s.empty()) s += ';';
        s += fmt(p.disc) + ' ' + fmt(p.r) + ' ' + fmt(p.phi);
    }
    return s;
}

Json failure_counts(const billiard::OrbitDatabase& db) {
    std::map<std::string, long> kinds;
    for (const auto& f : db.failures) ++kinds[f.kind];
    Json out = Json::object();
    for (const auto& [k, n] : kinds) out[k] = n;
    return out;
}

}  // namespace

Json run_billiard_run(Run& run) {
    const auto table = table_for(run);
    horizon_warning(run, table);
    const auto start = start_state(run, table);
    run.cfg.set_default("steps", 100000);
    const long steps = integer_at_least(run.cfg, "steps", 1);
    const auto traj = billiard::trajectory(table, start, steps);
    std::vector<CsvRow> rows;
    rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& c = traj[k];
        rows.push_back({fmt(static_cast<long>(k + 1)), fmt(c.next.disc), fmt(c.next.r), fmt(c.next.phi), fmt(c.tau)});
    }
    run.write_csv("billiard-run.csv", {"step", "disc", "r", "phi", "tau"}, rows);

    const auto inv = billiard::check_invariants(table, start, steps);
    run.cfg.set_default("adapted_steps", steps);
    const auto tail = billiard::billiard_adaptedness(table, start, integer_at_least(run.cfg, "adapted_steps", 10));
    return Json{{"steps", inv.steps},
                {"tau_min", table.tau_min()},
                {"tau_max", table.tau_max()},
                {"Lambda", inv.Lambda},
                {"horizon_validated", table.finite_horizon_validated()},
                {"max_det_error", inv.max_det_error},
                {"cone_checks", inv.cone_checks},
                {"cone_violations", inv.cone_violations},
                {"min_expansion", inv.min_expansion},
                {"expansion_above_Lambda", inv.min_expansion >= inv.Lambda - 1e-12},
                {"max_reversal_error", inv.max_reversal_error},
                {"flight_range", Json::array({inv.min_flight, inv.max_flight})},
                {"adaptedness", Json{{"mean_abs_log_distance", tail.mean}, {"cauchy_tail", tail.cauchy_tail}, {"n", tail.n}}}};
}

Json run_billiard_orbits(Run& run) {
    const auto table = table_for(run);
    horizon_warning(run, table);
    const int P = max_period(run);
    const auto db = billiard::enumerate_orbits(table, P, run.workers);
    std::vector<CsvRow> rows;
    std::vector<long> counts(static_cast<std::size_t>(P + 1), 0);
    double max_grad = 0.0, max_closure = 0.0;
    for (const auto& o : db.orbits) {
        rows.push_back({o.itinerary.to_string(), fmt(o.period()), points_text(o), fmt(o.expansion_rate), fmt(o.min_angle_gap)});
        ++counts[static_cast<std::size_t>(o.period())];
        max_grad = std::max(max_grad, o.gradient_norm);
        max_closure = std::max(max_closure, o.closure_error);
    }
    run.write_csv("billiard-orbits.csv", {"itinerary", "p", "points", "expansion_rate", "min_angle_gap"}, rows);
    if (!db.failures.empty())
        run.warn("SolveFailures", std::to_string(db.failures.size()) + " itineraries did not yield an orbit");
    return Json{{"max_period", P},
                {"itineraries", db.itineraries},
                {"orbits", static_cast<long>(db.orbits.size())},
                {"count_by_period", counts},
                {"max_gradient_norm", max_grad},
                {"max_closure_error", max_closure},
                {"failures", failure_counts(db)}};
}

Json run_mme_report(Run& run) {
    const auto table = table_for(run);
    horizon_warning(run, table);
    const int P = max_period(run);
    run.cfg.set_default("delta_graze", 1e-6);
    const double delta = number_in(run.cfg, "delta_graze", 0.0, 1.0);
    const auto db = billiard::enumerate_orbits(table, P, run.workers);
    const auto rep = billiard::mme_criterion_report(table, db, delta);

    std::vector<CsvRow> rows;
    std::vector<std::array<double, 2>> plot;
    for (const auto& r : rep.rows) {
        rows.push_back({r.itinerary, fmt(r.period), fmt(r.expansion_rate), fmt(r.min_angle_gap), fmt(r.symmetry_class),
                        fmt(static_cast<long>(r.non_grazing))});
        plot.push_back({static_cast<double>(r.period), r.expansion_rate});
    }
    run.write_csv("mme-report.csv", {"itinerary", "p", "expansion_rate", "min_angle_gap", "symmetry_class", "non_grazing"}, rows);
    run.write_plot("mme-report.dat", {"p", "expansion_rate"}, plot);
    if (rep.no_data) run.warn("NoData", "no periodic orbit solved");
    double max_grad = 0.0;
    for (const auto& o : db.orbits) max_grad = std::max(max_grad, o.gradient_norm);
    return Json{{"max_period", rep.max_period},
                {"orbits", static_cast<long>(rep.rows.size())},
                {"count_by_period", rep.count_by_period},
                {"mean_rate", rep.mean_rate},
                {"min_rate", rep.min_rate},
                {"max_rate", rep.max_rate},
                {"spread", rep.spread},
                {"max_class_spread", rep.max_class_spread},
                {"log_Lambda", rep.log_Lambda},
                {"all_above_log_Lambda", rep.all_above_log_Lambda},
                {"entropy_lower_proxy", rep.entropy_lower_proxy},
                {"max_gradient_norm", max_grad},
                {"failures", rep.failures},
                {"failure_kinds", failure_counts(db)}};
}

Json run_pressure_check(Run& run) {
    const auto table = table_for(run);
    horizon_warning(run, table);
    const auto start = start_state(run, table);
    run.cfg.set_default("steps", 1000000);
    run.cfg.set_default("burn_in", 100);
    run.cfg.set_default("potential", "unstable");
    const std::string pot = run.cfg.string("potential");
    if (pot != "unstable" && pot != "stable")
        throw ConfigError(run.cfg.origin() + ": key 'potential' must be 'unstable' or 'stable'");
    auto rng = stats::sample_rng(run.seed, 0);
    const auto pc = billiard::pressure_zero_check(
        table, start, integer_at_least(run.cfg, "steps", 100000), rng,
        pot == "unstable" ? billiard::PotentialDirection::Unstable : billiard::PotentialDirection::Stable,
        integer_at_least(run.cfg, "burn_in", 0));
    if (pc.skipped > 0) run.warn("NearGrazing", std::to_string(pc.skipped) + " near-grazing steps skipped");
    run.write_csv("pressure-check.csv", {"quantity", "value"},
                  {{"birkhoff_minus_phi", fmt(pc.birkhoff_minus_phi)},
                   {"lambda_plus", fmt(pc.lambda_plus)},
                   {"residual", fmt(pc.residual)}});
    return Json{{"potential", pot},
                {"birkhoff_minus_phi", pc.birkhoff_minus_phi},
                {"lambda_plus", pc.lambda_plus},
                {"lambda_ci", pc.lambda_ci},
                {"residual", pc.residual},
                {"within_1e-3", pc.residual < 1e-3},
                {"steps", pc.steps},
                {"skipped", pc.skipped}};
}

}  // namespace nuhlab::cli
