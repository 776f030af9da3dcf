#include <fstream>

#include "cli/output.hpp"
#include "nuhlab/errors.hpp"

namespace nuhlab::cli {

namespace {

Json ladder(Run& run) {
    const std::string family = run.cfg.string("ladder");
    run.cfg.set_default("levels", 8);
    const int levels = static_cast<int>(integer_at_least(run.cfg, "levels", 1));
    std::function<tms::MarkovGraph(int)> level;
    if (family == "renewal") level = [](int k) { return tms::MarkovGraph::renewal(k); };
    else if (family == "full") level = [](int k) { return tms::MarkovGraph::full_shift(k); };
    else throw ConfigError("unknown ladder family '" + family + "' (expected renewal or full)");
    const auto h = tms::entropy_ladder(level, levels);
    std::vector<CsvRow> rows;
    std::vector<std::array<double, 2>> plot;
    for (std::size_t k = 0; k < h.size(); ++k) {
        rows.push_back({fmt(static_cast<long>(k + 1)), fmt(h[k])});
        plot.push_back({static_cast<double>(k + 1), h[k]});
    }
    run.write_csv("tms-ladder.csv", {"level", "entropy"}, rows);
    run.write_plot("tms-ladder.dat", {"level", "entropy"}, plot);
    return Json{{"family", family}, {"levels", levels}, {"entropies", h}, {"non_decreasing", true}};
}

}  // namespace

Json run_tms(Run& run) {
    if (run.cfg.has("ladder")) return ladder(run);
    if (!run.cfg.has("graph")) throw ConfigError("tms needs --graph or --ladder");
    const std::string path = run.cfg.string("graph");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open graph file " + path);
    const tms::MarkovGraph g = [&] {
        try {
            return tms::read_edge_list(in);
        } catch (const InvalidGraph& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }();

    Json comps = Json::array();
    std::vector<CsvRow> rows;
    double best = 0.0;
    const auto components = tms::irreducible_components(g);
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
        const auto& c = components[ci];
        const auto per = tms::period(g, c);
        const auto ent = tms::gurevich_entropy(g, c);
        const auto parry = tms::parry_mme(g, c);
        best = std::max(best, ent.entropy);
        std::vector<int> class_of(static_cast<std::size_t>(g.vertices()), -1);
        for (std::size_t k = 0; k < per.classes.size(); ++k)
            for (int v : per.classes[k]) class_of[static_cast<std::size_t>(v)] = static_cast<int>(k);
        for (std::size_t i = 0; i < c.size(); ++i)
            rows.push_back({fmt(static_cast<long>(ci)), fmt(c[i]), fmt(class_of[static_cast<std::size_t>(c[i])]),
                            fmt(parry.stationary[i]), fmt(ent.right_vector[i])});
        comps.push_back(Json{{"vertices", c},
                             {"period", per.period},
                             {"cyclic_classes", per.classes},
                             {"entropy", ent.entropy},
                             {"spectral_radius", ent.spectral_radius},
                             {"power_iterations", ent.iterations},
                             {"loop_estimate", ent.loop_estimate},
                             {"parry", Json{{"stationary", parry.stationary},
                                            {"transition", parry.transition},
                                            {"chain_entropy", parry.chain_entropy},
                                            {"stationarity_error", parry.stationarity_error}}}});
    }
    run.write_csv("tms.csv", {"component", "vertex", "cyclic_class", "stationary", "right_vector"}, rows);
    if (components.empty()) run.warn("NoComponent", "graph has no irreducible component with an edge");
    return Json{{"vertices", g.vertices()},
                {"edges", static_cast<long>(g.edges().size())},
                {"components", comps},
                {"graph_entropy", best}};
}

}  // namespace nuhlab::cli
