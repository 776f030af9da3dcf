#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "nuhlab/errors.hpp"
#include "nuhlab/tms.hpp"

using namespace nuhlab;
using namespace nuhlab::tms;

namespace {

const double kGolden = (1 + std::sqrt(5.0)) / 2;

std::vector<int> all_vertices(const MarkovGraph& g) {
    std::vector<int> v(static_cast<std::size_t>(g.vertices()));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

// Warshall closure; a vertex is in a nontrivial class iff it reaches itself.
std::vector<std::vector<int>> closure_components(const MarkovGraph& g) {
    const int n = g.vertices();
    std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
    for (auto [u, v] : g.edges()) r[u][v] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (r[i][k])
                for (int j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = 1;
    std::vector<std::vector<int>> out;
    std::vector<char> used(n, 0);
    for (int i = 0; i < n; ++i) {
        if (used[i] || !r[i][i]) continue;
        std::vector<int> comp;
        for (int j = 0; j < n; ++j)
            if (r[i][j] && r[j][i]) {
                comp.push_back(j);
                used[j] = 1;
            }
        out.push_back(comp);
    }
    return out;
}

// gcd of the lengths of closed walks through v up to length n_max, by matrix powers
int walk_gcd(const MarkovGraph& g, int v, int n_max) {
    const int n = g.vertices();
    std::vector<char> reach(n, 0);
    reach[v] = 1;
    int p = 0;
    for (int len = 1; len <= n_max; ++len) {
        std::vector<char> next(n, 0);
        for (auto [a, b] : g.edges())
            if (reach[a]) next[b] = 1;
        reach = next;
        if (reach[v]) p = std::gcd(p, len);
    }
    return p;
}

}  // namespace

TEST_CASE("graph construction") {
    CHECK_THROWS_AS(MarkovGraph(2, {{0, 2}}), InvalidGraph);
    CHECK_THROWS_AS(MarkovGraph(2, {{0, 1}, {0, 1}}), InvalidGraph);
    std::istringstream in("# golden\n0 0\n0 1\n1 0\n");
    const auto g = read_edge_list(in);
    CHECK(g.vertices() == 2);
    CHECK(g.edges().size() == 3);
    std::ostringstream out;
    write_edge_list(out, g);
    std::istringstream again(out.str());
    CHECK(read_edge_list(again).edges() == g.edges());
    std::istringstream bad("0 x\n");
    CHECK_THROWS_AS(read_edge_list(bad), InvalidGraph);
}

TEST_CASE("components") {
    const auto full = MarkovGraph::full_shift(2);
    const auto c = irreducible_components(full);
    REQUIRE(c.size() == 1);
    CHECK(c[0].size() == 2);

    // two disjoint cycles and one connecting edge
    const MarkovGraph two(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}});
    CHECK(irreducible_components(two) == closure_components(two));
    CHECK(irreducible_components(two).size() == 2);

    const MarkovGraph dag(4, {{0, 1}, {1, 2}, {0, 3}, {3, 2}});
    CHECK(irreducible_components(dag).empty());
}

TEST_CASE("components match the transitive closure on random graphs") {
    std::mt19937_64 rng(12);
    std::bernoulli_distribution edge(0.12);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < 12; ++u)
            for (int v = 0; v < 12; ++v)
                if (edge(rng)) edges.emplace_back(u, v);
        const MarkovGraph g(12, edges);
        REQUIRE(irreducible_components(g) == closure_components(g));
    }
}

TEST_CASE("period and cyclic classes") {
    const auto tri = MarkovGraph::cycle(3);
    const auto p3 = period(tri, all_vertices(tri));
    CHECK(p3.period == 3);
    REQUIRE(p3.classes.size() == 3);
    for (const auto& cls : p3.classes) CHECK(cls.size() == 1);
    for (std::size_t k = 0; k < 3; ++k) CHECK(tri.has_edge(p3.classes[k][0], p3.classes[(k + 1) % 3][0]));

    CHECK(period(MarkovGraph::full_shift(2), {0, 1}).period == 1);

    // 4-cycle with a chord giving cycle lengths 4 and 6
    const MarkovGraph g(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 4}, {4, 5}, {5, 2}});
    const auto comp = irreducible_components(g);
    REQUIRE(comp.size() == 1);
    const auto pi = period(g, comp[0]);
    CHECK(pi.period == walk_gcd(g, 0, 40));
    CHECK(pi.period == 2);
    for (std::size_t k = 0; k < pi.classes.size(); ++k)
        for (int u : pi.classes[k])
            for (int v : g.successors(u)) {
                const auto& nxt = pi.classes[(k + 1) % pi.classes.size()];
                CHECK(std::find(nxt.begin(), nxt.end(), v) != nxt.end());
            }
}

TEST_CASE("entropy") {
    for (int k = 1; k <= 6; ++k) {
        const auto g = MarkovGraph::full_shift(k);
        CHECK(gurevich_entropy(g, all_vertices(g)).entropy == std::log(double(k)));
    }
    const auto gm = MarkovGraph::golden_mean();
    CHECK(std::abs(gurevich_entropy(gm, {0, 1}).entropy - std::log(kGolden)) < 1e-10);
    const auto tri = MarkovGraph::cycle(3);
    CHECK(std::abs(gurevich_entropy(tri, all_vertices(tri)).entropy) < 1e-12);
    CHECK(graph_entropy(MarkovGraph(3, {{0, 1}, {1, 2}})) == 0.0);
}

TEST_CASE("Parry measure") {
    const auto two = MarkovGraph::full_shift(2);
    const auto p2 = parry_mme(two, {0, 1});
    for (double s : p2.stationary) CHECK(std::abs(s - 0.5) < 1e-12);
    for (const auto& row : p2.transition)
        for (double x : row) CHECK(std::abs(x - 0.5) < 1e-12);
    CHECK(std::abs(p2.chain_entropy - std::log(2.0)) < 1e-12);

    const auto gm = parry_mme(MarkovGraph::golden_mean(), {0, 1});
    CHECK(std::abs(gm.transition[0][0] - 1 / kGolden) < 1e-12);
    CHECK(std::abs(gm.transition[0][1] - 1 / (kGolden * kGolden)) < 1e-12);
    CHECK(std::abs(gm.chain_entropy - std::log(kGolden)) < 1e-10);
    CHECK(gm.stationarity_error < 1e-12);

    const MarkovGraph g(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 4}, {4, 5}, {5, 2}, {2, 1}, {0, 0}});
    const auto c = irreducible_components(g);
    const auto pm = parry_mme(g, c[0]);
    CHECK(pm.stationarity_error < 1e-12);
    CHECK(std::abs(pm.chain_entropy - gurevich_entropy(g, c[0]).entropy) < 1e-10);
}

TEST_CASE("entropy ladders") {
    const auto full = entropy_ladder([](int k) { return MarkovGraph::full_shift(k); }, 6);
    REQUIRE(full.size() == 6);
    for (int k = 1; k <= 6; ++k) CHECK(full[k - 1] == std::log(double(k)));

    const auto renewal = entropy_ladder([](int k) { return MarkovGraph::renewal(k); }, 10);
    CHECK(std::abs(renewal[1] - std::log(kGolden)) < 1e-10);
    for (std::size_t k = 1; k < renewal.size(); ++k) CHECK(renewal[k] > renewal[k - 1]);
    CHECK(renewal.back() < std::log(2.0));

    CHECK(entropy_ladder([](int) { return MarkovGraph::golden_mean(); }, 1).size() == 1);
    CHECK_THROWS_AS(entropy_ladder([](int k) { return MarkovGraph::cycle(k + 1); }, 3), InvalidGraph);
}
