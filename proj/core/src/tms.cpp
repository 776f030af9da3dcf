#include "nuhlab/tms.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "nuhlab/errors.hpp"

namespace nuhlab::tms {

MarkovGraph::MarkovGraph(int vertices, std::vector<std::pair<int, int>> edges, std::vector<std::string> labels)
    : n_(vertices), edges_(std::move(edges)), labels_(std::move(labels)) {
    if (n_ < 0) throw InvalidGraph("negative vertex count");
    if (!labels_.empty() && static_cast<int>(labels_.size()) != n_) throw InvalidGraph("label count mismatch");
    out_.resize(static_cast<std::size_t>(n_));
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : edges_) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_)
            throw InvalidGraph("edge " + std::to_string(u) + " -> " + std::to_string(v) + " out of range");
        if (!seen.insert({u, v}).second)
            throw InvalidGraph("duplicate edge " + std::to_string(u) + " -> " + std::to_string(v));
        out_[static_cast<std::size_t>(u)].push_back(v);
    }
}

bool MarkovGraph::has_edge(int u, int v) const {
    const auto& s = successors(u);
    return std::find(s.begin(), s.end(), v) != s.end();
}

MarkovGraph MarkovGraph::full_shift(int k) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v) e.emplace_back(u, v);
    return {k, e};
}

MarkovGraph MarkovGraph::golden_mean() { return {2, {{0, 0}, {0, 1}, {1, 0}}}; }

MarkovGraph MarkovGraph::renewal(int n) {
    if (n < 1) throw InvalidGraph("renewal graph needs n >= 1");
    std::vector<std::pair<int, int>> e{{0, 0}};
    for (int k = 0; k + 1 < n; ++k) e.emplace_back(k, k + 1);
    for (int k = 1; k < n; ++k) e.emplace_back(k, 0);
    return {n, e};
}

MarkovGraph MarkovGraph::cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int k = 0; k < n; ++k) e.emplace_back(k, (k + 1) % n);
    return {n, e};
}

MarkovGraph read_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int max_vertex = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long u = 0, v = 0;
        if (!(ls >> u)) continue;
        std::string rest;
        if (!(ls >> v) || (ls >> rest) || u < 0 || v < 0)
            throw InvalidGraph("line " + std::to_string(lineno) + ": expected 'u v'");
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        max_vertex = std::max({max_vertex, static_cast<int>(u), static_cast<int>(v)});
    }
    return {max_vertex + 1, edges};
}

void write_edge_list(std::ostream& out, const MarkovGraph& g) {
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

std::vector<std::vector<int>> irreducible_components(const MarkovGraph& g) {
    // Iterative Tarjan.
    const int n = g.vertices();
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;
    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] >= 0) continue;
        std::vector<std::pair<int, std::size_t>> call{{root, 0}};
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = 1;
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            const auto& succ = g.successors(v);
            if (pos < succ.size()) {
                const int w = succ[pos++];
                const auto ww = static_cast<std::size_t>(w);
                if (index[ww] < 0) {
                    index[ww] = low[ww] = counter++;
                    stack.push_back(w);
                    on_stack[ww] = 1;
                    call.emplace_back(w, 0);
                } else if (on_stack[ww]) {
                    low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[ww]);
                }
                continue;
            }
            const int done = v;
            call.pop_back();
            if (!call.empty()) {
                const int parent = call.back().first;
                low[static_cast<std::size_t>(parent)] = std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done)]);
            }
            if (low[static_cast<std::size_t>(done)] == index[static_cast<std::size_t>(done)]) {
                std::vector<int> comp;
                int w = -1;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = 0;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                if (comp.size() > 1 || g.has_edge(comp[0], comp[0])) comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end());
    return comps;
}

namespace {

std::vector<int> position_map(const MarkovGraph& g, const std::vector<int>& comp) {
    if (comp.empty()) throw InvalidGraph("empty component");
    std::vector<int> pos(static_cast<std::size_t>(g.vertices()), -1);
    for (std::size_t i = 0; i < comp.size(); ++i) pos[static_cast<std::size_t>(comp[i])] = static_cast<int>(i);
    return pos;
}

// Dense adjacency of the component.
std::vector<std::vector<double>> restricted(const MarkovGraph& g, const std::vector<int>& comp) {
    const auto pos = position_map(g, comp);
    std::vector<std::vector<double>> a(comp.size(), std::vector<double>(comp.size(), 0.0));
    for (std::size_t i = 0; i < comp.size(); ++i)
        for (int w : g.successors(comp[i]))
            if (pos[static_cast<std::size_t>(w)] >= 0) a[i][static_cast<std::size_t>(pos[static_cast<std::size_t>(w)])] = 1.0;
    return a;
}

struct Perron {
    double rho = 0.0;
    std::vector<double> vec;
    int iterations = 0;
};

Perron power_iteration(const std::vector<std::vector<double>>& a, bool transpose) {
    const std::size_t n = a.size();
    std::vector<double> x(n, 1.0), y(n);
    double prev = 0.0;
    for (int it = 1; it <= 1000000; ++it) {
        // y = (A + I) x
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < n; ++j) s += (transpose ? a[j][i] : a[i][j]) * x[j];
            y[i] = s;
        }
        double xy = 0.0, xx = 0.0, top = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xy += x[i] * y[i];
            xx += x[i] * x[i];
            top = std::max(top, y[i]);
        }
        const double rq = xy / xx;
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y[i] / top;
            moved = std::max(moved, std::abs(v - x[i]));
            x[i] = v;
        }
        if (it > 1 && std::abs(rq - prev) < 1e-12 * rq && moved < 1e-14) {
            double total = 0.0;
            for (double v : x) total += v;
            for (double& v : x) v /= total;
            return {rq - 1.0, x, it};
        }
        prev = rq;
    }
    throw NonConvergence("power iteration did not settle");
}

}  // namespace

PeriodInfo period(const MarkovGraph& g, const std::vector<int>& component) {
    const auto pos = position_map(g, component);
    std::vector<int> level(component.size(), -1);
    std::queue<int> q;
    level[0] = 0;
    q.push(component[0]);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int w : g.successors(u)) {
            const int pw = pos[static_cast<std::size_t>(w)];
            if (pw < 0 || level[static_cast<std::size_t>(pw)] >= 0) continue;
            level[static_cast<std::size_t>(pw)] = level[static_cast<std::size_t>(pos[static_cast<std::size_t>(u)])] + 1;
            q.push(w);
        }
    }
    int p = 0;
    for (std::size_t i = 0; i < component.size(); ++i) {
        if (level[i] < 0) throw InvalidGraph("component is not strongly connected");
        for (int w : g.successors(component[i])) {
            const int pw = pos[static_cast<std::size_t>(w)];
            if (pw < 0) continue;
            p = std::gcd(p, std::abs(level[i] + 1 - level[static_cast<std::size_t>(pw)]));
        }
    }
    if (p == 0) throw InvalidGraph("component carries no cycle");
    PeriodInfo info;
    info.period = p;
    info.classes.resize(static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < component.size(); ++i)
        info.classes[static_cast<std::size_t>(level[i] % p)].push_back(component[i]);
    return info;
}

EntropyResult gurevich_entropy(const MarkovGraph& g, const std::vector<int>& component) {
    const auto a = restricted(g, component);
    const Perron right = power_iteration(a, false);
    EntropyResult r;
    r.spectral_radius = right.rho;
    r.entropy = std::log(right.rho);
    r.iterations = right.iterations;
    r.right_vector = right.vec;
    // Loop count diagnostic.
    const std::size_t n = a.size();
    std::vector<std::vector<double>> power = a;
    for (int k = 1; k <= 20; ++k) {
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += power[i][i];
        if (tr > 0.0) r.loop_estimate = std::log(tr) / k;
        std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (power[i][l] != 0.0)
                    for (std::size_t j = 0; j < n; ++j) next[i][j] += power[i][l] * a[l][j];
        power = std::move(next);
    }
    return r;
}

ParryMeasure parry_mme(const MarkovGraph& g, const std::vector<int>& component) {
    const auto a = restricted(g, component);
    const Perron right = power_iteration(a, false);
    const Perron left = power_iteration(a, true);
    const std::size_t n = a.size();
    const double lam = right.rho;
    ParryMeasure m;
    m.vertices = component;
    m.entropy = std::log(lam);
    m.transition.assign(n, std::vector<double>(n, 0.0));
    double norm_lr = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm_lr += left.vec[i] * right.vec[i];
    m.stationary.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.stationary[i] = left.vec[i] * right.vec[i] / norm_lr;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            m.transition[i][j] = a[i][j] * right.vec[j] / (lam * right.vec[i]);
            row += m.transition[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) m.transition[i][j] /= row;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double p = m.transition[i][j];
            if (p > 0.0) m.chain_entropy -= m.stationary[i] * p * std::log(p);
        }
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += m.stationary[i] * m.transition[i][j];
        m.stationarity_error = std::max(m.stationarity_error, std::abs(s - m.stationary[j]));
    }
    return m;
}

double graph_entropy(const MarkovGraph& g) {
    double h = 0.0;
    for (const auto& c : irreducible_components(g)) h = std::max(h, gurevich_entropy(g, c).entropy);
    return h;
}

std::vector<double> entropy_ladder(const std::function<MarkovGraph(int)>& level, int levels) {
    std::vector<double> out;
    std::optional<MarkovGraph> prev;
    for (int k = 1; k <= levels; ++k) {
        MarkovGraph gk = level(k);
        if (prev) {
            if (gk.vertices() < prev->vertices()) throw InvalidGraph("ladder level lost vertices");
            for (const auto& [u, v] : prev->edges())
                if (!gk.has_edge(u, v)) throw InvalidGraph("ladder level " + std::to_string(k) + " drops an edge");
        }
        const double h = graph_entropy(gk);
        if (!out.empty() && h < out.back() - 1e-12)
            throw MonotonicityViolation("entropy fell from " + std::to_string(out.back()) + " to " + std::to_string(h));
        out.push_back(h);
        prev = std::move(gk);
    }
    return out;
}

}  // namespace nuhlab::tms
