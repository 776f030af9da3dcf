#include "nuhlab/preimage_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nuhlab/cocycle.hpp"
#include "nuhlab/errors.hpp"
#include "nuhlab/parallel.hpp"
#include "nuhlab/preorbit.hpp"

namespace nuhlab::preimage {

namespace {

void check_budget(const maps::TorusEndo& map, int N, long budget) {
    if (N < 0) throw std::invalid_argument("tree depth must be non-negative");
    double leaves = 1.0;
    for (int k = 0; k < N; ++k) leaves *= double(map.degree());
    if (leaves > double(budget))
        throw BudgetExceeded(std::to_string(map.degree()) + "^" + std::to_string(N) +
                             " leaves exceed the budget of " + std::to_string(budget));
}

struct Node {
    Leaf leaf;
    maps::TorusPointX yx;
};

// The tree is walked in long double; leaves carry the rounded point.
void descend(const maps::TorusEndo& map, const Node& node, int remaining, std::vector<Node>& out) {
    if (remaining == 0) {
        out.push_back(node);
        return;
    }
    for (const maps::TorusPointX& yx : map.preimages_extended(node.yx)) {
        const maps::TorusPoint y = yx.rounded();
        const RealMatrix2 j = map.jacobian(y);
        descend(map, Node{{y, node.leaf.weight / std::abs(j.det()), j.inverse() * node.leaf.pullback}, yx},
                remaining - 1, out);
    }
}

std::vector<Node> tree_nodes(const maps::TorusEndo& map, maps::TorusPoint x, int N, const TreeOptions& opt) {
    check_budget(map, N, opt.budget);
    const maps::TorusPointX xx{x.x, x.y};
    const Node root{{x, 1.0, RealMatrix2::identity()}, xx};
    if (N == 0) return {root};
    const auto first = map.preimages_extended(xx);
    std::vector<std::vector<Node>> parts(first.size());
    parallel_for(first.size(), opt.workers, [&](std::size_t i) {
        const maps::TorusPoint y = first[i].rounded();
        const RealMatrix2 j = map.jacobian(y);
        descend(map, Node{{y, 1.0 / std::abs(j.det()), j.inverse()}, first[i]}, N - 1, parts[i]);
    });
    std::vector<Node> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

double log_norm(const RealMatrix2& m, Vec2 v) { return std::log(norm(m * v)); }

}  // namespace

std::vector<Leaf> preimage_leaves(const maps::TorusEndo& map, maps::TorusPoint x, int N,
                                  const TreeOptions& opt) {
    std::vector<Leaf> out;
    for (Node& n : tree_nodes(map, x, N, opt)) out.push_back(n.leaf);
    return out;
}

TreeSummary preimage_tree_summary(const maps::TorusEndo& map, maps::TorusPoint x, int N,
                                  const TreeOptions& opt) {
    TreeSummary s;
    const maps::TorusPointX xx{x.x, x.y};
    for (const Node& n : tree_nodes(map, x, N, opt)) {
        ++s.leaves;
        s.weight_sum += n.leaf.weight;
        maps::TorusPointX z = n.yx;
        for (int k = 0; k < N; ++k) z = map.apply_extended(z);
        s.max_roundtrip_error = std::max(s.max_roundtrip_error, static_cast<double>(maps::torus_distance(z, xx)));
    }
    return s;
}

double backward_functional(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, int N,
                           const TreeOptions& opt) {
    double sum = 0.0;
    for (const Leaf& leaf : preimage_leaves(map, x, N, opt)) sum += leaf.weight * log_norm(leaf.pullback, v);
    return sum;
}

CLowerEstimate c_lower_estimate(const maps::TorusEndo& map, int grid, int directions, int N,
                                const TreeOptions& opt) {
    if (grid < 1 || directions < 1) throw std::invalid_argument("grid and direction fan must be nonempty");
    check_budget(map, N, opt.budget);
    std::vector<Vec2> fan;
    for (int k = 0; k < directions; ++k) {
        const double a = std::numbers::pi * double(k) / double(directions);
        fan.push_back({std::cos(a), std::sin(a)});
    }
    const std::size_t points = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
    std::vector<FunctionalRow> rows(points * fan.size());
    const TreeOptions inner{opt.budget, 1};
    parallel_for(points, opt.workers, [&](std::size_t idx) {
        const maps::TorusPoint x{(double(idx / static_cast<std::size_t>(grid)) + 0.5) / grid,
                                 (double(idx % static_cast<std::size_t>(grid)) + 0.5) / grid};
        const auto leaves = preimage_leaves(map, x, N, inner);
        for (std::size_t k = 0; k < fan.size(); ++k) {
            double sum = 0.0;
            for (const Leaf& leaf : leaves) sum += leaf.weight * log_norm(leaf.pullback, fan[k]);
            rows[idx * fan.size() + k] = {x, fan[k], N, sum};
        }
    });
    CLowerEstimate out;
    out.N = N;
    out.value = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        const double per_step = N == 0 ? 0.0 : r.value / N;
        if (per_step < out.value) {
            out.value = per_step;
            out.argmin_x = r.x;
            out.argmin_v = r.v;
        }
    }
    out.rows = std::move(rows);
    return out;
}

stats::MeanCI monte_carlo_functional(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, int N,
                                     long samples, std::uint64_t seed, int workers) {
    std::vector<double> values(static_cast<std::size_t>(samples));
    parallel_for(values.size(), workers, [&](std::size_t i) {
        auto rng = stats::sample_rng(seed, i);
        const auto pre = maps::sample_preorbit(map, x, N, rng);
        double log_len = 0.0;
        Vec2 w = v;
        for (int k = 1; k <= N; ++k) {
            w = solve(map.jacobian(pre.branch[static_cast<std::size_t>(k)]), w);
            const double len = norm(w);
            log_len += std::log(len);
            w = w / len;
        }
        values[i] = log_len;
    });
    return stats::mean_ci(values);
}

double backward_moment(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, double s, int N,
                       const TreeOptions& opt) {
    double sum = 0.0;
    for (const Leaf& leaf : preimage_leaves(map, x, N, opt))
        sum += leaf.weight * std::exp(-s * log_norm(leaf.pullback, v));
    return sum;
}

MomentReport moment_bound_check(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, double s,
                                std::vector<int> N_list, const TreeOptions& opt) {
    if (!(s >= 0.0 && s <= 0.5)) throw std::invalid_argument("moment exponent s must lie in [0, 0.5]");
    if (N_list.empty()) throw std::invalid_argument("empty N list");
    std::sort(N_list.begin(), N_list.end());
    MomentReport out;
    out.s = s;
    std::vector<double> xs, ys;
    for (int N : N_list) {
        const double m = backward_moment(map, x, v, s, N, opt);
        out.rows.push_back({N, m, std::log(m)});
        xs.push_back(N);
        ys.push_back(std::log(m));
    }
    out.monotone = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (!(out.rows[i].moment < out.rows[i - 1].moment)) out.monotone = false;
    if (out.rows.size() >= 2 && xs.front() != xs.back()) out.chi_hat = -stats::least_squares(xs, ys).slope;
    return out;
}

TailFit angle_tail_experiment(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 E, long M, int depth,
                              std::vector<double> eta_grid, std::uint64_t seed, const TailOptions& opt) {
    if (eta_grid.empty()) throw std::invalid_argument("empty eta grid");
    std::sort(eta_grid.begin(), eta_grid.end());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> angles(static_cast<std::size_t>(M), nan);
    parallel_for(angles.size(), opt.workers, [&](std::size_t i) {
        auto rng = stats::sample_rng(seed, i);
        const auto pre = maps::sample_preorbit(map, x, depth, rng);
        try {
            angles[i] = line_angle(E, cocycle::unstable_direction(map, pre));
        } catch (const DepthTooSmall&) {
        }
    });
    TailFit fit;
    fit.samples = M;
    std::vector<double> ok;
    for (double a : angles) {
        if (std::isnan(a)) ++fit.unconverged;
        else ok.push_back(a);
    }
    fit.used = static_cast<long>(ok.size());
    std::sort(ok.begin(), ok.end());
    fit.eta_grid = eta_grid;
    for (double eta : eta_grid) {
        const auto below = std::upper_bound(ok.begin(), ok.end(), eta) - ok.begin();
        fit.empirical_cdf.push_back(ok.empty() ? 0.0 : double(below) / double(ok.size()));
    }
    const auto below_max = std::lower_bound(ok.begin(), ok.end(), eta_grid.back()) - ok.begin();
    if (below_max < 50)
        throw DegenerateTail(std::to_string(below_max) + " angles below the largest eta (need 50)");
    const auto tail_fit = [&](const std::vector<double>& sorted) {
        const std::size_t k = static_cast<std::size_t>(opt.tail_fraction * double(sorted.size()));
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < k; ++i) {
            if (!(sorted[i] > 0.0)) continue;
            lx.push_back(std::log(sorted[i]));
            ly.push_back(std::log(double(i + 1) / double(sorted.size())));
        }
        if (lx.size() < 2 || !(lx.back() - lx.front() > 1e-12 * std::abs(lx.back())))
            throw DegenerateTail("lower tail has no spread");
        return stats::least_squares(lx, ly);
    };
    const auto line = tail_fit(ok);
    fit.beta_hat = line.slope;
    fit.A_hat = std::exp(line.intercept);
    std::vector<double> betas;
    std::vector<double> resample(ok.size());
    for (int b = 0; b < opt.bootstrap; ++b) {
        auto rng = stats::sample_rng(seed, static_cast<std::uint64_t>(b), 1);
        std::uniform_int_distribution<std::size_t> pick(0, ok.size() - 1);
        for (auto& r : resample) r = ok[pick(rng)];
        std::sort(resample.begin(), resample.end());
        try {
            betas.push_back(tail_fit(resample).slope);
        } catch (const DegenerateTail&) {
        }
    }
    if (betas.empty()) throw DegenerateTail("every bootstrap replicate degenerated");
    fit.ci = {stats::quantile(betas, 0.025), stats::quantile(betas, 0.975)};
    return fit;
}

HyperbolicTimeStats hyperbolic_time_stats(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v,
                                          double chi_bar, double s, long M, int depth,
                                          std::uint64_t seed, int workers) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    std::vector<int> n0(static_cast<std::size_t>(M));
    parallel_for(n0.size(), workers, [&](std::size_t i) {
        auto rng = stats::sample_rng(seed, i);
        const auto pre = maps::sample_preorbit(map, x, depth, rng);
        std::vector<char> holds(static_cast<std::size_t>(depth) + 1, 0);
        Vec2 w = normalized(v);
        double log_len = 0.0;
        for (int n = 1; n <= depth; ++n) {
            w = solve(map.jacobian(pre.branch[static_cast<std::size_t>(n)]), w);
            const double len = norm(w);
            log_len += std::log(len);
            w = w / len;
            holds[static_cast<std::size_t>(n)] = -s * log_len < -double(n) * chi_bar;
        }
        int first = depth + 1;
        for (int n = depth; n >= 1 && holds[static_cast<std::size_t>(n)]; --n) first = n;
        n0[i] = first;
    });
    HyperbolicTimeStats out;
    out.depth = depth;
    out.samples = M;
    out.histogram.assign(static_cast<std::size_t>(depth) + 2, 0);
    for (int t : n0) {
        ++out.histogram[static_cast<std::size_t>(t)];
        out.size_proxy.push_back(std::exp(-double(t)));
    }
    out.censored = out.histogram.back();
    long above = M;
    std::vector<double> xs, ys;
    for (int n = 0; n <= depth; ++n) {
        if (n >= 1) above -= out.histogram[static_cast<std::size_t>(n)];
        const double freq = M > 0 ? double(above) / double(M) : 0.0;
        out.tail_frequency.push_back(freq);
        if (freq > 0.0) {
            xs.push_back(n);
            ys.push_back(std::log(freq));
        }
    }
    if (xs.size() >= 2) {
        out.tail_slope = stats::least_squares(xs, ys).slope;
        out.slope_available = true;
    }
    return out;
}

}  // namespace nuhlab::preimage
