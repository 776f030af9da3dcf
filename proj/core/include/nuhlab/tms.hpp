#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace nuhlab::tms {

/// Finite directed graph standing in for a topological Markov shift. Immutable.
class MarkovGraph {
public:
    /// Throws InvalidGraph on out-of-range endpoints or duplicate edges.
    MarkovGraph(int vertices, std::vector<std::pair<int, int>> edges, std::vector<std::string> labels = {});

    int vertices() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& successors(int v) const { return out_[static_cast<std::size_t>(v)]; }
    bool has_edge(int u, int v) const;
    const std::vector<std::string>& labels() const { return labels_; }

    /// Full shift on k symbols: every ordered pair including loops.
    static MarkovGraph full_shift(int k);
    /// [[1, 1], [1, 0]].
    static MarkovGraph golden_mean();
    /// Vertices 0..n-1 with 0 -> 0, k -> k+1, k -> 0: first returns to 0 of every length 1..n.
    static MarkovGraph renewal(int n);
    static MarkovGraph cycle(int n);

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> out_;
    std::vector<std::string> labels_;
};

/// "u v" per line; '#' starts a comment. The vertex count is one more than the largest index.
MarkovGraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const MarkovGraph& g);

/// Strongly connected components that carry at least one edge, each sorted, ordered by
/// smallest vertex.
std::vector<std::vector<int>> irreducible_components(const MarkovGraph& g);

struct PeriodInfo {
    int period = 0;
    std::vector<std::vector<int>> classes;  // C_0 -> C_1 -> ... -> C_{p-1} -> C_0
};

/// gcd of cycle lengths through the component, from BFS levels; class of v = level(v) mod period.
PeriodInfo period(const MarkovGraph& g, const std::vector<int>& component);

struct EntropyResult {
    double entropy = 0.0;  // log spectral radius
    double spectral_radius = 0.0;
    int iterations = 0;
    std::vector<double> right_vector;  // Perron vector on the component (sum 1)
    double loop_estimate = 0.0;        // (1/n) log tr(A^n) at the largest n <= 20 with tr > 0
};

/// Power iteration on A + I restricted to the component, starting from the all-ones vector,
/// stopped when successive Rayleigh quotients differ by < 1e-12 (relative) and the max-normalized
/// iterate moves by < 1e-14. Throws NonConvergence.
EntropyResult gurevich_entropy(const MarkovGraph& g, const std::vector<int>& component);

struct ParryMeasure {
    std::vector<int> vertices;                    // the component
    std::vector<double> stationary;               // pi, aligned with vertices
    std::vector<std::vector<double>> transition;  // rows aligned with vertices
    double entropy = 0.0;                         // log spectral radius
    double chain_entropy = 0.0;                   // -sum pi_u P_uv log P_uv
    double stationarity_error = 0.0;              // max |pi P - pi|
};

ParryMeasure parry_mme(const MarkovGraph& g, const std::vector<int>& component);

/// Largest Gurevich entropy over the irreducible components (0 when there are none).
double graph_entropy(const MarkovGraph& g);

/// Entropies of nested finite graphs. Throws InvalidGraph if a level does not contain the previous
/// one and MonotonicityViolation if the sequence decreases.
std::vector<double> entropy_ladder(const std::function<MarkovGraph(int)>& level, int levels);

}  // namespace nuhlab::tms
