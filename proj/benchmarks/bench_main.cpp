#include <benchmark/benchmark.h>

#include "nuhlab/billiard.hpp"
#include "nuhlab/cocycle.hpp"
#include "nuhlab/orbits.hpp"
#include "nuhlab/preimage_stats.hpp"
#include "nuhlab/stats.hpp"
#include "nuhlab/tms.hpp"

using namespace nuhlab;

namespace {

billiard::BilliardTable three_disc() {
    const auto L = billiard::Lattice::hexagonal_three_site();
    return billiard::BilliardTable(
        {{L.at(0, 0), 0.3}, {L.b1 * (2.0 / 3) - L.b2 * (1.0 / 3), 0.3}, {L.b1 * (1.0 / 3) + L.b2 * (1.0 / 3), 0.3}}, 0.55,
        L);
}

maps::TorusEndo acs() { return maps::TorusEndo::sheared({2, -1, 1, 2}, {1, 1, 0, 1}, 3.0); }

}  // namespace

static void BM_Collide(benchmark::State& state) {
    const auto t = three_disc();
    billiard::CollisionState s{0, 0.1, 0.2};
    for (auto _ : state) {
        s = billiard::collide(t, s).next;
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_Collide);

static void BM_PreimageTree(benchmark::State& state) {
    const auto f = acs();
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(preimage::preimage_leaves(f, {0.3, 0.7}, N));
}
BENCHMARK(BM_PreimageTree)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

static void BM_LyapunovQr(benchmark::State& state) {
    const auto f = acs();
    for (auto _ : state) {
        auto rng = stats::sample_rng(1, 0);
        benchmark::DoNotOptimize(cocycle::lyapunov_qr(f, {0.1234, 0.5678}, state.range(0), rng));
    }
}
BENCHMARK(BM_LyapunovQr)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SolveOrbit(benchmark::State& state) {
    const auto t = three_disc();
    const auto it = billiard::Itinerary::parse("0:0,0 1:0,0 2:0,0");
    for (auto _ : state) benchmark::DoNotOptimize(billiard::solve_orbit(t, it));
}
BENCHMARK(BM_SolveOrbit);

static void BM_GurevichEntropy(benchmark::State& state) {
    const auto g = tms::MarkovGraph::renewal(static_cast<int>(state.range(0)));
    const auto comp = tms::irreducible_components(g).front();
    for (auto _ : state) benchmark::DoNotOptimize(tms::gurevich_entropy(g, comp));
}
BENCHMARK(BM_GurevichEntropy)->Arg(8)->Arg(64);

BENCHMARK_MAIN();
