// Solver throughput on flow LPs of growing size.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "cornercuts/network.hpp"
#include "cornercuts/simplex.hpp"

using namespace cornercuts;

namespace {

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    long long uniform(long long lo, long long hi) {
        return lo + static_cast<long long>(
                        next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

StandardLp flowLp(int numArcs) {
    Rng rng(13);
    Network net;
    const int nodes = std::max(3, numArcs / 5);
    net.numNodes = nodes;
    net.source = 0;
    net.sink = nodes - 1;
    for (int v = 0; v + 1 < nodes; ++v) {
        net.arcs.push_back(Arc{v, v + 1});
    }
    while (net.numArcs() < numArcs) {
        const int u = static_cast<int>(rng.uniform(0, nodes - 2));
        const int v = static_cast<int>(rng.uniform(u + 1, nodes - 1));
        net.arcs.push_back(Arc{u, v});
    }
    net.supply.assign(nodes, 0);
    net.supply[net.source] = -3;
    net.supply[net.sink] = 3;
    StandardLp lp = flowStandardLp(net);
    for (int a = 0; a < lp.numCols(); ++a) {
        lp.objective(a) = static_cast<double>(rng.uniform(0, 20));
    }
    return lp;
}

void BM_SimplexFlow(benchmark::State &state) {
    const StandardLp lp = flowLp(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        SimplexSolver solver;
        benchmark::DoNotOptimize(solver.solve(lp));
    }
}

} // namespace

BENCHMARK(BM_SimplexFlow)->Arg(100)->Arg(400)->Arg(1000);
