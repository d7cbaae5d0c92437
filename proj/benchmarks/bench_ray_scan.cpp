// Violated-ray detection: potential scan vs the naive per-ray projection.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "cornercuts/network.hpp"

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

struct Fixture {
    Network net;
    SpanningTree tree;
    MatrixXd q;
    SparseColumns sparseQ;
    VectorXd d;
    VectorXd alpha;

    Fixture(int numArcs, int p) {
        Rng rng(7);
        const int nodes = std::max(3, numArcs / 4);
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
        net.supply[net.source] = -2;
        net.supply[net.sink] = 2;

        VectorXd weights(net.numArcs());
        d.resize(net.numArcs());
        q.resize(p, net.numArcs());
        for (int a = 0; a < net.numArcs(); ++a) {
            weights(a) = static_cast<double>(rng.uniform(0, 9));
            d(a) = static_cast<double>(rng.uniform(-3, 6));
            for (int i = 0; i < p; ++i) {
                q(i, a) = static_cast<double>(rng.uniform(-2, 3));
            }
        }
        tree = shortestPathTree(net, weights).tree;
        sparseQ = SparseColumns::fromDense(q);
        alpha.resize(p);
        for (int i = 0; i < p; ++i) {
            alpha(i) = static_cast<double>(rng.uniform(-3, 3));
        }
    }
};

void BM_PotentialScan(benchmark::State &state) {
    const Fixture fx(static_cast<int>(state.range(0)),
                     static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(findViolatedRayArcs(
            fx.alpha, 1.0, fx.net, fx.tree, fx.sparseQ, fx.d));
    }
}

void BM_NaiveScan(benchmark::State &state) {
    const Fixture fx(static_cast<int>(state.range(0)),
                     static_cast<int>(state.range(1)));
    for (auto _ : state) {
        std::vector<int> violated;
        for (int a = 0; a < fx.net.numArcs(); ++a) {
            if (fx.tree.inTree[a]) {
                continue;
            }
            const VectorXd ray = cycleRay(fx.net, fx.tree, a).dense();
            const double slack =
                fx.alpha.dot(fx.q * ray) + 1.0 * fx.d.dot(ray);
            if (slack < -1e-7) {
                violated.push_back(a);
            }
        }
        benchmark::DoNotOptimize(violated);
    }
}

} // namespace

BENCHMARK(BM_PotentialScan)->Args({500, 20})->Args({2000, 50});
BENCHMARK(BM_NaiveScan)->Args({500, 20})->Args({2000, 50});

BENCHMARK_MAIN();
