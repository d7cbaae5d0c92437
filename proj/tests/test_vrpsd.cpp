#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "cornercuts/vrpsd_io.hpp"
#include "testutil.hpp"

using namespace cornercuts;
using testutil::Rng;

namespace {

// Monte-Carlo estimate of psi via the depot-return count. count(S) is the
// number of capacity multiples strictly below the load S.
double psiMonteCarlo(const VrpsdInstance &instance, int v, long long mu,
                     int samples, Rng &rng, double &stderrOut) {
    const double kappa = instance.varianceRatio();
    const double priorMean = static_cast<double>(mu - instance.meanDemand(v));
    const double priorSd = std::sqrt(kappa * priorMean);
    const double qMean = static_cast<double>(instance.meanDemand(v));
    const double qSd = std::sqrt(kappa * qMean);
    const double capacity = static_cast<double>(instance.capacity());
    auto count = [capacity](double load) {
        return std::max(0.0, std::ceil(load / capacity) - 1.0);
    };
    double sum = 0;
    double sumSq = 0;
    for (int i = 0; i < samples; ++i) {
        const double prior = priorMean + priorSd * rng.gaussian();
        const double q = qMean + qSd * rng.gaussian();
        const double value = count(prior + q) - count(prior);
        sum += value;
        sumSq += value * value;
    }
    const double mean = sum / samples;
    const double variance = std::max(0.0, sumSq / samples - mean * mean);
    const double scale = 2.0 * instance.cost(0, v);
    stderrOut = scale * std::sqrt(variance / samples);
    return scale * mean;
}

long long countPaths(const Network &net) {
    std::vector<long long> ways(net.numNodes, 0);
    ways[net.source] = 1;
    // Arcs of the state network go from lower to higher ids except into the
    // sink, so a forward sweep needs a topological order.
    std::vector<int> indeg(net.numNodes, 0);
    for (const Arc &a : net.arcs) {
        ++indeg[a.head];
    }
    std::vector<int> stack;
    for (int v = 0; v < net.numNodes; ++v) {
        if (indeg[v] == 0) {
            stack.push_back(v);
        }
    }
    std::vector<int> topo;
    std::vector<std::vector<int>> outArcs(net.numNodes);
    for (int a = 0; a < net.numArcs(); ++a) {
        outArcs[net.arcs[a].tail].push_back(a);
    }
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        topo.push_back(u);
        for (int a : outArcs[u]) {
            if (--indeg[net.arcs[a].head] == 0) {
                stack.push_back(net.arcs[a].head);
            }
        }
    }
    for (int u : topo) {
        for (int a : outArcs[u]) {
            ways[net.arcs[a].head] += ways[u];
        }
    }
    return ways[net.sink];
}

VectorXd ex1Fig2bX() {
    VectorXd x(6);
    // Routes {(2), (1,3)}: x02 = 2, x01 = x13 = x03 = 1.
    x << 1, 2, 1, 0, 1, 0;
    return x;
}

std::set<std::set<int>> routeSets(const std::vector<Route> &routes) {
    std::set<std::set<int>> sets;
    for (const Route &r : routes) {
        sets.insert(std::set<int>(r.begin(), r.end()));
    }
    return sets;
}

} // namespace

TEST_SUITE("vrpsd") {

TEST_CASE("psi: negligible below capacity, 14 at the EX1 failure state") {
    const VrpsdInstance instance = testutil::ex1Instance();
    CHECK(std::abs(psi(instance, 2, 2)) < 1e-9);
    CHECK(psi(instance, 1, 3) == doctest::Approx(14.0).epsilon(1e-6));
    CHECK_THROWS_AS(psi(instance, 1, 0), DomainError);
    CHECK_THROWS_AS(psi(instance, 1, 4), DomainError);
}

TEST_CASE("psi agrees with Monte-Carlo sampling") {
    // Variance equal to the mean makes the failure probabilities sizable.
    const VrpsdInstance instance = testutil::randomVrpsdInstance(5, 4, 2, 8);
    Rng rng(2024);
    for (int v = 1; v <= 4; ++v) {
        const long long mu =
            std::min<long long>(instance.capacity(),
                                instance.meanDemand(v) + 5);
        double stderrValue = 0;
        const double estimate =
            psiMonteCarlo(instance, v, mu, 1000000, rng, stderrValue);
        const double exact = psi(instance, v, mu);
        CHECK(std::abs(exact - estimate) <= 3.0 * stderrValue + 1e-9);
    }
}

TEST_CASE("expected recourse of the EX1 routes") {
    const VrpsdInstance instance = testutil::ex1Instance();
    CHECK(expectedRecourse(instance, {2, 1}) ==
          doctest::Approx(14.0).epsilon(1e-6));
    CHECK(expectedRecourse(instance, {2}) < 1e-6);
    CHECK(expectedRecourse(instance, {1, 3}) < 1e-6);
    CHECK_THROWS_AS(expectedRecourse(instance, {1, 2, 3}), NotAQRouteError);
}

TEST_CASE("recourse formula equals the per-state psi sum") {
    const VrpsdInstance instance = testutil::randomVrpsdInstance(9, 5, 2, 10);
    const auto routes = oracle::enumerateQRoutes(instance);
    int checked = 0;
    for (const auto &entry : routes) {
        if (checked >= 200) {
            break;
        }
        double psiSum = 0;
        long long load = 0;
        for (int v : entry.route) {
            load += instance.meanDemand(v);
            psiSum += psi(instance, v, load);
        }
        CHECK(std::abs(entry.recourse - psiSum) <= 1e-9 * (1 + psiSum));
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("state network of a single customer at capacity") {
    MatrixXd costs(2, 2);
    costs << 0, 5, 5, 0;
    const VrpsdInstance instance(1, 1, 3, costs, {3}, {3.0});
    const StateNetwork sn = buildStateNetwork(instance);
    CHECK(sn.net.numNodes == 3);
    CHECK(sn.net.numArcs() == 2);
    CHECK(sn.arcClass[0] == StateArcClass::Src);
    CHECK(sn.arcClass[1] == StateArcClass::Snk);
}

TEST_CASE("EX1 state network: the route (2) path exists") {
    const VrpsdInstance instance = testutil::ex1Instance();
    const StateNetwork sn = buildStateNetwork(instance);
    CHECK(sn.net.numNodes == 10);
    CHECK(sn.net.numArcs() == 19);
    int s22 = -1;
    for (int v = 0; v < sn.net.numNodes; ++v) {
        if (sn.stateCustomer[v] == 2 && sn.stateLoad[v] == 2) {
            s22 = v;
        }
    }
    REQUIRE(s22 >= 0);
    bool srcArc = false;
    bool snkArc = false;
    for (int a = 0; a < sn.net.numArcs(); ++a) {
        srcArc |= sn.net.arcs[a].tail == sn.source() &&
                  sn.net.arcs[a].head == s22;
        snkArc |= sn.net.arcs[a].tail == s22 &&
                  sn.net.arcs[a].head == sn.sink();
    }
    CHECK(srcArc);
    CHECK(snkArc);
}

TEST_CASE("s-t paths biject with q-route sequences") {
    const VrpsdInstance ex1 = testutil::ex1Instance();
    CHECK(countPaths(buildStateNetwork(ex1).net) ==
          static_cast<long long>(
              oracle::enumerateQRouteSequences(ex1).size()));
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const VrpsdInstance instance =
            testutil::randomVrpsdInstance(seed, 4, 2, 7);
        CHECK(countPaths(buildStateNetwork(instance).net) ==
              static_cast<long long>(
                  oracle::enumerateQRouteSequences(instance).size()));
    }
}

TEST_CASE("single customer master forces x_01 = 2") {
    MatrixXd costs(2, 2);
    costs << 0, 5, 5, 0;
    const VrpsdInstance instance(1, 1, 3, costs, {2}, {2.0});
    GeneralLp lp = masterXRows(instance);
    lp.objective = VectorXd::Ones(1);
    const GeneralOutcome out = solveGeneral(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.primal(0) == doctest::Approx(2.0));
}

TEST_CASE("Figure 2(a) satisfies the static rows") {
    const VrpsdInstance instance = testutil::ex1Instance();
    const GeneralLp lp = masterXRows(instance);
    const VectorXd x = testutil::ex1Fig2aX();
    for (const LpRow &row : lp.rows) {
        double activity = 0;
        for (const auto &[col, value] : row.coeffs) {
            activity += value * x(col);
        }
        CHECK(activity == doctest::Approx(row.rhs));
    }
    for (int e = 0; e < instance.numEdges(); ++e) {
        CHECK(x(e) >= lp.lowerBounds(e) - 1e-12);
        CHECK(x(e) <= lp.upperBounds(e) + 1e-12);
    }
}

TEST_CASE("degree-row summation reproduces the domination identity") {
    // alpha1'x + theta - 2(depot row) + (degree 1) + (degree 3) collapses to
    // -2 x02 - 14 x12 - 14 x23 + theta >= -4, i.e. the corner facet plus
    // the bound -2 x02 >= -4.
    const VrpsdInstance instance = testutil::ex1Instance();
    const GeneralLp lp = masterXRows(instance);
    VectorXd combined = testutil::ex1Alpha1();
    double rhs = 0;
    auto accumulate = [&](const LpRow &row, double weight) {
        for (const auto &[col, value] : row.coeffs) {
            combined(col) += weight * value;
        }
        rhs += weight * row.rhs;
    };
    accumulate(lp.rows[0], -2.0);  // depot degree row
    accumulate(lp.rows[1], 1.0);   // customer 1
    accumulate(lp.rows[3], 1.0);   // customer 3
    VectorXd expected = testutil::ex1Alpha2();
    expected(1) -= 2.0;  // the -2 x02 term
    CHECK((combined - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(rhs == doctest::Approx(-4.0));
}

TEST_CASE("RCI separation: integral points clean, fractional 2-cycle cut") {
    const VrpsdInstance ex1 = testutil::ex1Instance();
    CHECK(separateRciExact(ex1, testutil::ex1Fig2aX()).empty());
    CHECK(separateRciExact(ex1, ex1Fig2bX()).empty());

    MatrixXd costs(3, 3);
    costs << 0, 5, 5, 5, 0, 5, 5, 5, 0;
    const VrpsdInstance heavy(2, 2, 3, costs, {2, 2}, {2.0, 2.0});
    VectorXd x(3);  // edges (0,1), (0,2), (1,2)
    x << 1, 1, 1;
    const auto violated = separateRciExact(heavy, x);
    REQUIRE(!violated.empty());
    CHECK(violated[0].customers == std::vector<int>{1, 2});
    // q(S) = 4 > C = 3 needs x(delta(S)) >= 4, found 2.
    CHECK(violated[0].violation == doctest::Approx(2.0));
}

TEST_CASE("P-cut separation on the Figure 2(a) point") {
    const VrpsdInstance instance = testutil::ex1Instance();
    const VectorXd x = testutil::ex1Fig2aX();
    const VectorXd theta = VectorXd::Zero(3);
    const auto cuts = separatePSCuts(instance, x, theta);
    REQUIRE(cuts.size() == 1);
    CHECK(cuts[0].kind == "P-cut");
    CHECK(cuts[0].violation == doctest::Approx(14.0).epsilon(1e-6));
    // Row: theta'_1 + theta'_2 - 14 x12 >= 0.
    double x12Coeff = 0;
    for (const auto &[col, value] : cuts[0].row.coeffs) {
        if (col == instance.edgeIndex(1, 2)) {
            x12Coeff = value;
        }
    }
    CHECK(x12Coeff == doctest::Approx(-14.0).epsilon(1e-6));
    CHECK(cuts[0].row.rhs == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("no P/S cuts at an integral point with honest recourse") {
    const VrpsdInstance instance = testutil::ex1Instance();
    VectorXd theta(3);
    theta << expectedRecourse(instance, {1, 3}), expectedRecourse(instance, {2}),
        0.0;
    CHECK(separatePSCuts(instance, ex1Fig2bX(), theta).empty());
}

TEST_CASE("a non-path component with |V| = |E| + 1 gets no P-cut") {
    // Star on {1,2,3,4} centered at 1: three edges, four nodes, degree 3.
    const VrpsdInstance instance = testutil::randomVrpsdInstance(3, 4, 2, 12);
    VectorXd x = VectorXd::Zero(instance.numEdges());
    x(instance.edgeIndex(1, 2)) = 0.5;
    x(instance.edgeIndex(1, 3)) = 0.5;
    x(instance.edgeIndex(1, 4)) = 0.5;
    const auto cuts = separatePSCuts(instance, x, VectorXd::Zero(4));
    for (const DisaggRow &cut : cuts) {
        CHECK(cut.kind != "P-cut");
    }
}

TEST_CASE("recourse lower bound via partition enumeration") {
    const VrpsdInstance instance = testutil::ex1Instance();
    CHECK(recourseLowerBound(instance, {1}) < 1e-9);
    CHECK(recourseLowerBound(instance, {1, 2}) < 1e-6);

    MatrixXd costs = MatrixXd::Constant(4, 4, 14.0);
    costs.diagonal().setZero();
    const VrpsdInstance oneVehicle(3, 1, 3, costs, {1, 2, 1},
                                   {0.0001, 0.0002, 0.0001});
    CHECK(recourseLowerBound(oneVehicle, {1, 2, 3}) == kInf);
}

TEST_CASE("root bounds per mode on EX1") {
    const VrpsdInstance instance = testutil::ex1Instance();
    const RootReport corner = cuttingPlaneLoop(instance, SolveMode::Corner);
    CHECK(corner.bound == doctest::Approx(88.0).epsilon(1e-7));
    const RootReport lagrange =
        cuttingPlaneLoop(instance, SolveMode::Lagrange);
    CHECK(lagrange.bound == doctest::Approx(88.0).epsilon(1e-7));
    const RootReport parada = cuttingPlaneLoop(instance, SolveMode::Parada);
    CHECK(parada.bound >= 76.0 - 1e-6);
    CHECK(parada.bound <= 88.0 + 1e-6);

    // Monotone bound trace.
    for (const RootReport *report : {&corner, &lagrange, &parada}) {
        for (size_t i = 1; i < report->trace.size(); ++i) {
            CHECK(report->trace[i].bound >=
                  report->trace[i - 1].bound - 1e-9);
        }
    }
}

TEST_CASE("integer solve: all-singleton instance") {
    MatrixXd costs(4, 4);
    costs << 0, 14, 20, 14,
             14, 0, 14, 20,
             20, 14, 0, 14,
             14, 20, 14, 0;
    const VrpsdInstance instance(3, 3, 3, costs, {1, 2, 1},
                                 {0.0001, 0.0002, 0.0001});
    const IntegerResult result = solveInteger(instance, SolveMode::Parada);
    double expected = 0;
    for (int v = 1; v <= 3; ++v) {
        expected += 2 * instance.cost(0, v) + expectedRecourse(instance, {v});
    }
    CHECK(result.value == doctest::Approx(expected).epsilon(1e-7));
    CHECK(result.routes.size() == 3);
}

TEST_CASE("integer solve of EX1 finds the optimal routes") {
    const VrpsdInstance instance = testutil::ex1Instance();
    const IntegerResult result = solveInteger(instance, SolveMode::Corner);
    CHECK(result.value == doctest::Approx(88.0).epsilon(1e-7));
    const auto sets = routeSets(result.routes);
    CHECK(sets.count({2}) == 1);
    CHECK(sets.count({1, 3}) == 1);
}

TEST_CASE("integer solve matches brute force on random instances") {
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);  // 3..6
        const int k = 1 + static_cast<int>(seed % 3);  // 1..3
        if (k > n) {
            continue;
        }
        const VrpsdInstance instance =
            testutil::randomVrpsdInstance(seed * 977, n, k, 10);
        oracle::BruteForceResult reference;
        bool feasible = true;
        try {
            reference = oracle::bruteForceOptimum(instance);
        } catch (const InfeasibleInstanceError &) {
            feasible = false;
        }
        const SolveMode mode =
            seed % 2 == 0 ? SolveMode::Parada : SolveMode::Corner;
        if (!feasible) {
            CHECK_THROWS_AS(solveInteger(instance, mode),
                            InfeasibleInstanceError);
            continue;
        }
        const IntegerResult result = solveInteger(instance, mode);
        CHECK(result.value ==
              doctest::Approx(reference.value).epsilon(1e-6));
        ++compared;
    }
    CHECK(compared >= 30);
}

TEST_CASE("instance reader rejects malformed files") {
    std::istringstream bad1("vrpsd 2\nn 1 k 1 C 3\nqbar 1\nvar 1\n0\n5 0\n");
    CHECK_THROWS_AS(readInstance(bad1), ParseError);
    std::istringstream bad2(
        "vrpsd 1\nn 2 k 1 C 3\nqbar 1 2\nvar 1 1\n0\n5 0\n5 5 0\n");
    CHECK_THROWS_AS(readInstance(bad2), ParseError);  // ratio not shared
    std::istringstream bad3(
        "vrpsd 1\nn 1 k 1 C 3\nfoo 1\nvar 1\n0\n5 0\n");
    CHECK_THROWS_AS(readInstance(bad3), ParseError);
}

TEST_CASE("instance writer round-trips") {
    const VrpsdInstance instance = testutil::randomVrpsdInstance(7, 5, 2, 10);
    std::ostringstream out;
    writeInstance(instance, out);
    std::istringstream in(out.str());
    const VrpsdInstance reread = readInstance(in);
    CHECK(reread.numCustomers() == instance.numCustomers());
    CHECK(reread.vehicles() == instance.vehicles());
    CHECK(reread.capacity() == instance.capacity());
    for (int e = 0; e < instance.numEdges(); ++e) {
        CHECK(reread.edgeCost(e) == instance.edgeCost(e));
    }
    std::ostringstream again;
    writeInstance(reread, again);
    CHECK(again.str() == out.str());
}

} // TEST_SUITE
