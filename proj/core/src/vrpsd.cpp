#include "cornercuts/vrpsd.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace cornercuts {

namespace {

double normalCdf(double x, double mean, double variance) {
    if (variance <= 0) {
        if (x < mean) {
            return 0;
        }
        return x > mean ? 1.0 : 0.5;
    }
    return 0.5 * std::erfc((mean - x) / std::sqrt(2.0 * variance));
}

using Clock = std::chrono::steady_clock;

double elapsedSec(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

VrpsdInstance::VrpsdInstance(int numCustomers, int vehicles,
                             long long capacity, MatrixXd costs,
                             std::vector<long long> meanDemand,
                             std::vector<double> demandVariance)
    : n_(numCustomers), k_(vehicles), capacity_(capacity),
      costs_(std::move(costs)), meanDemand_(std::move(meanDemand)),
      variance_(std::move(demandVariance)) {
    if (n_ < 1 || k_ < 1 || capacity_ < 1) {
        throw ParseError("need n >= 1, k >= 1, C >= 1");
    }
    if (k_ > n_) {
        throw ParseError("more vehicles than customers");
    }
    if (costs_.rows() != n_ + 1 || costs_.cols() != n_ + 1) {
        throw ParseError("cost matrix must be (n+1) x (n+1)");
    }
    if (static_cast<int>(meanDemand_.size()) != n_ ||
        static_cast<int>(variance_.size()) != n_) {
        throw ParseError("demand vectors must have length n");
    }
    for (int u = 0; u <= n_; ++u) {
        for (int v = 0; v <= n_; ++v) {
            if (std::abs(costs_(u, v) - costs_(v, u)) > 1e-12) {
                throw ParseError("cost matrix must be symmetric");
            }
            if (u != v && costs_(u, v) <= 0) {
                throw ParseError("edge costs must be positive");
            }
        }
    }
    kappa_ = variance_[0] / static_cast<double>(meanDemand_[0]);
    for (int v = 1; v <= n_; ++v) {
        if (meanDemand_[v - 1] < 1) {
            throw ParseError("mean demands must be positive integers");
        }
        if (meanDemand_[v - 1] > capacity_) {
            throw ParseError("customer demand exceeds capacity");
        }
        if (variance_[v - 1] < 0) {
            throw ParseError("variances must be nonnegative");
        }
        const double ratio =
            variance_[v - 1] / static_cast<double>(meanDemand_[v - 1]);
        if (std::abs(ratio - kappa_) > 1e-9 * (1.0 + std::abs(kappa_))) {
            throw ParseError(
                "variance/mean ratio must be shared by all customers");
        }
    }
}

int VrpsdInstance::edgeIndex(int u, int v) const {
    if (u > v) {
        std::swap(u, v);
    }
    if (u < 0 || v > n_ || u == v) {
        throw DomainError("bad edge endpoints");
    }
    // Edges (0,1),(0,2),...,(0,n),(1,2),...: u's block starts after all
    // blocks of smaller endpoints.
    int base = 0;
    for (int i = 0; i < u; ++i) {
        base += n_ - i;
    }
    return base + (v - u - 1);
}

std::pair<int, int> VrpsdInstance::edgeEndpoints(int e) const {
    int u = 0;
    int remaining = e;
    while (remaining >= n_ - u) {
        remaining -= n_ - u;
        ++u;
    }
    return {u, u + remaining + 1};
}

VectorXd VrpsdInstance::edgeCostVector() const {
    VectorXd c(numEdges());
    for (int e = 0; e < numEdges(); ++e) {
        c(e) = edgeCost(e);
    }
    return c;
}

double psi(const VrpsdInstance &instance, int v, long long mu) {
    if (v < 1 || v > instance.numCustomers()) {
        throw DomainError("customer out of range");
    }
    const long long qv = instance.meanDemand(v);
    const long long capacity = instance.capacity();
    if (mu < qv || mu > capacity) {
        throw DomainError("state load outside [q_v, C]");
    }
    const double kappa = instance.varianceRatio();
    const double priorMean = static_cast<double>(mu - qv);
    const double priorVar = kappa * priorMean;
    const double loadMean = static_cast<double>(mu);
    const double loadVar = kappa * loadMean;

    double failures = 0;
    const double tailCutoff =
        loadMean + 12.0 * std::sqrt(std::max(loadVar, 0.0)) + 1.0;
    for (long long t = 1;; ++t) {
        const double x = static_cast<double>(t * capacity);
        const double term =
            normalCdf(x, priorMean, priorVar) - normalCdf(x, loadMean, loadVar);
        failures += std::max(term, 0.0);
        if (x >= tailCutoff) {
            break;
        }
    }
    return 2.0 * instance.cost(0, v) * failures;
}

long long routeDemand(const VrpsdInstance &instance, const Route &route) {
    long long total = 0;
    for (int v : route) {
        total += instance.meanDemand(v);
    }
    return total;
}

double routeFirstStageCost(const VrpsdInstance &instance, const Route &route) {
    if (route.empty()) {
        throw DomainError("empty route");
    }
    double cost = instance.cost(0, route.front()) +
                  instance.cost(0, route.back());
    for (size_t i = 0; i + 1 < route.size(); ++i) {
        cost += instance.cost(route[i], route[i + 1]);
    }
    return cost;
}

double expectedRecourse(const VrpsdInstance &instance, const Route &route) {
    if (route.empty()) {
        throw DomainError("empty route");
    }
    for (int v : route) {
        if (v < 1 || v > instance.numCustomers()) {
            throw DomainError("customer out of range");
        }
    }
    if (routeDemand(instance, route) > instance.capacity()) {
        throw NotAQRouteError("expected demand exceeds capacity");
    }
    const long long capacity = instance.capacity();
    double total = 0;
    double prevMean = 0;
    double prevVar = 0;
    for (int v : route) {
        const double mean = prevMean + static_cast<double>(instance.meanDemand(v));
        const double var = prevVar + instance.variance(v);
        // Expected number of depot returns triggered at v: the CDF gap
        // between the load before and after serving v, summed over t*C.
        double failures = 0;
        const double tailCutoff = mean + 12.0 * std::sqrt(std::max(var, 0.0)) + 1.0;
        for (long long t = 1;; ++t) {
            const double x = static_cast<double>(t * capacity);
            const double term =
                normalCdf(x, prevMean, prevVar) - normalCdf(x, mean, var);
            failures += std::max(term, 0.0);
            if (x >= tailCutoff) {
                break;
            }
        }
        total += 2.0 * instance.cost(0, v) * failures;
        prevMean = mean;
        prevVar = var;
    }
    return total;
}

StateNetwork buildStateNetwork(const VrpsdInstance &instance) {
    const int n = instance.numCustomers();
    const long long capacity = instance.capacity();

    // Reachable states by increasing prior load mu - q_v.
    std::set<std::pair<long long, int>> reachable;  // (prior, v)
    std::set<long long> loads;                      // achievable route loads
    for (int v = 1; v <= n; ++v) {
        reachable.insert({0, v});
        loads.insert(instance.meanDemand(v));
    }
    for (long long prior = 1; prior < capacity; ++prior) {
        if (!loads.count(prior)) {
            continue;
        }
        // Customers parked at load = prior.
        std::vector<int> atLoad;
        for (int u = 1; u <= n; ++u) {
            if (reachable.count({prior - instance.meanDemand(u), u})) {
                atLoad.push_back(u);
            }
        }
        for (int v = 1; v <= n; ++v) {
            if (prior + instance.meanDemand(v) > capacity) {
                continue;
            }
            const bool hasPredecessor =
                atLoad.size() > 1 || (atLoad.size() == 1 && atLoad[0] != v);
            if (hasPredecessor) {
                if (reachable.insert({prior, v}).second) {
                    loads.insert(prior + instance.meanDemand(v));
                }
            }
        }
    }

    StateNetwork sn;
    const int numStates = static_cast<int>(reachable.size());
    sn.net.numNodes = numStates + 2;
    sn.net.source = 0;
    sn.net.sink = numStates + 1;
    sn.stateCustomer.assign(sn.net.numNodes, 0);
    sn.stateLoad.assign(sn.net.numNodes, 0);

    std::map<std::pair<int, long long>, int> idOf;  // (v, mu) -> node
    int next = 1;
    for (const auto &[prior, v] : reachable) {
        const long long mu = prior + instance.meanDemand(v);
        idOf[{v, mu}] = next;
        sn.stateCustomer[next] = v;
        sn.stateLoad[next] = static_cast<int>(mu);
        ++next;
    }

    std::vector<double> costs;
    auto addArc = [&](int tail, int head, int edge, StateArcClass cls,
                      double cost) {
        sn.net.arcs.push_back(Arc{tail, head});
        sn.arcEdge.push_back(edge);
        sn.arcClass.push_back(cls);
        costs.push_back(cost);
    };

    for (const auto &[prior, v] : reachable) {
        if (prior != 0) {
            break;  // states are ordered by prior
        }
        const int head = idOf.at({v, instance.meanDemand(v)});
        addArc(sn.net.source, head, instance.edgeIndex(0, v),
               StateArcClass::Src, psi(instance, v, instance.meanDemand(v)));
    }
    for (const auto &[prior, v] : reachable) {
        if (prior == 0) {
            continue;  // SRC arcs already cover these heads
        }
        const long long mu = prior + instance.meanDemand(v);
        const int head = idOf.at({v, mu});
        for (const auto &[tailPrior, u] : reachable) {
            const long long tailLoad = tailPrior + instance.meanDemand(u);
            if (tailLoad != prior || u == v) {
                continue;
            }
            addArc(idOf.at({u, prior}), head, instance.edgeIndex(u, v),
                   StateArcClass::Fwd, psi(instance, v, mu));
        }
    }
    for (const auto &[prior, v] : reachable) {
        const long long mu = prior + instance.meanDemand(v);
        addArc(idOf.at({v, mu}), sn.net.sink, instance.edgeIndex(0, v),
               StateArcClass::Snk, 0.0);
    }

    sn.net.supply.assign(sn.net.numNodes, 0);
    sn.net.supply[sn.net.source] = -instance.vehicles();
    sn.net.supply[sn.net.sink] = instance.vehicles();
    sn.arcCost = Eigen::Map<VectorXd>(costs.data(), costs.size());
    sn.net.validate();
    return sn;
}

GeneralLp masterXRows(const VrpsdInstance &instance) {
    const int n = instance.numCustomers();
    GeneralLp lp = GeneralLp::withVars(instance.numEdges());
    for (int e = 0; e < instance.numEdges(); ++e) {
        lp.upperBounds(e) = instance.depotEdge(e) ? 2.0 : 1.0;
    }
    LpRow depot;
    depot.sense = RowSense::Equal;
    depot.rhs = 2.0 * instance.vehicles();
    for (int v = 1; v <= n; ++v) {
        depot.coeffs.emplace_back(instance.edgeIndex(0, v), 1.0);
    }
    lp.addRow(std::move(depot));
    for (int v = 1; v <= n; ++v) {
        LpRow degree;
        degree.sense = RowSense::Equal;
        degree.rhs = 2.0;
        for (int u = 0; u <= n; ++u) {
            if (u != v) {
                degree.coeffs.emplace_back(instance.edgeIndex(u, v), 1.0);
            }
        }
        lp.addRow(std::move(degree));
    }
    return lp;
}

namespace {

long long subsetDemand(const VrpsdInstance &instance, unsigned mask) {
    long long q = 0;
    for (int v = 1; v <= instance.numCustomers(); ++v) {
        if (mask & (1u << (v - 1))) {
            q += instance.meanDemand(v);
        }
    }
    return q;
}

LpRow rciRow(const VrpsdInstance &instance, unsigned mask) {
    const int n = instance.numCustomers();
    LpRow row;
    row.sense = RowSense::GreaterEqual;
    const long long q = subsetDemand(instance, mask);
    row.rhs = 2.0 * static_cast<double>(
                        (q + instance.capacity() - 1) / instance.capacity());
    for (int v = 1; v <= n; ++v) {
        if (!(mask & (1u << (v - 1)))) {
            continue;
        }
        for (int u = 0; u <= n; ++u) {
            if (u == v) {
                continue;
            }
            const bool uInside = u >= 1 && (mask & (1u << (u - 1)));
            if (!uInside) {
                row.coeffs.emplace_back(instance.edgeIndex(u, v), 1.0);
            }
        }
    }
    return row;
}

} // namespace

GeneralLp masterXRowsWithAllRci(const VrpsdInstance &instance) {
    const int n = instance.numCustomers();
    if (n > 16) {
        throw TooManyCustomersError("full RCI enumeration capped at n = 16");
    }
    GeneralLp lp = masterXRows(instance);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        lp.addRow(rciRow(instance, mask));
    }
    return lp;
}

ProblemData vrpsdProblemData(const VrpsdInstance &instance,
                             const StateNetwork &stateNet, bool includeAllRci) {
    ProblemData data;
    data.c = instance.edgeCostVector();
    data.d = stateNet.arcCost;
    const int p = instance.numEdges();
    const int m = stateNet.net.numArcs();
    data.T = -MatrixXd::Identity(p, p);
    data.Q = MatrixXd::Zero(p, m);
    for (int a = 0; a < m; ++a) {
        data.Q(stateNet.arcEdge[a], a) = 1.0;
    }
    data.h = VectorXd::Zero(p);
    data.xRows = includeAllRci ? masterXRowsWithAllRci(instance)
                               : masterXRows(instance);
    data.yLp = flowStandardLp(stateNet.net);
    data.validate(false);
    return data;
}

LpRow RciCut::row(const VrpsdInstance &instance) const {
    unsigned mask = 0;
    for (int v : customers) {
        mask |= 1u << (v - 1);
    }
    return rciRow(instance, mask);
}

std::vector<RciCut> separateRciExact(const VrpsdInstance &instance,
                                     const VectorXd &xBar) {
    const int n = instance.numCustomers();
    if (n > 20) {
        throw TooManyCustomersError("exact RCI separation capped at n = 20");
    }
    // Cut value per subset via edge scan.
    std::vector<RciCut> violated;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double crossing = 0;
        for (int e = 0; e < instance.numEdges(); ++e) {
            const auto [u, v] = instance.edgeEndpoints(e);
            const bool uIn = u >= 1 && (mask & (1u << (u - 1)));
            const bool vIn = mask & (1u << (v - 1));
            if (uIn != vIn) {
                crossing += xBar(e);
            }
        }
        const long long q = subsetDemand(instance, mask);
        const double required =
            2.0 * static_cast<double>(
                      (q + instance.capacity() - 1) / instance.capacity());
        if (crossing < required - 1e-6) {
            RciCut cut;
            for (int v = 1; v <= n; ++v) {
                if (mask & (1u << (v - 1))) {
                    cut.customers.push_back(v);
                }
            }
            cut.violation = required - crossing;
            violated.push_back(std::move(cut));
        }
    }
    std::sort(violated.begin(), violated.end(),
              [](const RciCut &a, const RciCut &b) {
                  if (a.violation != b.violation) {
                      return a.violation > b.violation;
                  }
                  return a.customers < b.customers;
              });
    return violated;
}

double recourseLowerBound(const VrpsdInstance &instance,
                          const std::vector<int> &customers) {
    const int s = static_cast<int>(customers.size());
    if (s == 0) {
        throw DomainError("empty customer set");
    }
    if (s > 10) {
        throw SIntractableError("partition bound capped at |S| = 10");
    }
    // Cheapest expected recourse of one q-route through a subset, every
    // ordering considered via the (mask, last) DP.
    const unsigned full = (1u << s) - 1;
    std::vector<long long> maskDemand(full + 1, 0);
    for (unsigned mask = 1; mask <= full; ++mask) {
        const int low = std::countr_zero(mask);
        maskDemand[mask] =
            maskDemand[mask & (mask - 1)] + instance.meanDemand(customers[low]);
    }
    const double inf = kInf;
    std::vector<std::vector<double>> ending(
        full + 1, std::vector<double>(s, inf));
    for (int i = 0; i < s; ++i) {
        ending[1u << i][i] = psi(instance, customers[i],
                                 instance.meanDemand(customers[i]));
    }
    std::vector<double> bestRoute(full + 1, inf);
    for (unsigned mask = 1; mask <= full; ++mask) {
        if (maskDemand[mask] > instance.capacity()) {
            continue;
        }
        for (int last = 0; last < s; ++last) {
            if (!(mask & (1u << last)) || ending[mask][last] == inf) {
                continue;
            }
            bestRoute[mask] = std::min(bestRoute[mask], ending[mask][last]);
            for (int nxt = 0; nxt < s; ++nxt) {
                if (mask & (1u << nxt)) {
                    continue;
                }
                const unsigned nextMask = mask | (1u << nxt);
                if (maskDemand[nextMask] > instance.capacity()) {
                    continue;
                }
                const double cand =
                    ending[mask][last] +
                    psi(instance, customers[nxt],
                        maskDemand[mask] + instance.meanDemand(customers[nxt]));
                ending[nextMask][nxt] = std::min(ending[nextMask][nxt], cand);
            }
        }
    }
    // Partition into at most k parts.
    const int maxParts = instance.vehicles();
    std::vector<std::vector<double>> dp(
        full + 1, std::vector<double>(maxParts + 1, inf));
    dp[0][0] = 0;
    for (unsigned mask = 1; mask <= full; ++mask) {
        const unsigned low = mask & static_cast<unsigned>(-static_cast<int>(mask));
        for (int parts = 1; parts <= maxParts; ++parts) {
            // Iterate submasks containing the lowest set bit.
            for (unsigned sub = mask; sub; sub = (sub - 1) & mask) {
                if (!(sub & low) || bestRoute[sub] == inf) {
                    continue;
                }
                if (dp[mask ^ sub][parts - 1] == inf) {
                    continue;
                }
                dp[mask][parts] = std::min(
                    dp[mask][parts], dp[mask ^ sub][parts - 1] + bestRoute[sub]);
            }
        }
    }
    double best = inf;
    for (int parts = 1; parts <= maxParts; ++parts) {
        best = std::min(best, dp[full][parts]);
    }
    return best;
}

namespace {

struct Component {
    std::vector<int> nodes;                       // customers, ascending
    std::vector<std::pair<int, int>> edges;       // support edges inside
};

std::vector<Component> supportComponents(const VrpsdInstance &instance,
                                         const VectorXd &xBar) {
    const int n = instance.numCustomers();
    std::vector<int> parent(n + 1);
    for (int v = 1; v <= n; ++v) {
        parent[v] = v;
    }
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<std::pair<int, int>> supportEdges;
    for (int e = 0; e < instance.numEdges(); ++e) {
        const auto [u, v] = instance.edgeEndpoints(e);
        if (u >= 1 && xBar(e) > 1e-9) {
            supportEdges.emplace_back(u, v);
            parent[find(u)] = find(v);
        }
    }
    std::map<int, Component> byRoot;
    for (int v = 1; v <= n; ++v) {
        byRoot[find(v)].nodes.push_back(v);
    }
    for (const auto &[u, v] : supportEdges) {
        byRoot[find(u)].edges.emplace_back(u, v);
    }
    std::vector<Component> components;
    for (auto &[root, comp] : byRoot) {
        components.push_back(std::move(comp));
    }
    return components;
}

// Explicit traversal: walks the component from a degree-one endpoint and
// checks it covers every node without branching.
std::optional<Route> componentAsPath(const Component &comp) {
    if (comp.nodes.size() == 1) {
        return comp.edges.empty() ? std::optional<Route>{Route{comp.nodes[0]}}
                                  : std::nullopt;
    }
    std::map<int, std::vector<int>> adj;
    for (const auto &[u, v] : comp.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    int start = -1;
    for (int v : comp.nodes) {
        const size_t degree = adj.count(v) ? adj[v].size() : 0;
        if (degree > 2 || degree == 0) {
            return std::nullopt;
        }
        if (degree == 1 && start < 0) {
            start = v;
        }
    }
    if (start < 0) {
        return std::nullopt;  // every degree is 2: a cycle
    }
    Route path{start};
    int prev = -1;
    int current = start;
    while (true) {
        int next = -1;
        for (int cand : adj[current]) {
            if (cand != prev) {
                next = cand;
                break;
            }
        }
        if (next < 0) {
            break;
        }
        path.push_back(next);
        prev = current;
        current = next;
    }
    if (path.size() != comp.nodes.size()) {
        return std::nullopt;
    }
    return path;
}

} // namespace

std::vector<DisaggRow> separatePSCuts(const VrpsdInstance &instance,
                                      const VectorXd &xBar,
                                      const VectorXd &thetaPrimeBar) {
    const int n = instance.numCustomers();
    const int numEdges = instance.numEdges();
    if (thetaPrimeBar.size() != n) {
        throw DimensionMismatchError("theta' must be indexed by customers");
    }
    std::vector<DisaggRow> cuts;

    const std::vector<Component> components = supportComponents(instance, xBar);

    // Candidate sets for S-cuts: violated RCI sets plus every component.
    std::vector<std::vector<int>> candidates;
    if (n <= 20) {
        for (const RciCut &rci : separateRciExact(instance, xBar)) {
            candidates.push_back(rci.customers);
        }
    }
    for (const Component &comp : components) {
        candidates.push_back(comp.nodes);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    for (const std::vector<int> &s : candidates) {
        if (s.size() > 10) {
            continue;  // partition bound intractable, leave to RCIs
        }
        const double lowerBound = recourseLowerBound(instance, s);
        if (!std::isfinite(lowerBound) || lowerBound <= 1e-9) {
            continue;
        }
        long long q = 0;
        for (int v : s) {
            q += instance.meanDemand(v);
        }
        const double ceilTerm = static_cast<double>(
            (q + instance.capacity() - 1) / instance.capacity());
        std::vector<int> insideEdges;
        double insideValue = 0;
        for (size_t i = 0; i < s.size(); ++i) {
            for (size_t j = i + 1; j < s.size(); ++j) {
                const int e = instance.edgeIndex(s[i], s[j]);
                insideEdges.push_back(e);
                insideValue += xBar(e);
            }
        }
        const double multiplier =
            1.0 + insideValue - static_cast<double>(s.size()) + ceilTerm;
        const double rhsValue = lowerBound * multiplier;
        double lhsValue = 0;
        for (int v : s) {
            lhsValue += thetaPrimeBar(v - 1);
        }
        if (lhsValue >= rhsValue - 1e-6) {
            continue;
        }
        DisaggRow cut;
        cut.kind = "S-cut";
        cut.violation = rhsValue - lhsValue;
        cut.row.sense = RowSense::GreaterEqual;
        cut.row.rhs = lowerBound * (1.0 - static_cast<double>(s.size()) +
                                    ceilTerm);
        for (int v : s) {
            cut.row.coeffs.emplace_back(numEdges + v - 1, 1.0);
        }
        for (int e : insideEdges) {
            cut.row.coeffs.emplace_back(e, -lowerBound);
        }
        cuts.push_back(std::move(cut));
    }

    // P-cuts for components that are certified paths.
    for (const Component &comp : components) {
        if (comp.nodes.size() < 2) {
            continue;
        }
        const std::optional<Route> path = componentAsPath(comp);
        if (!path) {
            continue;
        }
        if (routeDemand(instance, *path) > instance.capacity()) {
            continue;
        }
        Route reversed(*path);
        std::reverse(reversed.begin(), reversed.end());
        const double recourse = std::min(expectedRecourse(instance, *path),
                                         expectedRecourse(instance, reversed));
        if (recourse <= 1e-9) {
            continue;
        }
        double pathEdgeValue = 0;
        std::vector<int> pathEdges;
        for (size_t i = 0; i + 1 < path->size(); ++i) {
            const int e = instance.edgeIndex((*path)[i], (*path)[i + 1]);
            pathEdges.push_back(e);
            pathEdgeValue += xBar(e);
        }
        const double rhsValue =
            recourse *
            (1.0 + pathEdgeValue - static_cast<double>(pathEdges.size()));
        double lhsValue = 0;
        for (int v : *path) {
            lhsValue += thetaPrimeBar(v - 1);
        }
        if (lhsValue >= rhsValue - 1e-6) {
            continue;
        }
        DisaggRow cut;
        cut.kind = "P-cut";
        cut.violation = rhsValue - lhsValue;
        cut.row.sense = RowSense::GreaterEqual;
        cut.row.rhs =
            recourse * (1.0 - static_cast<double>(pathEdges.size()));
        for (int v : *path) {
            cut.row.coeffs.emplace_back(numEdges + v - 1, 1.0);
        }
        for (int e : pathEdges) {
            cut.row.coeffs.emplace_back(e, -recourse);
        }
        cuts.push_back(std::move(cut));
    }

    std::sort(cuts.begin(), cuts.end(),
              [](const DisaggRow &a, const DisaggRow &b) {
                  return a.violation > b.violation;
              });
    return cuts;
}

SolveMode parseMode(const std::string &name) {
    if (name == "parada") {
        return SolveMode::Parada;
    }
    if (name == "benders") {
        return SolveMode::Benders;
    }
    if (name == "lagrange") {
        return SolveMode::Lagrange;
    }
    if (name == "corner") {
        return SolveMode::Corner;
    }
    throw ParseError("unknown mode: " + name);
}

std::string modeName(SolveMode mode) {
    switch (mode) {
    case SolveMode::Parada:
        return "parada";
    case SolveMode::Benders:
        return "benders";
    case SolveMode::Lagrange:
        return "lagrange";
    case SolveMode::Corner:
        return "corner";
    }
    return "?";
}

namespace {

// Lagrangian dual of the linking constraints, solving the substituted flow
// LP with exact RCI row generation.
struct VrpsdLagrangian {
    VectorXd alphaHat;
    double value = 0;
};

VrpsdLagrangian solveVrpsdLagrangian(const VrpsdInstance &instance,
                                     const StateNetwork &stateNet) {
    ProblemData data = vrpsdProblemData(instance, stateNet, false);
    std::vector<unsigned> rciMasks;
    for (int round = 0;; ++round) {
        LagrangianDual dual =
            solveLagrangianDual(data, instance.edgeCostVector(), 1.0);
        const VectorXd xHat = data.Q * dual.yStar;
        std::vector<RciCut> violated = separateRciExact(instance, xHat);
        if (violated.empty()) {
            VrpsdLagrangian out;
            out.alphaHat = dual.alphaHat;
            out.value = dual.dualValue;
            return out;
        }
        for (const RciCut &cut : violated) {
            data.xRows.addRow(cut.row(instance));
        }
        if (round > (1 << std::min(instance.numCustomers(), 20)) ) {
            throw NumericalFailureError("RCI row generation did not settle");
        }
    }
}

struct LoopMaster {
    GeneralLp lp;  // x block then theta' block
    int numEdges;
    int numCustomers;
};

LoopMaster makeLoopMaster(const VrpsdInstance &instance) {
    LoopMaster master;
    master.numEdges = instance.numEdges();
    master.numCustomers = instance.numCustomers();
    const GeneralLp xRows = masterXRows(instance);
    master.lp = GeneralLp::withVars(master.numEdges + master.numCustomers);
    for (int e = 0; e < master.numEdges; ++e) {
        master.lp.objective(e) = instance.edgeCost(e);
        master.lp.lowerBounds(e) = xRows.lowerBounds(e);
        master.lp.upperBounds(e) = xRows.upperBounds(e);
    }
    for (int v = 0; v < master.numCustomers; ++v) {
        master.lp.objective(master.numEdges + v) = 1.0;
    }
    for (const LpRow &row : xRows.rows) {
        master.lp.addRow(row);
    }
    return master;
}

// Benders-type cut alpha'x + alpha0 * (sum_v theta'_v) >= beta.
LpRow liftCutRow(const Cut &cut, int numEdges, int numCustomers) {
    LpRow row;
    row.sense = RowSense::GreaterEqual;
    row.rhs = cut.beta;
    for (int e = 0; e < numEdges; ++e) {
        if (cut.alpha(e) != 0.0) {
            row.coeffs.emplace_back(e, cut.alpha(e));
        }
    }
    if (cut.alpha0 != 0.0) {
        for (int v = 0; v < numCustomers; ++v) {
            row.coeffs.emplace_back(numEdges + v, cut.alpha0);
        }
    }
    return row;
}

} // namespace

RootReport cuttingPlaneLoop(const VrpsdInstance &instance, SolveMode mode,
                            const SolveOptions &options) {
    const auto start = Clock::now();
    RootReport report;
    LoopMaster master = makeLoopMaster(instance);

    // Mode-specific setup: Lagrangian dual, corner from the shortest-path
    // tree, interior point.
    std::optional<StateNetwork> stateNet;
    std::optional<ProblemData> data;
    std::optional<Corner> corner;
    std::optional<EpigraphCone> cone;
    std::optional<InteriorPoint> interior;
    std::vector<int> warmRays;
    ViolatedRaySource raySource;
    std::optional<SparseColumns> qSparse;
    std::optional<SpanningTree> tree;
    std::vector<int> rayIndexOfArc;

    if (mode != SolveMode::Parada) {
        stateNet = buildStateNetwork(instance);
        data = vrpsdProblemData(instance, *stateNet, false);
    }
    if (mode == SolveMode::Lagrange || mode == SolveMode::Corner) {
        const VrpsdLagrangian lagrangian = [&] {
            try {
                return solveVrpsdLagrangian(instance, *stateNet);
            } catch (const InfeasibleSetError &e) {
                throw InfeasibleInstanceError(e.what());
            }
        }();
        report.lagrangianValue = lagrangian.value;

        VectorXd weights = stateNet->arcCost;
        for (int a = 0; a < stateNet->net.numArcs(); ++a) {
            weights(a) += lagrangian.alphaHat(stateNet->arcEdge[a]);
        }
        const ShortestPathResult sp =
            shortestPathTree(stateNet->net, weights);
        tree = sp.tree;

        if (mode == SolveMode::Lagrange) {
            const Cut cut = lagrangianCut(*data, lagrangian.alphaHat, 1.0);
            master.lp.addRow(
                liftCutRow(cut, master.numEdges, master.numCustomers));
            ++report.bendersCuts;
        } else {
            Basis basis;
            basis.cols = tree->arcIds;
            corner = cornerFromBasis(data->yLp, basis);
            cone = epigraphCone(*corner, *data);
            interior = networkInteriorPoint(stateNet->net, *data);
            qSparse = SparseColumns::fromDense(data->Q);
            rayIndexOfArc.assign(stateNet->net.numArcs(), -1);
            int rayIndex = 0;
            for (int a = 0; a < stateNet->net.numArcs(); ++a) {
                if (!tree->inTree[a]) {
                    rayIndexOfArc[a] = rayIndex++;
                }
            }
            raySource = [&instance, &stateNet = *stateNet, &tree = *tree,
                         &qSparse = *qSparse,
                         &rayIndexOfArc](const VectorXd &alpha, double alpha0)
                -> std::vector<RayViolation> {
                std::vector<RayViolation> out;
                for (const ViolatedArc &va :
                     findViolatedRayArcs(alpha, alpha0, stateNet.net, tree,
                                         qSparse, stateNet.arcCost)) {
                    out.push_back(
                        RayViolation{rayIndexOfArc[va.arcId], va.slack});
                }
                return out;
            };
        }
    }
    if (mode == SolveMode::Benders) {
        // Nothing to prepare beyond the problem data.
    }

    bool separated = true;
    double prevBound = -kInf;
    int stallCount = 1;
    int iteration = 0;
    std::string lastCutType = "none";
    VectorXd xBar;
    VectorXd thetaBar;
    while (separated && stallCount <= 10) {
        GeneralOutcome sol = solveGeneral(master.lp);
        if (sol.status == LpStatus::Infeasible) {
            throw InfeasibleInstanceError("root relaxation infeasible");
        }
        if (sol.status != LpStatus::Optimal) {
            throw NumericalFailureError("root relaxation unbounded");
        }
        xBar = sol.primal.head(master.numEdges);
        thetaBar = sol.primal.tail(master.numCustomers);
        const double bound = sol.objectiveValue;

        IterationLogEntry entry;
        entry.iteration = iteration;
        entry.timeSec = elapsedSec(start);
        entry.bound = bound;
        entry.cutType = lastCutType;
        entry.cutsTotal =
            report.rciCuts + report.ilsCuts + report.bendersCuts;
        report.trace.push_back(entry);

        if (bound - prevBound <= 1e-3) {
            ++stallCount;
        } else {
            stallCount = 1;
        }
        prevBound = bound;
        report.bound = bound;
        report.x = xBar;
        report.thetaPrime = thetaBar;
        ++iteration;

        if (elapsedSec(start) > options.timeLimitSec) {
            report.hitTimeLimit = true;
            break;
        }

        separated = false;
        const std::vector<RciCut> rci = separateRciExact(instance, xBar);
        const std::vector<DisaggRow> ps =
            separatePSCuts(instance, xBar, thetaBar);
        if (!rci.empty() || !ps.empty()) {
            for (const RciCut &cut : rci) {
                master.lp.addRow(cut.row(instance));
                ++report.rciCuts;
            }
            for (const DisaggRow &cut : ps) {
                master.lp.addRow(cut.row);
                ++report.ilsCuts;
            }
            separated = true;
            lastCutType = "rci/ils";
            continue;
        }

        const double thetaTotal = thetaBar.sum();
        if (mode == SolveMode::Benders) {
            const std::optional<Cut> cut =
                separateFischetti(*data, xBar, thetaTotal);
            if (cut) {
                master.lp.addRow(
                    liftCutRow(*cut, master.numEdges, master.numCustomers));
                ++report.bendersCuts;
                separated = true;
                lastCutType = "fischetti";
            }
        } else if (mode == SolveMode::Corner) {
            const EpiPoint candidate{xBar, thetaTotal};
            PolarResult res = solveReversePolar(candidate, *interior, *cone,
                                                warmRays, raySource);
            warmRays = res.warmRays;
            if (res.polarCase != PolarCase::Member) {
                master.lp.addRow(liftCutRow(res.cut, master.numEdges,
                                            master.numCustomers));
                ++report.bendersCuts;
                if (res.polarCase == PolarCase::ImplicitEquality) {
                    Cut reversed = res.cut;
                    reversed.alpha = -res.cut.alpha;
                    reversed.alpha0 = -res.cut.alpha0;
                    reversed.beta = -res.cut.beta;
                    master.lp.addRow(liftCutRow(reversed, master.numEdges,
                                                master.numCustomers));
                    ++report.bendersCuts;
                }
                separated = true;
                lastCutType = "corner";
            }
        }
    }

    // Final resolve so the reported bound reflects every added cut.
    GeneralOutcome finalSol = solveGeneral(master.lp);
    if (finalSol.status == LpStatus::Optimal) {
        report.bound = finalSol.objectiveValue;
        report.x = finalSol.primal.head(master.numEdges);
        report.thetaPrime = finalSol.primal.tail(master.numCustomers);
    }
    report.finalLp = master.lp;
    report.timeSec = elapsedSec(start);
    return report;
}

namespace {

std::vector<Route> reconstructRoutes(const VrpsdInstance &instance,
                                     const VectorXd &xBar) {
    const int n = instance.numCustomers();
    std::vector<std::vector<int>> multiplicity(n + 1,
                                               std::vector<int>(n + 1, 0));
    for (int e = 0; e < instance.numEdges(); ++e) {
        const auto [u, v] = instance.edgeEndpoints(e);
        const int m = static_cast<int>(std::llround(xBar(e)));
        multiplicity[u][v] = m;
        multiplicity[v][u] = m;
    }
    std::vector<Route> routes;
    for (int v0 = 1; v0 <= n; ++v0) {
        while (multiplicity[0][v0] > 0) {
            Route route;
            --multiplicity[0][v0];
            --multiplicity[v0][0];
            int current = v0;
            while (current != 0) {
                route.push_back(current);
                int next = -1;
                for (int u = 0; u <= n; ++u) {
                    if (multiplicity[current][u] > 0) {
                        next = u;
                        break;
                    }
                }
                if (next < 0) {
                    throw NumericalFailureError(
                        "route reconstruction hit a dead end");
                }
                --multiplicity[current][next];
                --multiplicity[next][current];
                current = next;
            }
            Route reversed(route);
            std::reverse(reversed.begin(), reversed.end());
            if (expectedRecourse(instance, reversed) <
                expectedRecourse(instance, route)) {
                route = reversed;
            }
            routes.push_back(std::move(route));
        }
    }
    return routes;
}

struct BnbNode {
    double bound = -kInf;
    long long id = 0;
    VectorXd lower;
    VectorXd upper;
};

struct NodeOrder {
    bool operator()(const BnbNode &a, const BnbNode &b) const {
        if (a.bound != b.bound) {
            return a.bound > b.bound;  // min-heap on bound
        }
        return a.id > b.id;
    }
};

} // namespace

IntegerResult solveInteger(const VrpsdInstance &instance, SolveMode mode,
                           const SolveOptions &options) {
    const auto start = Clock::now();
    IntegerResult result;
    result.root = cuttingPlaneLoop(instance, mode, options);
    if (result.root.hitTimeLimit) {
        result.hitTimeLimit = true;
        return result;
    }
    const int numEdges = instance.numEdges();
    const int numCustomers = instance.numCustomers();

    GeneralLp base = result.root.finalLp;
    std::vector<LpRow> pool;

    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
    BnbNode rootNode;
    rootNode.bound = result.root.bound;
    rootNode.id = 0;
    rootNode.lower = base.lowerBounds.head(numEdges);
    rootNode.upper = base.upperBounds.head(numEdges);
    open.push(rootNode);
    long long nextId = 1;

    double incumbent = kInf;
    std::vector<Route> incumbentRoutes;

    const SolveOptions remaining{options.timeLimitSec};
    while (!open.empty()) {
        if (elapsedSec(start) > remaining.timeLimitSec) {
            result.hitTimeLimit = true;
            break;
        }
        BnbNode node = open.top();
        open.pop();
        if (node.bound >= incumbent - 1e-9) {
            break;  // best-bound order: everything left is dominated
        }

        GeneralLp lp = base;
        lp.lowerBounds.head(numEdges) = node.lower;
        lp.upperBounds.head(numEdges) = node.upper;
        for (const LpRow &row : pool) {
            lp.addRow(row);
        }

        bool pruned = false;
        while (true) {
            ++result.nodes;
            GeneralOutcome sol = solveGeneral(lp);
            if (sol.status == LpStatus::Infeasible) {
                pruned = true;
                break;
            }
            if (sol.status != LpStatus::Optimal) {
                throw NumericalFailureError("node relaxation unbounded");
            }
            if (sol.objectiveValue >= incumbent - 1e-9) {
                pruned = true;
                break;
            }
            const VectorXd xBar = sol.primal.head(numEdges);
            const VectorXd thetaBar = sol.primal.tail(numCustomers);

            int branchEdge = -1;
            double branchScore = 1e-6;
            for (int e = 0; e < numEdges; ++e) {
                const double frac = std::abs(xBar(e) - std::llround(xBar(e)));
                if (frac > branchScore + 1e-12 ||
                    (frac > branchScore - 1e-12 && branchEdge >= 0 &&
                     instance.edgeCost(e) > instance.edgeCost(branchEdge))) {
                    branchScore = frac;
                    branchEdge = e;
                }
            }

            if (branchEdge >= 0) {
                BnbNode down;
                down.bound = sol.objectiveValue;
                down.id = nextId++;
                down.lower = node.lower;
                down.upper = node.upper;
                down.upper(branchEdge) = std::floor(xBar(branchEdge));
                open.push(down);
                BnbNode up;
                up.bound = sol.objectiveValue;
                up.id = nextId++;
                up.lower = node.lower;
                up.upper = node.upper;
                up.lower(branchEdge) = std::ceil(xBar(branchEdge));
                open.push(up);
                pruned = true;  // handled via children
                break;
            }

            // Integral point: exact separation before accepting.
            const std::vector<RciCut> rci = separateRciExact(instance, xBar);
            const std::vector<DisaggRow> ps =
                separatePSCuts(instance, xBar, thetaBar);
            if (!rci.empty() || !ps.empty()) {
                for (const RciCut &cut : rci) {
                    pool.push_back(cut.row(instance));
                    lp.addRow(pool.back());
                }
                for (const DisaggRow &cut : ps) {
                    pool.push_back(cut.row);
                    lp.addRow(pool.back());
                }
                continue;
            }
            if (sol.objectiveValue < incumbent - 1e-9) {
                incumbent = sol.objectiveValue;
                incumbentRoutes = reconstructRoutes(instance, xBar);
            }
            pruned = true;
            break;
        }
        (void)pruned;
    }

    if (!std::isfinite(incumbent) && !result.hitTimeLimit) {
        throw InfeasibleInstanceError("no feasible k-route partition");
    }
    result.value = incumbent;
    result.routes = incumbentRoutes;
    return result;
}

} // namespace cornercuts
