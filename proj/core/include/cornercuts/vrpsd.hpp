#ifndef CORNERCUTS_VRPSD_HPP
#define CORNERCUTS_VRPSD_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cornercuts/benders.hpp"
#include "cornercuts/network.hpp"

namespace cornercuts {

// VRPSD instance on the complete graph over {0} u {1..n}. Demands are
// independent normals with variance proportional to the mean; the shared
// ratio keeps the accumulated variance a function of the state load.
class VrpsdInstance {
  public:
    VrpsdInstance(int numCustomers, int vehicles, long long capacity,
                  MatrixXd costs, std::vector<long long> meanDemand,
                  std::vector<double> demandVariance);

    int numCustomers() const { return n_; }
    int vehicles() const { return k_; }
    long long capacity() const { return capacity_; }
    double cost(int u, int v) const { return costs_(u, v); }
    long long meanDemand(int v) const { return meanDemand_[v - 1]; }
    double variance(int v) const { return variance_[v - 1]; }
    double varianceRatio() const { return kappa_; }

    int numEdges() const { return n_ * (n_ + 1) / 2; }
    int edgeIndex(int u, int v) const;
    std::pair<int, int> edgeEndpoints(int e) const;
    bool depotEdge(int e) const { return edgeEndpoints(e).first == 0; }
    double edgeCost(int e) const {
        const auto [u, v] = edgeEndpoints(e);
        return costs_(u, v);
    }
    VectorXd edgeCostVector() const;

  private:
    int n_;
    int k_;
    long long capacity_;
    MatrixXd costs_;
    std::vector<long long> meanDemand_;
    std::vector<double> variance_;
    double kappa_;
};

using Route = std::vector<int>;  // ordered customers

// Expected cost of the back-and-forth trips triggered at customer v when the
// accumulated mean load reaches mu.
double psi(const VrpsdInstance &instance, int v, long long mu);

// Expected recourse of a q-route under the classical policy.
double expectedRecourse(const VrpsdInstance &instance, const Route &route);

double routeFirstStageCost(const VrpsdInstance &instance, const Route &route);
long long routeDemand(const VrpsdInstance &instance, const Route &route);

enum class StateArcClass { Src, Fwd, Snk };

// Pricing network over states [v, mu]; s-t paths encode q-route sequences.
struct StateNetwork {
    Network net;
    std::vector<int> stateCustomer;  // vertex(S); 0 at s and t
    std::vector<int> stateLoad;      // mu; 0 at s and t
    std::vector<int> arcEdge;        // edge(a)
    std::vector<StateArcClass> arcClass;
    VectorXd arcCost;                // d

    int source() const { return net.source; }
    int sink() const { return net.sink; }
};

StateNetwork buildStateNetwork(const VrpsdInstance &instance);

// Static first-stage rows: degree equations and edge bounds. Rounded
// capacity inequalities are delivered lazily by the separator.
GeneralLp masterXRows(const VrpsdInstance &instance);

// X including every rounded capacity inequality, enumerated (desk scale).
GeneralLp masterXRowsWithAllRci(const VrpsdInstance &instance);

// Arc-flow ProblemData with x = Qy, h = 0, T = -I.
ProblemData vrpsdProblemData(const VrpsdInstance &instance,
                             const StateNetwork &stateNet,
                             bool includeAllRci);

struct RciCut {
    std::vector<int> customers;
    double violation = 0;
    LpRow row(const VrpsdInstance &instance) const;
};

// Exhaustive RCI separation: every S with xbar(delta(S)) < 2*ceil(q(S)/C).
std::vector<RciCut> separateRciExact(const VrpsdInstance &instance,
                                     const VectorXd &xBar);

// Row over (x, theta'_1..theta'_n) appended after the x block.
struct DisaggRow {
    LpRow row;            // coefficients over x then theta'
    std::string kind;     // "P-cut" or "S-cut"
    double violation = 0;
};

std::vector<DisaggRow> separatePSCuts(const VrpsdInstance &instance,
                                      const VectorXd &xBar,
                                      const VectorXd &thetaPrimeBar);

// Recourse lower bound L(S): cheapest expected recourse over partitions of S
// into at most k elementary q-routes; +inf when S cannot be covered.
double recourseLowerBound(const VrpsdInstance &instance,
                          const std::vector<int> &customers);

enum class SolveMode { Parada, Benders, Lagrange, Corner };

SolveMode parseMode(const std::string &name);
std::string modeName(SolveMode mode);

struct RootReport {
    double bound = 0;
    std::vector<IterationLogEntry> trace;
    VectorXd x;
    VectorXd thetaPrime;
    GeneralLp finalLp;
    int rciCuts = 0;
    int ilsCuts = 0;
    int bendersCuts = 0;
    double timeSec = 0;
    bool hitTimeLimit = false;
    double lagrangianValue = 0;  // modes lagrange/corner
};

struct SolveOptions {
    double timeLimitSec = 3600;
};

// Appendix-style cutting-plane loop at the root: RCI/ILS first, then the
// mode-specific Benders separation, with the two stopping rules.
RootReport cuttingPlaneLoop(const VrpsdInstance &instance, SolveMode mode,
                            const SolveOptions &options = {});

struct IntegerResult {
    double value = kInf;
    std::vector<Route> routes;
    long long nodes = 0;
    bool hitTimeLimit = false;
    RootReport root;
};

// Best-bound branch-and-bound on the x variables; exact RCI and P/S-cut
// separation at integral nodes.
IntegerResult solveInteger(const VrpsdInstance &instance, SolveMode mode,
                           const SolveOptions &options = {});

} // namespace cornercuts

#endif
