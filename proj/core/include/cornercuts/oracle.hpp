#ifndef CORNERCUTS_ORACLE_HPP
#define CORNERCUTS_ORACLE_HPP

#include <vector>

#include "cornercuts/vrpsd.hpp"

namespace cornercuts {
namespace oracle {

struct EnumeratedRoute {
    Route route;
    double firstStageCost = 0;
    double recourse = 0;
};

// Every elementary q-route (all orderings), via DFS.
std::vector<EnumeratedRoute> enumerateQRoutes(const VrpsdInstance &instance);

// Every q-route sequence (repeats allowed, no immediate repeat); these are
// exactly the s-t paths of the state network.
std::vector<EnumeratedRoute> enumerateQRouteSequences(
    const VrpsdInstance &instance);

// LP value of the path-flow formulation with every column present.
double dwBoundEnumeration(const VrpsdInstance &instance);

// Feasibility oracle: is (w, theta) in the projected corner epigraph?
bool epiMembershipCorner(const EpigraphCone &cone, const VectorXd &w,
                         double theta);

// Direct value-function comparison for epi(f_Y).
bool epiMembershipY(const ProblemData &data, const VectorXd &w, double theta);

struct RestrictedDualReport {
    bool accept = false;
    VectorXd alpha;   // certificate when rejected
    double alpha0 = 0;
    VectorXd nu;
};

// Membership via the basis-restricted dual subproblem; must agree with
// epiMembershipCorner on the same corner.
RestrictedDualReport restrictedDualCheck(const ProblemData &data,
                                         const Corner &corner,
                                         const VectorXd &w, double theta);

struct BruteForceResult {
    double value = kInf;
    std::vector<Route> routes;
};

// Exhaustive search over partitions of the customers into exactly k
// elementary q-routes, orientations included.
BruteForceResult bruteForceOptimum(const VrpsdInstance &instance,
                                   bool firstStageOnly = false);

} // namespace oracle
} // namespace cornercuts

#endif
