#ifndef CORNERCUTS_POLAR_HPP
#define CORNERCUTS_POLAR_HPP

#include <functional>
#include <vector>

#include "cornercuts/corner.hpp"
#include "cornercuts/network.hpp"

namespace cornercuts {

enum class CutKind {
    Facet,
    ImplicitEqualityPair,
    LagrangianCut,
    FischettiCut,
    ObjectiveCut,
};

// A Benders-type inequality alpha'w + alpha0*theta >= beta.
struct Cut {
    VectorXd alpha;
    double alpha0 = 0;
    double beta = 0;
    CutKind kind = CutKind::Facet;

    double evaluate(const VectorXd &w, double theta) const {
        return alpha.dot(w) + alpha0 * theta - beta;
    }
    void clampAlpha0();
};

// Point in the relative interior of Y together with its lifted projection
// (w', theta') = (Qy', d'y' + eps).
struct InteriorPoint {
    VectorXd y;
    VectorXd w;
    double theta = 0;
    double epsilon = 1.0;
    bool degenerate = false;  // Y is a single point
};

// Generic construction: averages the distinct vertices found by minimizing
// and maximizing every coordinate (boxed when unbounded above).
InteriorPoint relativeInteriorPoint(const ProblemData &data);

// Network construction: superposes one s-t unit path flow through every arc
// and rescales the total flow to k.
InteriorPoint networkInteriorPoint(const Network &net, const ProblemData &data);

struct RayViolation {
    int rayIndex = -1;  // index into the corner ray list
    double slack = 0;
};

// Callback producing rays whose inequality is violated by (alpha, alpha0).
using ViolatedRaySource =
    std::function<std::vector<RayViolation>(const VectorXd &, double)>;

// Scans every corner ray of the cone; the generic fallback source.
ViolatedRaySource genericRayScan(const EpigraphCone &cone);

// Session state for repeated separations against one epigraph cone.
struct ReversePolarState {
    const EpigraphCone *cone = nullptr;
    std::vector<int> activeRays;  // R'
    std::vector<int> warmRays;    // R~ across calls
    std::vector<double> lastMultipliers;
};

enum class PolarCase {
    Member,            // z >= -1, candidate belongs to epi(f_C)
    ViolatedFacet,     // -inf < z < -1
    ImplicitEquality,  // z = -inf
};

struct PolarResult {
    PolarCase polarCase = PolarCase::Member;
    Cut cut;
    double zCirc = 0;  // -inf in the implicit-equality case
    std::vector<int> warmRays;
    int cglpSolves = 0;
    int raysGenerated = 0;
};

struct PolarOptions {
    int maxRowsPerRound = 100;  // most-violated rays added per iteration
    double boundaryTol = 1e-9;  // |z + 1| below this counts as membership
};

// Row generation over the reverse polar set of the translated cone.
PolarResult solveReversePolar(const EpiPoint &candidate,
                              const InteriorPoint &interior,
                              const EpigraphCone &cone,
                              const std::vector<int> &warmRays,
                              const ViolatedRaySource &source,
                              const PolarOptions &options = {});

struct FacetRankReport {
    bool apexTight = false;
    std::vector<int> tightRays;  // cone ray indices (vertical included)
    int tightRank = 0;
    int epiDimension = 0;  // rank of the full ray span
    bool facetVerified = false;
};

// Tight generators of a case-(ii) cut and the rank of their span.
FacetRankReport facetCertificate(const Cut &cut, const EpigraphCone &cone);

} // namespace cornercuts

#endif
