#ifndef CORNERCUTS_BENDERS_HPP
#define CORNERCUTS_BENDERS_HPP

#include <optional>
#include <string>
#include <vector>

#include "cornercuts/polar.hpp"

namespace cornercuts {

struct IterationLogEntry {
    int iteration = 0;
    double timeSec = 0;
    double bound = 0;
    std::string cutType;
    int cutsTotal = 0;
};

// Master relaxation over (x, theta) plus the accumulated cut set.
struct MasterState {
    GeneralLp relaxation;  // vars x_0..x_{n-1}, theta at index n
    std::vector<Cut> cuts; // Omega, in (w, theta) space
    std::vector<IterationLogEntry> log;
    std::optional<Basis> lastBasis;

    int thetaVar() const { return relaxation.numVars - 1; }
};

// Master with the X rows, bounds, objective c'x + theta, and theta >= lb.
MasterState makeMaster(const ProblemData &data, double thetaLowerBound);

// Appends a (w,theta)-space cut as an (x,theta) row via w = h - Tx.
void addCutToMaster(MasterState &master, const ProblemData &data,
                    const Cut &cut);

struct MasterSolution {
    VectorXd x;
    double theta = 0;
    double bound = 0;
};

MasterSolution solveMaster(MasterState &master);

// Normalized dual separation over epi(f_Y): max of the cut violation subject
// to dual feasibility and ||alpha||_1 + alpha0 <= 1.
std::optional<Cut> separateFischetti(const ProblemData &data,
                                     const VectorXd &xBar, double thetaBar);

struct LagrangianDual {
    VectorXd alphaHat;
    double dualValue = 0;
    VectorXd yStar;  // optimal point of the substituted LP
};

// Lagrangian dual via the substituted LP; requires T = -I, h = 0, Q >= 0.
LagrangianDual solveLagrangianDual(const ProblemData &data, const VectorXd &rho,
                                   double rho0);

// alphaHat'w + rho0*theta >= sigma_Y(Q'alphaHat + rho0 d).
Cut lagrangianCut(const ProblemData &data, const VectorXd &alphaHat,
                  double rho0);

struct SeparateCornerOptions {
    double dedupTol = 1e-9;  // cosine dedup threshold is 1 - dedupTol
    int maxIterations = 10000;
};

// Algorithm-style outer loop: build the optimal corner for the seed cut,
// then alternate master solves with reverse-polar separations until the
// candidate lies in epi(f_C). Returns the cuts added (Omega).
std::vector<Cut> separateCornerBendersCuts(MasterState &master,
                                           const ProblemData &data,
                                           const InteriorPoint &interior,
                                           const VectorXd &seedAlpha,
                                           double seedAlpha0,
                                           const SeparateCornerOptions &opt = {});

} // namespace cornercuts

#endif
