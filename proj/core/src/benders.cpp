#include "cornercuts/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cornercuts {

MasterState makeMaster(const ProblemData &data, double thetaLowerBound) {
    const int n = data.n();
    MasterState master;
    master.relaxation = GeneralLp::withVars(n + 1);
    master.relaxation.objective.head(n) = data.c;
    master.relaxation.objective(n) = 1.0;
    master.relaxation.lowerBounds.head(n) = data.xRows.lowerBounds;
    master.relaxation.upperBounds.head(n) = data.xRows.upperBounds;
    master.relaxation.lowerBounds(n) = thetaLowerBound;
    master.relaxation.upperBounds(n) = kInf;
    for (const LpRow &row : data.xRows.rows) {
        master.relaxation.addRow(row);
    }
    return master;
}

void addCutToMaster(MasterState &master, const ProblemData &data,
                    const Cut &cut) {
    // alpha'(h - Tx) + alpha0 theta >= beta.
    LpRow row;
    row.sense = RowSense::GreaterEqual;
    row.rhs = cut.beta - cut.alpha.dot(data.h);
    const VectorXd xCoeffs = -data.T.transpose() * cut.alpha;
    for (int j = 0; j < data.n(); ++j) {
        if (xCoeffs(j) != 0.0) {
            row.coeffs.emplace_back(j, xCoeffs(j));
        }
    }
    if (cut.alpha0 != 0.0) {
        row.coeffs.emplace_back(master.thetaVar(), cut.alpha0);
    }
    master.relaxation.addRow(std::move(row));
    master.cuts.push_back(cut);
}

MasterSolution solveMaster(MasterState &master) {
    GeneralOutcome out = solveGeneral(master.relaxation, master.lastBasis);
    if (out.status == LpStatus::Infeasible) {
        throw InfeasibleSetError("master relaxation infeasible");
    }
    if (out.status == LpStatus::Unbounded) {
        throw UnboundedObjectiveError("master relaxation unbounded");
    }
    master.lastBasis = out.standard.basis;
    MasterSolution sol;
    sol.x = out.primal.head(master.relaxation.numVars - 1);
    sol.theta = out.primal(master.thetaVar());
    sol.bound = out.objectiveValue;
    return sol;
}

std::optional<Cut> separateFischetti(const ProblemData &data,
                                     const VectorXd &xBar, double thetaBar) {
    if (!xBar.allFinite() || !std::isfinite(thetaBar)) {
        throw DimensionMismatchError("candidate not finite");
    }
    const int p = data.p();
    const int m = data.m();
    const int rowsY = data.yLp.numRows();
    const VectorXd wBar = data.h - data.T * xBar;

    // Variables: a+ (p), a- (p), nu (rowsY, free), alpha0.
    const int aPlus = 0;
    const int aMinus = p;
    const int nuBase = 2 * p;
    const int alpha0Var = 2 * p + rowsY;
    GeneralLp lp = GeneralLp::withVars(2 * p + rowsY + 1);
    for (int i = 0; i < rowsY; ++i) {
        lp.lowerBounds(nuBase + i) = -kInf;
    }

    // Maximize a'wBar + nu'b - alpha0*thetaBar, solved as a minimization.
    for (int i = 0; i < p; ++i) {
        lp.objective(aPlus + i) = -wBar(i);
        lp.objective(aMinus + i) = wBar(i);
    }
    for (int i = 0; i < rowsY; ++i) {
        lp.objective(nuBase + i) = -data.yLp.rhs(i);
    }
    lp.objective(alpha0Var) = thetaBar;

    // Dual feasibility of the scaled value-function LP:
    //   Q'a + A_Y'nu <= alpha0 * d  (one row per y column).
    for (int j = 0; j < m; ++j) {
        LpRow row;
        row.sense = RowSense::LessEqual;
        row.rhs = 0.0;
        for (int i = 0; i < p; ++i) {
            const double q = data.Q(i, j);
            if (q != 0.0) {
                row.coeffs.emplace_back(aPlus + i, q);
                row.coeffs.emplace_back(aMinus + i, -q);
            }
        }
        for (int i = 0; i < rowsY; ++i) {
            const double a = data.yLp.constraints(i, j);
            if (a != 0.0) {
                row.coeffs.emplace_back(nuBase + i, a);
            }
        }
        row.coeffs.emplace_back(alpha0Var, -data.d(j));
        lp.addRow(std::move(row));
    }

    // Fischetti normalization ||a||_1 + alpha0 <= 1 via the split variables.
    LpRow norm;
    norm.sense = RowSense::LessEqual;
    norm.rhs = 1.0;
    for (int i = 0; i < 2 * p; ++i) {
        norm.coeffs.emplace_back(i, 1.0);
    }
    norm.coeffs.emplace_back(alpha0Var, 1.0);
    lp.addRow(std::move(norm));

    const GeneralOutcome out = solveGeneral(lp);
    if (out.status != LpStatus::Optimal) {
        throw NumericalFailureError("Fischetti separation LP not optimal");
    }
    const double violation = -out.objectiveValue;
    if (violation <= 1e-6) {
        return std::nullopt;
    }
    Cut cut;
    cut.kind = CutKind::FischettiCut;
    cut.alpha.resize(p);
    for (int i = 0; i < p; ++i) {
        // Cut: alpha0*theta >= a'w + nu'b, written as (-a)'w + alpha0*theta
        // >= nu'b.
        cut.alpha(i) = -(out.primal(aPlus + i) - out.primal(aMinus + i));
    }
    cut.alpha0 = out.primal(alpha0Var);
    double beta = 0;
    for (int i = 0; i < rowsY; ++i) {
        beta += out.primal(nuBase + i) * data.yLp.rhs(i);
    }
    cut.beta = beta;
    cut.clampAlpha0();
    return cut;
}

LagrangianDual solveLagrangianDual(const ProblemData &data,
                                   const VectorXd &rho, double rho0) {
    const int n = data.n();
    const int p = data.p();
    if (rho.size() != n || rho0 < 0) {
        throw DimensionMismatchError("bad (rho, rho0)");
    }
    if (p == 0) {
        LagrangianDual result;
        result.dualValue =
            support(data.xRows, rho) + support(data.yLp, rho0 * data.d);
        return result;
    }
    if (data.T != -MatrixXd::Identity(p, n) ||
        data.h.lpNorm<Eigen::Infinity>() != 0.0) {
        throw StructureUnsupportedError(
            "Lagrangian LP route requires T = -I and h = 0");
    }
    if ((data.Q.array() < 0).any()) {
        throw StructureUnsupportedError(
            "Lagrangian LP route requires Q >= 0");
    }

    // Substituted LP over y: min (Q'rho + rho0 d)'y with the X rows written
    // on Qy and the Y rows kept as-is. X rows are normalized to >= form so
    // their duals enter alphaHat = rho - A_x' gamma with nonnegative gamma.
    const StandardLp &yLp = data.yLp;
    const int m = data.m();
    GeneralLp lp = GeneralLp::withVars(m);
    lp.objective = data.Q.transpose() * rho + rho0 * data.d;

    struct XRowRef {
        VectorXd coeffs;  // over x
        double rhs;
    };
    std::vector<XRowRef> xGeRows;
    auto pushXRow = [&](const VectorXd &coeffs, double rhs) {
        xGeRows.push_back(XRowRef{coeffs, rhs});
        LpRow row;
        row.sense = RowSense::GreaterEqual;
        row.rhs = rhs;
        const VectorXd onY = data.Q.transpose() * coeffs;
        for (int j = 0; j < m; ++j) {
            if (onY(j) != 0.0) {
                row.coeffs.emplace_back(j, onY(j));
            }
        }
        lp.addRow(std::move(row));
    };

    for (const LpRow &row : data.xRows.rows) {
        VectorXd coeffs = VectorXd::Zero(n);
        for (const auto &[col, value] : row.coeffs) {
            coeffs(col) += value;
        }
        switch (row.sense) {
        case RowSense::GreaterEqual:
            pushXRow(coeffs, row.rhs);
            break;
        case RowSense::LessEqual:
            pushXRow(-coeffs, -row.rhs);
            break;
        case RowSense::Equal:
            pushXRow(coeffs, row.rhs);
            pushXRow(-coeffs, -row.rhs);
            break;
        }
    }
    for (int j = 0; j < n; ++j) {
        const double lb = data.xRows.lowerBounds(j);
        const double ub = data.xRows.upperBounds(j);
        if (lb != 0.0 && lb != -kInf) {
            pushXRow(VectorXd::Unit(n, j), lb);
        }
        if (ub != kInf) {
            pushXRow(-VectorXd::Unit(n, j), -ub);
        }
    }
    const int numXRows = static_cast<int>(xGeRows.size());
    for (int i = 0; i < yLp.numRows(); ++i) {
        LpRow row;
        row.sense = RowSense::Equal;
        row.rhs = yLp.rhs(i);
        for (int j = 0; j < m; ++j) {
            if (yLp.constraints(i, j) != 0.0) {
                row.coeffs.emplace_back(j, yLp.constraints(i, j));
            }
        }
        lp.addRow(std::move(row));
    }

    const GeneralOutcome out = solveGeneral(lp);
    if (out.status == LpStatus::Unbounded) {
        throw UnboundedObjectiveError("Lagrangian substituted LP unbounded");
    }
    if (out.status == LpStatus::Infeasible) {
        throw InfeasibleSetError("Lagrangian substituted LP infeasible");
    }

    LagrangianDual result;
    result.alphaHat = rho;
    result.yStar = out.primal;
    double dualValue = 0;
    for (int i = 0; i < numXRows; ++i) {
        const double gamma = std::max(out.rowDuals(i), 0.0);
        result.alphaHat -= gamma * xGeRows[i].coeffs;
        dualValue += gamma * xGeRows[i].rhs;
    }
    for (int i = 0; i < yLp.numRows(); ++i) {
        dualValue += out.rowDuals(numXRows + i) * yLp.rhs(i);
    }
    result.dualValue = dualValue;
    return result;
}

Cut lagrangianCut(const ProblemData &data, const VectorXd &alphaHat,
                  double rho0) {
    const VectorXd gamma = data.Q.transpose() * alphaHat + rho0 * data.d;
    const double beta = support(data.yLp, gamma);
    if (!std::isfinite(beta)) {
        throw UnboundedSupportError("sigma_Y(Q'alpha + rho0 d) not finite");
    }
    Cut cut;
    cut.alpha = alphaHat;
    cut.alpha0 = rho0;
    cut.beta = beta;
    cut.kind = CutKind::LagrangianCut;
    cut.clampAlpha0();
    return cut;
}

namespace {

VectorXd normalizedDirection(const Cut &cut) {
    VectorXd v(cut.alpha.size() + 2);
    v.head(cut.alpha.size()) = cut.alpha;
    v(cut.alpha.size()) = cut.alpha0;
    v(cut.alpha.size() + 1) = cut.beta;
    const double norm = v.norm();
    return norm > 0 ? VectorXd(v / norm) : v;
}

} // namespace

std::vector<Cut> separateCornerBendersCuts(MasterState &master,
                                           const ProblemData &data,
                                           const InteriorPoint &interior,
                                           const VectorXd &seedAlpha,
                                           double seedAlpha0,
                                           const SeparateCornerOptions &opt) {
    const VectorXd gamma =
        data.Q.transpose() * seedAlpha + seedAlpha0 * data.d;
    const Corner corner = optimalCorner(data, gamma);
    const EpigraphCone cone = epigraphCone(corner, data);
    const ViolatedRaySource source = genericRayScan(cone);

    std::vector<Cut> omega;
    std::vector<VectorXd> seenDirections;
    std::vector<int> warm;
    const auto startTime = std::chrono::steady_clock::now();

    for (int iteration = 0; iteration < opt.maxIterations; ++iteration) {
        const MasterSolution sol = solveMaster(master);
        const EpiPoint candidate{data.h - data.T * sol.x, sol.theta};
        PolarResult res =
            solveReversePolar(candidate, interior, cone, warm, source);
        warm = res.warmRays;
        if (res.polarCase == PolarCase::Member) {
            return omega;
        }

        const VectorXd dir = normalizedDirection(res.cut);
        for (const VectorXd &seen : seenDirections) {
            if (seen.dot(dir) > 1.0 - opt.dedupTol) {
                throw CutRepetitionError(
                    "reverse polar returned a repeated cut");
            }
        }
        seenDirections.push_back(dir);

        addCutToMaster(master, data, res.cut);
        omega.push_back(res.cut);
        if (res.polarCase == PolarCase::ImplicitEquality) {
            Cut reversed = res.cut;
            reversed.alpha = -res.cut.alpha;
            reversed.alpha0 = -res.cut.alpha0;
            reversed.beta = -res.cut.beta;
            addCutToMaster(master, data, reversed);
            omega.push_back(reversed);
        }

        IterationLogEntry entry;
        entry.iteration = iteration;
        entry.timeSec = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - startTime)
                            .count();
        entry.bound = sol.bound;
        entry.cutType = res.polarCase == PolarCase::ImplicitEquality
                            ? "implicit-equality"
                            : "corner-facet";
        entry.cutsTotal = static_cast<int>(master.cuts.size());
        master.log.push_back(entry);
    }
    throw NumericalFailureError("corner separation loop did not converge");
}

} // namespace cornercuts
