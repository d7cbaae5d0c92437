#include "cornercuts/corner.hpp"

#include <cmath>

namespace cornercuts {

void ProblemData::validate(bool checkNonempty) const {
    if (T.rows() != p() || T.cols() != n() || Q.rows() != p() ||
        Q.cols() != m()) {
        throw DimensionMismatchError("T/Q dimensions inconsistent with c,d,h");
    }
    if (xRows.numVars != n()) {
        throw DimensionMismatchError("X rows defined over wrong dimension");
    }
    if (yLp.numCols() != m()) {
        throw DimensionMismatchError("Y columns != length of d");
    }
    if (!yLp.isFree.empty()) {
        for (bool f : yLp.isFree) {
            if (f) {
                throw StructureUnsupportedError(
                    "Y must be in standard form with nonnegative columns");
            }
        }
    }
    if (checkNonempty) {
        if (support(xRows, VectorXd::Zero(n())) == kInf) {
            throw InfeasibleSetError("X is empty");
        }
        if (support(yLp, VectorXd::Zero(m())) == kInf) {
            throw InfeasibleSetError("Y is empty");
        }
    }
}

double support(const GeneralLp &polyhedron, const VectorXd &gamma) {
    GeneralLp lp = polyhedron;
    lp.objective = gamma;
    lp.objectiveConstant = 0;
    const GeneralOutcome out = solveGeneral(lp);
    switch (out.status) {
    case LpStatus::Optimal:
        return out.objectiveValue;
    case LpStatus::Infeasible:
        return kInf;
    case LpStatus::Unbounded:
        return -kInf;
    }
    return kInf;
}

double support(const StandardLp &polyhedron, const VectorXd &gamma) {
    StandardLp lp = polyhedron;
    lp.objective = gamma;
    SimplexSolver solver;
    const SimplexOutcome out = solver.solve(lp);
    switch (out.status) {
    case LpStatus::Optimal:
        return out.objectiveValue;
    case LpStatus::Infeasible:
        return kInf;
    case LpStatus::Unbounded:
        return -kInf;
    }
    return kInf;
}

Corner cornerFromBasis(const StandardLp &lp, const Basis &basis) {
    lp.validate();
    const int p = lp.numRows();
    const int m = lp.numCols();
    if (static_cast<int>(basis.cols.size()) != p) {
        throw InfeasibleBasisError("basis size != row count");
    }

    MatrixXd basisMatrix(p, p);
    for (int i = 0; i < p; ++i) {
        const int col = basis.cols[i];
        if (col < 0 || col >= m) {
            throw InfeasibleBasisError("basis column out of range");
        }
        basisMatrix.col(i) = lp.constraints.col(col);
    }
    Eigen::PartialPivLU<MatrixXd> lu(basisMatrix);
    const double scale = std::max(1.0, basisMatrix.cwiseAbs().maxCoeff());
    for (int i = 0; i < p; ++i) {
        if (std::abs(lu.matrixLU()(i, i)) <= 1e-10 * scale) {
            throw InfeasibleBasisError("singular basis matrix");
        }
    }

    const VectorXd xB = lu.solve(lp.rhs);
    for (int i = 0; i < p; ++i) {
        if (xB(i) < -1e-7) {
            throw InfeasibleBasisError("basic solution violates y >= 0");
        }
    }

    Corner corner;
    corner.basis = basis;
    corner.apex = VectorXd::Zero(m);
    std::vector<bool> inBasis(m, false);
    for (int i = 0; i < p; ++i) {
        corner.apex(basis.cols[i]) = xB(i);
        inBasis[basis.cols[i]] = true;
    }

    for (int j = 0; j < m; ++j) {
        if (inBasis[j]) {
            continue;
        }
        const VectorXd abar = lu.solve(lp.constraints.col(j));
        SparseVec ray;
        ray.dim = m;
        for (int i = 0; i < p; ++i) {
            if (std::abs(abar(i)) > 1e-11) {
                ray.nz.emplace_back(basis.cols[i], -abar(i));
            }
        }
        ray.nz.emplace_back(j, 1.0);
        corner.rays.push_back(std::move(ray));
    }
    return corner;
}

Corner optimalCorner(const ProblemData &data, const VectorXd &gamma) {
    StandardLp lp = data.yLp;
    lp.objective = gamma;
    SimplexSolver solver;
    const SimplexOutcome out = solver.solve(lp);
    if (out.status == LpStatus::Unbounded) {
        throw UnboundedObjectiveError("sigma_Y(gamma) = -inf");
    }
    if (out.status == LpStatus::Infeasible) {
        throw InfeasibleSetError("Y is empty");
    }
    if (!out.redundantRows.empty()) {
        throw StructureUnsupportedError(
            "Y has redundant rows; remove them before building corners");
    }
    Corner corner = cornerFromBasis(data.yLp, out.basis);
    for (const SparseVec &ray : corner.rays) {
        double step = 0;
        for (const auto &[idx, value] : ray.nz) {
            step += gamma(idx) * value;
        }
        if (step < -1e-9) {
            throw NumericalFailureError(
                "optimal corner has a gamma-decreasing ray");
        }
    }
    return corner;
}

double valueEval(const ProblemData &data, const VectorXd &w) {
    if (w.size() != data.p()) {
        throw DimensionMismatchError("w has wrong length");
    }
    const StandardLp &y = data.yLp;
    StandardLp lp;
    const int p0 = y.numRows();
    lp.constraints.resize(p0 + data.p(), y.numCols());
    lp.constraints.topRows(p0) = y.constraints;
    lp.constraints.bottomRows(data.p()) = data.Q;
    lp.rhs.resize(p0 + data.p());
    lp.rhs.head(p0) = y.rhs;
    lp.rhs.tail(data.p()) = w;
    lp.objective = data.d;
    lp.isFree = y.isFree;

    SimplexSolver solver;
    const SimplexOutcome out = solver.solve(lp);
    switch (out.status) {
    case LpStatus::Optimal:
        return out.objectiveValue;
    case LpStatus::Infeasible:
        return kInf;
    case LpStatus::Unbounded:
        return -kInf;
    }
    return kInf;
}

double valueEvalCorner(const ProblemData &data, const Corner &corner,
                       const VectorXd &w) {
    if (w.size() != data.p()) {
        throw DimensionMismatchError("w has wrong length");
    }
    // min d'(apex + R mu) s.t. Q(apex + R mu) = w, mu >= 0.
    const int numRays = static_cast<int>(corner.rays.size());
    const VectorXd apexW = data.Q * corner.apex;
    const double apexTheta = data.d.dot(corner.apex);
    if (numRays == 0) {
        return (w - apexW).lpNorm<Eigen::Infinity>() <= 1e-7 ? apexTheta
                                                             : kInf;
    }
    StandardLp lp;
    lp.constraints.resize(data.p(), numRays);
    lp.objective.resize(numRays);
    for (int r = 0; r < numRays; ++r) {
        lp.constraints.col(r) = data.Q * corner.rays[r].dense();
        lp.objective(r) = corner.rays[r].dot(data.d);
    }
    lp.rhs = w - apexW;

    SimplexSolver solver;
    const SimplexOutcome out = solver.solve(lp);
    switch (out.status) {
    case LpStatus::Optimal:
        return apexTheta + out.objectiveValue;
    case LpStatus::Infeasible:
        return kInf;
    case LpStatus::Unbounded:
        return -kInf;
    }
    return kInf;
}

EpigraphCone epigraphCone(const Corner &corner, const ProblemData &data) {
    EpigraphCone cone;
    cone.apexW = data.Q * corner.apex;
    cone.apexTheta = data.d.dot(corner.apex);
    cone.rayW.reserve(corner.rays.size() + 1);
    cone.rayTheta.reserve(corner.rays.size() + 1);
    for (const SparseVec &ray : corner.rays) {
        VectorXd qr = VectorXd::Zero(data.p());
        for (const auto &[idx, value] : ray.nz) {
            qr += value * data.Q.col(idx);
        }
        cone.rayW.push_back(std::move(qr));
        cone.rayTheta.push_back(ray.dot(data.d));
    }
    cone.verticalIndex = static_cast<int>(cone.rayW.size());
    cone.rayW.push_back(VectorXd::Zero(data.p()));
    cone.rayTheta.push_back(1.0);
    return cone;
}

} // namespace cornercuts
