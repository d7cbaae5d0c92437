#include "cornercuts/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cornercuts {

namespace {

bool allFinite(const VectorXd &v) { return v.allFinite(); }

} // namespace

void StandardLp::validate() const {
    const int p = numRows();
    const int m = numCols();
    if (rhs.size() != p) {
        throw DimensionMismatchError("rhs length != row count");
    }
    if (objective.size() != m) {
        throw DimensionMismatchError("objective length != column count");
    }
    if (!isFree.empty() && static_cast<int>(isFree.size()) != m) {
        throw DimensionMismatchError("isFree length != column count");
    }
    if (!constraints.allFinite() || !allFinite(rhs) || !allFinite(objective)) {
        throw DimensionMismatchError("non-finite entries in LP data");
    }
}

bool DenseLuFactorization::factorize(const MatrixXd &basisMatrix,
                                     double zeroPivotTol) {
    lu_.compute(basisMatrix);
    const double scale = std::max(1.0, basisMatrix.cwiseAbs().maxCoeff());
    const auto diag = lu_.matrixLU().diagonal();
    for (int i = 0; i < diag.size(); ++i) {
        if (std::abs(diag(i)) <= zeroPivotTol * scale) {
            return false;
        }
    }
    return true;
}

VectorXd DenseLuFactorization::solve(VectorXd rhs) const {
    return lu_.solve(rhs);
}

VectorXd DenseLuFactorization::solveTranspose(VectorXd rhs) const {
    return lu_.transpose().solve(rhs);
}

namespace {

struct Eta {
    int pos;
    VectorXd col;
};

// Working state of one solve: original columns 0..m-1, artificials m..m+p-1.
class Worker {
  public:
    Worker(const StandardLp &lp, const SimplexOptions &opt)
        : lp_(lp), opt_(opt), p_(lp.numRows()), m_(lp.numCols()) {
        work_.resize(p_, m_ + p_);
        work_.leftCols(m_) = lp.constraints;
        work_.rightCols(p_).setZero();
        artificialSign_.resize(p_);
        for (int i = 0; i < p_; ++i) {
            artificialSign_[i] = lp.rhs(i) >= 0 ? 1.0 : -1.0;
            work_(i, m_ + i) = artificialSign_[i];
        }
        basic_.assign(p_, -1);
        positionOf_.assign(m_ + p_, -1);
        xB_ = VectorXd::Zero(p_);
        factorization_ = std::make_unique<DenseLuFactorization>();
    }

    SimplexOutcome run(const std::optional<Basis> &start);

  private:
    bool isArtificial(int col) const { return col >= m_; }
    bool isFreeCol(int col) const { return col < m_ && lp_.freeCol(col); }

    void installBasis(const std::vector<int> &cols) {
        basic_ = cols;
        std::fill(positionOf_.begin(), positionOf_.end(), -1);
        for (int i = 0; i < p_; ++i) {
            positionOf_[basic_[i]] = i;
        }
    }

    bool refactorize() {
        MatrixXd basisMatrix(p_, p_);
        for (int i = 0; i < p_; ++i) {
            basisMatrix.col(i) = work_.col(basic_[i]);
        }
        if (!factorization_->factorize(basisMatrix, opt_.zeroPivotTol)) {
            return false;
        }
        etas_.clear();
        xB_ = ftran(lp_.rhs);
        return true;
    }

    VectorXd ftran(VectorXd v) const {
        v = factorization_->solve(std::move(v));
        for (const Eta &e : etas_) {
            const double z = v(e.pos) / e.col(e.pos);
            v -= z * e.col;
            v(e.pos) = z;
        }
        return v;
    }

    VectorXd btran(VectorXd v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = v(it->pos);
            for (int i = 0; i < p_; ++i) {
                if (i != it->pos) {
                    acc -= it->col(i) * v(i);
                }
            }
            v(it->pos) = acc / it->col(it->pos);
        }
        return factorization_->solveTranspose(std::move(v));
    }

    VectorXd basicCosts(const VectorXd &costs) const {
        VectorXd cB(p_);
        for (int i = 0; i < p_; ++i) {
            cB(i) = costs(basic_[i]);
        }
        return cB;
    }

    // Most attractive entering column, or nullopt at optimality.
    struct Entering {
        int col;
        double sigma;  // +1 increase, -1 decrease (free columns only)
    };
    std::optional<Entering> price(const VectorXd &costs, bool bland) const {
        const VectorXd pi = btran(basicCosts(costs));
        std::optional<Entering> best;
        double bestScore = -opt_.optimalityTol;
        for (int j = 0; j < m_; ++j) {  // artificials never re-enter
            if (positionOf_[j] >= 0) {
                continue;
            }
            const double rc = costs(j) - pi.dot(work_.col(j));
            double score;
            double sigma;
            if (isFreeCol(j)) {
                score = -std::abs(rc);
                sigma = rc < 0 ? 1.0 : -1.0;
            } else {
                score = rc;
                sigma = 1.0;
            }
            if (score >= -opt_.optimalityTol) {
                continue;
            }
            if (bland) {
                return Entering{j, sigma};
            }
            if (score < bestScore) {
                bestScore = score;
                best = Entering{j, sigma};
            }
        }
        return best;
    }

    // Leaving position for entering direction sigma*d0, or nullopt when the
    // step is unblocked (unbounded in phase 2).
    std::optional<std::pair<int, double>> ratioTest(const VectorXd &d0,
                                                    double sigma,
                                                    bool bland) const {
        const double pivotTol = 1e-9;
        int bestPos = -1;
        double bestT = kInf;
        double bestPivot = 0;
        for (int i = 0; i < p_; ++i) {
            if (isFreeCol(basic_[i])) {
                continue;  // free basics never block
            }
            const double dir = sigma * d0(i);
            if (dir <= pivotTol) {
                continue;
            }
            const double t = std::max(xB_(i), 0.0) / dir;
            if (t < bestT - 1e-12) {
                bestT = t;
                bestPos = i;
                bestPivot = std::abs(d0(i));
            } else if (t <= bestT + 1e-12 && bestPos >= 0) {
                if (bland) {
                    if (basic_[i] < basic_[bestPos]) {
                        bestPos = i;
                        bestPivot = std::abs(d0(i));
                    }
                } else if (std::abs(d0(i)) > bestPivot) {
                    bestPos = i;
                    bestPivot = std::abs(d0(i));
                }
            }
        }
        if (bestPos < 0) {
            return std::nullopt;
        }
        return std::make_pair(bestPos, bestT);
    }

    void applyPivot(int enteringCol, double sigma, int pos, double t,
                    const VectorXd &d0) {
        xB_ -= (sigma * t) * d0;
        xB_(pos) = sigma * t;
        positionOf_[basic_[pos]] = -1;
        basic_[pos] = enteringCol;
        positionOf_[enteringCol] = pos;
        etas_.push_back(Eta{pos, d0});
        ++pivotCount_;
        if (static_cast<int>(etas_.size()) >= opt_.refactorInterval) {
            if (!refactorize()) {
                throw NumericalFailureError("basis refactorization failed");
            }
        }
    }

    // Runs pivots until optimality (true) or unboundedness (false).
    bool iterate(const VectorXd &costs) {
        int degenerateStreak = 0;
        bool bland = false;
        const int blandThreshold = 2 * (m_ + p_);
        while (true) {
            if (pivotCount_ > opt_.maxPivots) {
                throw NumericalFailureError("pivot limit exceeded");
            }
            const auto entering = price(costs, bland);
            if (!entering) {
                return true;
            }
            const VectorXd d0 = ftran(work_.col(entering->col));
            const auto leaving = ratioTest(d0, entering->sigma, bland);
            if (!leaving) {
                unboundedCol_ = entering->col;
                unboundedSigma_ = entering->sigma;
                unboundedDir_ = d0;
                return false;
            }
            const auto [pos, t] = *leaving;
            applyPivot(entering->col, entering->sigma, pos, t, d0);
            if (t <= 1e-9) {
                if (++degenerateStreak > blandThreshold) {
                    bland = true;
                }
            } else {
                degenerateStreak = 0;
                bland = false;
            }
        }
    }

    // Pivots remaining basic artificials onto original columns where the row
    // is not redundant; redundant rows keep their zero artificial (recorded).
    void driveOutArtificials() {
        for (int i = 0; i < p_; ++i) {
            if (!isArtificial(basic_[i])) {
                continue;
            }
            VectorXd rowVec = btran(VectorXd::Unit(p_, i));
            int enter = -1;
            for (int j = 0; j < m_; ++j) {
                if (positionOf_[j] >= 0) {
                    continue;
                }
                if (std::abs(rowVec.dot(work_.col(j))) > 1e-9) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) {
                continue;  // redundant row
            }
            const VectorXd d0 = ftran(work_.col(enter));
            applyPivot(enter, 1.0, i, 0.0, d0);
        }
    }

    SimplexOutcome assembleOptimal(const VectorXd &costs) {
        if (!refactorize()) {
            throw NumericalFailureError("final refactorization failed");
        }
        SimplexOutcome out;
        out.status = LpStatus::Optimal;
        out.primal = VectorXd::Zero(m_);
        for (int i = 0; i < p_; ++i) {
            if (!isArtificial(basic_[i])) {
                out.primal(basic_[i]) = xB_(i);
            } else {
                out.redundantRows.push_back(basic_[i] - m_);
            }
        }
        out.objectiveValue = lp_.objective.dot(out.primal);
        out.duals = btran(basicCosts(costs));
        out.reducedCosts =
            lp_.objective - lp_.constraints.transpose() * out.duals;
        for (int i = 0; i < p_; ++i) {
            if (!isArtificial(basic_[i])) {
                out.basis.cols.push_back(basic_[i]);
            }
        }
        std::sort(out.redundantRows.begin(), out.redundantRows.end());
        out.pivotCount = pivotCount_;
        return out;
    }

    const StandardLp &lp_;
    const SimplexOptions &opt_;
    int p_;
    int m_;
    MatrixXd work_;
    std::vector<double> artificialSign_;
    std::vector<int> basic_;
    std::vector<int> positionOf_;
    VectorXd xB_;
    std::vector<Eta> etas_;
    std::unique_ptr<BasisFactorization> factorization_;
    int pivotCount_ = 0;
    int unboundedCol_ = -1;
    double unboundedSigma_ = 1.0;
    VectorXd unboundedDir_;
};

SimplexOutcome Worker::run(const std::optional<Basis> &start) {
    bool feasible = false;

    if (start && static_cast<int>(start->cols.size()) == p_) {
        bool valid = true;
        std::vector<bool> seen(m_, false);
        for (int c : start->cols) {
            if (c < 0 || c >= m_ || seen[c]) {
                valid = false;
                break;
            }
            seen[c] = true;
        }
        if (valid) {
            installBasis(start->cols);
            if (refactorize()) {
                feasible = true;
                for (int i = 0; i < p_; ++i) {
                    if (!isFreeCol(basic_[i]) &&
                        xB_(i) < -opt_.feasibilityTol) {
                        feasible = false;
                        break;
                    }
                }
            }
        }
    }

    if (!feasible) {
        // Phase 1 from the all-artificial basis.
        std::vector<int> artificialBasis(p_);
        for (int i = 0; i < p_; ++i) {
            artificialBasis[i] = m_ + i;
        }
        installBasis(artificialBasis);
        if (!refactorize()) {
            throw NumericalFailureError("artificial basis factorization");
        }
        VectorXd phase1Costs = VectorXd::Zero(m_ + p_);
        phase1Costs.tail(p_).setOnes();
        if (!iterate(phase1Costs)) {
            throw NumericalFailureError("phase 1 unbounded");
        }
        double infeasibility = 0;
        for (int i = 0; i < p_; ++i) {
            if (isArtificial(basic_[i])) {
                infeasibility += std::max(xB_(i), 0.0);
            }
        }
        if (infeasibility > opt_.feasibilityTol *
                                (1.0 + lp_.rhs.cwiseAbs().sum())) {
            SimplexOutcome out;
            out.status = LpStatus::Infeasible;
            out.farkas = -btran(basicCosts(phase1Costs));
            out.pivotCount = pivotCount_;
            return out;
        }
        driveOutArtificials();
    }

    VectorXd phase2Costs = VectorXd::Zero(m_ + p_);
    phase2Costs.head(m_) = lp_.objective;
    if (!iterate(phase2Costs)) {
        SimplexOutcome out;
        out.status = LpStatus::Unbounded;
        out.ray = VectorXd::Zero(m_);
        out.ray(unboundedCol_) = unboundedSigma_;
        for (int i = 0; i < p_; ++i) {
            if (!isArtificial(basic_[i])) {
                out.ray(basic_[i]) = -unboundedSigma_ * unboundedDir_(i);
            }
        }
        out.pivotCount = pivotCount_;
        return out;
    }
    return assembleOptimal(phase2Costs);
}

} // namespace

SimplexOutcome SimplexSolver::solve(const StandardLp &lp,
                                    const std::optional<Basis> &start) {
    lp.validate();
    const int p = lp.numRows();
    const int m = lp.numCols();

    if (p == 0) {
        // Only sign constraints remain.
        SimplexOutcome out;
        for (int j = 0; j < m; ++j) {
            const double c = lp.objective(j);
            const bool freeVar = lp.freeCol(j);
            if ((freeVar && std::abs(c) > options_.optimalityTol) ||
                (!freeVar && c < -options_.optimalityTol)) {
                out.status = LpStatus::Unbounded;
                out.ray = VectorXd::Zero(m);
                out.ray(j) = (freeVar && c > 0) ? -1.0 : 1.0;
                return out;
            }
        }
        out.status = LpStatus::Optimal;
        out.primal = VectorXd::Zero(m);
        out.objectiveValue = 0;
        out.duals = VectorXd::Zero(0);
        out.reducedCosts = lp.objective;
        return out;
    }

    Worker worker(lp, options_);
    return worker.run(start);
}

// ---------------------------------------------------------------------------

GeneralLp GeneralLp::withVars(int n) {
    GeneralLp g;
    g.numVars = n;
    g.objective = VectorXd::Zero(n);
    g.lowerBounds = VectorXd::Zero(n);
    g.upperBounds = VectorXd::Constant(n, kInf);
    return g;
}

void GeneralLp::validate() const {
    if (numVars <= 0) {
        throw EmptyProblemError("LP has no variables");
    }
    if (objective.size() != numVars || lowerBounds.size() != numVars ||
        upperBounds.size() != numVars) {
        throw DimensionMismatchError("vector lengths != numVars");
    }
    for (const LpRow &row : rows) {
        if (!std::isfinite(row.rhs)) {
            throw DimensionMismatchError("non-finite row rhs");
        }
        for (const auto &[col, value] : row.coeffs) {
            if (col < 0 || col >= numVars) {
                throw DimensionMismatchError("row references unknown column");
            }
            if (!std::isfinite(value)) {
                throw DimensionMismatchError("non-finite row coefficient");
            }
        }
    }
    for (int j = 0; j < numVars; ++j) {
        if (lowerBounds(j) > upperBounds(j)) {
            throw DimensionMismatchError("crossing bounds");
        }
        if (lowerBounds(j) == kInf || upperBounds(j) == -kInf) {
            throw DimensionMismatchError("infinite fixed bound");
        }
    }
}

StandardizedLp standardize(const GeneralLp &general) {
    general.validate();

    StandardizedLp result;
    RecoveryMap &map = result.map;
    map.columns.resize(general.numVars);
    map.objectiveConstant = general.objectiveConstant;

    // Column transforms.
    int numStdCols = 0;
    std::vector<bool> stdFree;
    struct BoundRow {
        int stdCol;
        double range;
    };
    std::vector<BoundRow> boundRows;
    for (int j = 0; j < general.numVars; ++j) {
        const double lb = general.lowerBounds(j);
        const double ub = general.upperBounds(j);
        RecoveryMap::ColumnMap &cm = map.columns[j];
        if (lb == -kInf && ub == kInf) {
            cm.posCol = numStdCols++;
            cm.negCol = numStdCols++;
            stdFree.push_back(false);
            stdFree.push_back(false);
        } else if (lb == -kInf) {
            // x = ub - xhat, xhat >= 0
            cm.posCol = numStdCols++;
            cm.shift = ub;
            cm.scale = -1;
            stdFree.push_back(false);
        } else {
            // x = lb + xhat, 0 <= xhat (<= ub - lb)
            cm.posCol = numStdCols++;
            cm.shift = lb;
            stdFree.push_back(false);
            if (ub < kInf && ub > lb) {
                boundRows.push_back(BoundRow{cm.posCol, ub - lb});
            } else if (ub == lb) {
                boundRows.push_back(BoundRow{cm.posCol, 0.0});
            }
        }
        map.objectiveConstant += general.objective(j) * cm.shift;
    }

    const int numOriginalRows = static_cast<int>(general.rows.size());
    const int numStdRows = numOriginalRows + static_cast<int>(boundRows.size());
    const int numSlacks = numStdRows;
    const int totalCols = numStdCols + numSlacks;

    StandardLp &lp = result.lp;
    lp.constraints = MatrixXd::Zero(numStdRows, totalCols);
    lp.rhs = VectorXd::Zero(numStdRows);
    lp.objective = VectorXd::Zero(totalCols);
    lp.isFree.assign(totalCols, false);

    for (int j = 0; j < general.numVars; ++j) {
        const RecoveryMap::ColumnMap &cm = map.columns[j];
        lp.objective(cm.posCol) = general.objective(j) * cm.scale;
        if (cm.negCol >= 0) {
            lp.objective(cm.negCol) = -general.objective(j);
        }
    }

    map.rowOfOriginal.resize(numOriginalRows);
    for (int r = 0; r < numOriginalRows; ++r) {
        const LpRow &row = general.rows[r];
        map.rowOfOriginal[r] = r;
        double rhs = row.rhs;
        for (const auto &[col, value] : row.coeffs) {
            const RecoveryMap::ColumnMap &cm = map.columns[col];
            lp.constraints(r, cm.posCol) += value * cm.scale;
            if (cm.negCol >= 0) {
                lp.constraints(r, cm.negCol) -= value;
            }
            rhs -= value * cm.shift;
        }
        lp.rhs(r) = rhs;
        const int slack = numStdCols + r;
        switch (row.sense) {
        case RowSense::LessEqual:
            lp.constraints(r, slack) = 1.0;
            break;
        case RowSense::GreaterEqual:
            lp.constraints(r, slack) = -1.0;
            break;
        case RowSense::Equal:
            // Dead slack column pinned at zero keeps the layout uniform.
            lp.constraints(r, slack) = 0.0;
            lp.objective(slack) = 1.0;
            break;
        }
    }
    for (size_t i = 0; i < boundRows.size(); ++i) {
        const int r = numOriginalRows + static_cast<int>(i);
        lp.constraints(r, boundRows[i].stdCol) = 1.0;
        lp.constraints(r, numStdCols + r) = 1.0;  // slack for <=
        lp.rhs(r) = boundRows[i].range;
    }

    map.numStandardRows = numStdRows;
    return result;
}

VectorXd RecoveryMap::recoverPrimal(const VectorXd &standardPrimal) const {
    VectorXd x(columns.size());
    for (size_t j = 0; j < columns.size(); ++j) {
        const ColumnMap &cm = columns[j];
        double v = cm.shift + cm.scale * standardPrimal(cm.posCol);
        if (cm.negCol >= 0) {
            v -= standardPrimal(cm.negCol);
        }
        x(static_cast<int>(j)) = v;
    }
    return x;
}

VectorXd RecoveryMap::recoverRay(const VectorXd &standardRay) const {
    VectorXd x(columns.size());
    for (size_t j = 0; j < columns.size(); ++j) {
        const ColumnMap &cm = columns[j];
        double v = cm.scale * standardRay(cm.posCol);
        if (cm.negCol >= 0) {
            v -= standardRay(cm.negCol);
        }
        x(static_cast<int>(j)) = v;
    }
    return x;
}

VectorXd RecoveryMap::recoverRowDuals(const VectorXd &standardDuals) const {
    VectorXd duals(rowOfOriginal.size());
    for (size_t r = 0; r < rowOfOriginal.size(); ++r) {
        duals(static_cast<int>(r)) = standardDuals(rowOfOriginal[r]);
    }
    return duals;
}

GeneralOutcome solveGeneral(const GeneralLp &general,
                            const std::optional<Basis> &start,
                            const SimplexOptions &options) {
    StandardizedLp std_ = standardize(general);
    SimplexSolver solver(options);
    GeneralOutcome out;
    out.standard = solver.solve(std_.lp, start);
    out.status = out.standard.status;
    if (out.status == LpStatus::Optimal) {
        out.primal = std_.map.recoverPrimal(out.standard.primal);
        out.objectiveValue =
            out.standard.objectiveValue + std_.map.objectiveConstant;
        out.rowDuals = std_.map.recoverRowDuals(out.standard.duals);
    } else if (out.status == LpStatus::Unbounded) {
        out.ray = std_.map.recoverRay(out.standard.ray);
    }
    return out;
}

} // namespace cornercuts
