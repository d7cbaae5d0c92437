#ifndef CORNERCUTS_SIMPLEX_HPP
#define CORNERCUTS_SIMPLEX_HPP

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cornercuts/errors.hpp"

namespace cornercuts {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// LP in standard equality form: min gamma'y s.t. A y = b, with y_j >= 0
// unless the variable is marked free (lower bound -inf).
struct StandardLp {
    MatrixXd constraints;      // A, numRows x numCols
    VectorXd rhs;              // b
    VectorXd objective;        // gamma
    std::vector<bool> isFree;  // per column; empty means all nonnegative

    int numRows() const { return static_cast<int>(constraints.rows()); }
    int numCols() const { return static_cast<int>(constraints.cols()); }
    bool freeCol(int j) const { return !isFree.empty() && isFree[j]; }
    void validate() const;
};

// Ordered set of basic column indices, |B| = rank(A).
struct Basis {
    std::vector<int> cols;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct SimplexOutcome {
    LpStatus status = LpStatus::Optimal;
    VectorXd primal;            // y*, valid when Optimal
    double objectiveValue = 0;  // gamma'y*, valid when Optimal
    Basis basis;                // optimal basis (original columns only)
    VectorXd duals;             // row duals, valid when Optimal
    VectorXd reducedCosts;      // per column, valid when Optimal
    VectorXd ray;               // improving ray, valid when Unbounded
    VectorXd farkas;            // certificate pi with pi'A >= 0, pi'b < 0
    std::vector<int> redundantRows;
    int pivotCount = 0;
};

struct SimplexOptions {
    double feasibilityTol = 1e-7;
    double optimalityTol = 1e-9;
    double zeroPivotTol = 1e-10;
    int refactorInterval = 50;  // pivots between basis refactorizations
    long maxPivots = 2000000;
};

// Factorization of the current basis matrix, kept behind an interface so the
// dense kernel can be swapped for a sparse one.
class BasisFactorization {
  public:
    virtual ~BasisFactorization() = default;
    virtual bool factorize(const MatrixXd &basisMatrix, double zeroPivotTol) = 0;
    virtual VectorXd solve(VectorXd rhs) const = 0;           // B x = rhs
    virtual VectorXd solveTranspose(VectorXd rhs) const = 0;  // B'x = rhs
};

class DenseLuFactorization final : public BasisFactorization {
  public:
    bool factorize(const MatrixXd &basisMatrix, double zeroPivotTol) override;
    VectorXd solve(VectorXd rhs) const override;
    VectorXd solveTranspose(VectorXd rhs) const override;

  private:
    Eigen::PartialPivLU<MatrixXd> lu_;
};

// Revised two-phase primal simplex with Dantzig pricing and Bland fallback.
// Instances hold mutable factorization state; one solve at a time per
// instance, distinct instances may run concurrently.
class SimplexSolver {
  public:
    explicit SimplexSolver(SimplexOptions options = {}) : options_(options) {}

    SimplexOutcome solve(const StandardLp &lp,
                         const std::optional<Basis> &start = std::nullopt);

    const SimplexOptions &options() const { return options_; }

  private:
    SimplexOptions options_;
};

// ---------------------------------------------------------------------------
// Row form used to assemble models before conversion to standard form.

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LpRow {
    std::vector<std::pair<int, double>> coeffs;  // (column, value)
    RowSense sense = RowSense::Equal;
    double rhs = 0;
};

struct GeneralLp {
    int numVars = 0;
    std::vector<LpRow> rows;
    VectorXd objective;      // length numVars
    VectorXd lowerBounds;    // -inf allowed
    VectorXd upperBounds;    // +inf allowed
    double objectiveConstant = 0;

    static GeneralLp withVars(int n);
    void addRow(LpRow row) { rows.push_back(std::move(row)); }
    void validate() const;
};

// Maps a standard-form solution back to the original variables and rows.
struct RecoveryMap {
    struct ColumnMap {
        int posCol = -1;   // standard column carrying +x (or the shifted var)
        int negCol = -1;   // second column of a free split, else -1
        double shift = 0;  // x = shift + x_pos - x_neg
        double scale = 1;  // -1 for mirrored (upper-bound-only) variables
    };
    std::vector<ColumnMap> columns;
    std::vector<int> rowOfOriginal;   // standard row index of each original row
    int numStandardRows = 0;
    double objectiveConstant = 0;

    VectorXd recoverPrimal(const VectorXd &standardPrimal) const;
    VectorXd recoverRay(const VectorXd &standardRay) const;
    // Duals of the original rows (>= rows yield nonnegative duals on min LPs).
    VectorXd recoverRowDuals(const VectorXd &standardDuals) const;
};

struct StandardizedLp {
    StandardLp lp;
    RecoveryMap map;
};

// Equality form via shifts, mirrors, free-variable splitting, and
// slack/surplus columns. Column layout is stable: transformed original
// columns first, then one slack per row (bound rows after original rows).
StandardizedLp standardize(const GeneralLp &general);

struct GeneralOutcome {
    LpStatus status = LpStatus::Optimal;
    VectorXd primal;
    double objectiveValue = 0;
    VectorXd rowDuals;
    VectorXd ray;
    SimplexOutcome standard;  // standard-form outcome (basis, etc.)
};

// Convenience wrapper: standardize, solve, recover.
GeneralOutcome solveGeneral(const GeneralLp &general,
                            const std::optional<Basis> &start = std::nullopt,
                            const SimplexOptions &options = {});

} // namespace cornercuts

#endif
