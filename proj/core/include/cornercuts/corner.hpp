#ifndef CORNERCUTS_CORNER_HPP
#define CORNERCUTS_CORNER_HPP

#include <vector>

#include "cornercuts/simplex.hpp"

namespace cornercuts {

struct SparseVec {
    std::vector<std::pair<int, double>> nz;
    int dim = 0;

    VectorXd dense() const {
        VectorXd v = VectorXd::Zero(dim);
        for (const auto &[i, x] : nz) {
            v(i) += x;
        }
        return v;
    }
    double dot(const VectorXd &other) const {
        double s = 0;
        for (const auto &[i, x] : nz) {
            s += x * other(i);
        }
        return s;
    }
};

// The coupled problem   min c'x + d'y  s.t.  Tx + Qy = h, x in X, y in Y,
// with Y kept in standard equality form.
struct ProblemData {
    VectorXd c;
    VectorXd d;
    MatrixXd T;  // p x n
    MatrixXd Q;  // p x m
    VectorXd h;
    GeneralLp xRows;  // X, over the n first-stage variables
    StandardLp yLp;   // Y, all columns nonnegative

    int n() const { return static_cast<int>(c.size()); }
    int m() const { return static_cast<int>(d.size()); }
    int p() const { return static_cast<int>(h.size()); }

    void validate(bool checkNonempty = true) const;
};

// Translated cone {apex} + cone(rays) containing Y, built from a basis.
struct Corner {
    VectorXd apex;
    std::vector<SparseVec> rays;
    Basis basis;
};

struct EpiPoint {
    VectorXd w;
    double theta = 0;
};

// Projection of a corner into (w, theta) space, vertical ray appended last.
struct EpigraphCone {
    VectorXd apexW;
    double apexTheta = 0;
    std::vector<VectorXd> rayW;      // Qr per corner ray, then (0,...,0)
    std::vector<double> rayTheta;    // d'r per corner ray, then 1
    int verticalIndex = -1;

    int numRays() const { return static_cast<int>(rayW.size()); }
    int numCornerRays() const { return verticalIndex; }
};

// sigma_P(gamma) = inf gamma'x over P; +inf iff empty, -inf iff unbounded.
double support(const GeneralLp &polyhedron, const VectorXd &gamma);
double support(const StandardLp &polyhedron, const VectorXd &gamma);

// Rays per Remark-style construction: one per nonbasic column j, with
// -(A_B^-1 A_j) on the basic block and 1 at j.
Corner cornerFromBasis(const StandardLp &lp, const Basis &basis);

// Optimal corner w.r.t. sigma_Y(gamma); requires the objective bounded on Y.
Corner optimalCorner(const ProblemData &data, const VectorXd &gamma);

// f over Y: inf { d'y : Qy = w, y in Y }.
double valueEval(const ProblemData &data, const VectorXd &w);
// f over a corner C of Y.
double valueEvalCorner(const ProblemData &data, const Corner &corner,
                       const VectorXd &w);

EpigraphCone epigraphCone(const Corner &corner, const ProblemData &data);

} // namespace cornercuts

#endif
