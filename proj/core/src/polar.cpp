#include "cornercuts/polar.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace cornercuts {

void Cut::clampAlpha0() {
    if (alpha0 < 0) {
        if (alpha0 < -1e-12) {
            throw NumericalFailureError("cut has negative alpha0");
        }
        alpha0 = 0;
    }
    if (alpha.lpNorm<Eigen::Infinity>() + alpha0 <= 1e-12) {
        throw NumericalFailureError("cut has all-zero coefficients");
    }
}

namespace {

InteriorPoint liftInterior(const ProblemData &data, VectorXd y,
                           bool degenerate) {
    InteriorPoint point;
    point.y = std::move(y);
    point.w = data.Q * point.y;
    point.epsilon = 1.0;
    point.theta = data.d.dot(point.y) + point.epsilon;
    point.degenerate = degenerate;
    return point;
}

} // namespace

InteriorPoint relativeInteriorPoint(const ProblemData &data) {
    const StandardLp &y = data.yLp;
    const int m = y.numCols();
    SimplexSolver solver;

    StandardLp probe = y;
    probe.objective = VectorXd::Zero(m);
    const SimplexOutcome feasible = solver.solve(probe);
    if (feasible.status == LpStatus::Infeasible) {
        throw InfeasibleSetError("Y is empty");
    }
    const VectorXd anchor = feasible.primal;

    std::vector<VectorXd> points;
    auto addPoint = [&points](const VectorXd &candidate) {
        for (const VectorXd &existing : points) {
            if ((existing - candidate).lpNorm<Eigen::Infinity>() <= 1e-9) {
                return;
            }
        }
        points.push_back(candidate);
    };

    for (int j = 0; j < m; ++j) {
        for (double sign : {1.0, -1.0}) {
            probe.objective.setZero();
            probe.objective(j) = sign;
            const SimplexOutcome out = solver.solve(probe);
            if (out.status == LpStatus::Optimal) {
                addPoint(out.primal);
            } else if (out.status == LpStatus::Unbounded) {
                // Step off the anchor along the improving ray.
                const double scale =
                    1.0 / std::max(1.0, out.ray.lpNorm<Eigen::Infinity>());
                addPoint(anchor + scale * out.ray);
            }
        }
    }
    if (points.empty()) {
        addPoint(anchor);
    }

    VectorXd average = VectorXd::Zero(m);
    for (const VectorXd &pt : points) {
        average += pt;
    }
    average /= static_cast<double>(points.size());
    return liftInterior(data, std::move(average), points.size() == 1);
}

InteriorPoint networkInteriorPoint(const Network &net,
                                   const ProblemData &data) {
    net.validate();
    if (net.source < 0 || net.sink < 0) {
        throw StructureUnsupportedError("network needs source and sink");
    }
    const int numArcs = net.numArcs();
    const double flowValue = static_cast<double>(net.supply[net.sink]);

    // Parent arcs of a forward BFS from s and a backward BFS from t.
    std::vector<int> fromSource(net.numNodes, -1);
    std::vector<int> toSink(net.numNodes, -1);
    std::vector<std::vector<int>> outArcs(net.numNodes), inArcs(net.numNodes);
    for (int a = 0; a < numArcs; ++a) {
        outArcs[net.arcs[a].tail].push_back(a);
        inArcs[net.arcs[a].head].push_back(a);
    }
    std::queue<int> bfs;
    std::vector<bool> seen(net.numNodes, false);
    bfs.push(net.source);
    seen[net.source] = true;
    while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        for (int a : outArcs[u]) {
            const int v = net.arcs[a].head;
            if (!seen[v]) {
                seen[v] = true;
                fromSource[v] = a;
                bfs.push(v);
            }
        }
    }
    std::vector<bool> coSeen(net.numNodes, false);
    bfs.push(net.sink);
    coSeen[net.sink] = true;
    while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        for (int a : inArcs[u]) {
            const int v = net.arcs[a].tail;
            if (!coSeen[v]) {
                coSeen[v] = true;
                toSink[v] = a;
                bfs.push(v);
            }
        }
    }
    for (int v = 0; v < net.numNodes; ++v) {
        if (!seen[v] || !coSeen[v]) {
            throw UnreachableNodeError(
                "arc interior point needs every node on an s-t path");
        }
    }

    // One unit path through each arc, superposed.
    VectorXd y = VectorXd::Zero(numArcs);
    for (int a = 0; a < numArcs; ++a) {
        y(a) += 1.0;
        for (int v = net.arcs[a].tail; v != net.source;
             v = net.arcs[fromSource[v]].tail) {
            y(fromSource[v]) += 1.0;
        }
        for (int v = net.arcs[a].head; v != net.sink;
             v = net.arcs[toSink[v]].head) {
            y(toSink[v]) += 1.0;
        }
    }
    y *= flowValue / static_cast<double>(numArcs);
    return liftInterior(data, std::move(y), false);
}

ViolatedRaySource genericRayScan(const EpigraphCone &cone) {
    return [&cone](const VectorXd &alpha,
                   double alpha0) -> std::vector<RayViolation> {
        std::vector<RayViolation> violations;
        for (int r = 0; r < cone.numCornerRays(); ++r) {
            const double slack =
                alpha.dot(cone.rayW[r]) + alpha0 * cone.rayTheta[r];
            if (slack < -1e-7) {
                violations.push_back(RayViolation{r, slack});
            }
        }
        return violations;
    };
}

namespace {

GeneralLp buildCglp(const EpiPoint &candidate, const InteriorPoint &interior,
                    const EpigraphCone &cone, const std::vector<int> &rayRows) {
    const int p = static_cast<int>(cone.apexW.size());
    GeneralLp lp = GeneralLp::withVars(p + 1);
    for (int i = 0; i < p; ++i) {
        lp.lowerBounds(i) = -kInf;
        lp.objective(i) = candidate.w(i) - interior.w(i);
    }
    lp.objective(p) = candidate.theta - interior.theta;  // alpha0 >= 0

    LpRow apexRow;
    apexRow.sense = RowSense::GreaterEqual;
    apexRow.rhs = -1.0;
    for (int i = 0; i < p; ++i) {
        const double coeff = cone.apexW(i) - interior.w(i);
        if (coeff != 0.0) {
            apexRow.coeffs.emplace_back(i, coeff);
        }
    }
    apexRow.coeffs.emplace_back(p, cone.apexTheta - interior.theta);
    lp.addRow(std::move(apexRow));

    for (int rayIndex : rayRows) {
        LpRow row;
        row.sense = RowSense::GreaterEqual;
        row.rhs = 0.0;
        for (int i = 0; i < p; ++i) {
            const double coeff = cone.rayW[rayIndex](i);
            if (coeff != 0.0) {
                row.coeffs.emplace_back(i, coeff);
            }
        }
        if (cone.rayTheta[rayIndex] != 0.0) {
            row.coeffs.emplace_back(p, cone.rayTheta[rayIndex]);
        }
        lp.addRow(std::move(row));
    }
    return lp;
}

} // namespace

PolarResult solveReversePolar(const EpiPoint &candidate,
                              const InteriorPoint &interior,
                              const EpigraphCone &cone,
                              const std::vector<int> &warmRays,
                              const ViolatedRaySource &source,
                              const PolarOptions &options) {
    if (candidate.w.size() != cone.apexW.size() ||
        interior.w.size() != cone.apexW.size()) {
        throw DimensionMismatchError("candidate/interior dimension mismatch");
    }
    const int p = static_cast<int>(cone.apexW.size());

    std::vector<int> rayRows;  // insertion order of ray rows
    std::vector<bool> present(cone.numCornerRays(), false);
    auto addRow = [&](int rayIndex) {
        if (rayIndex < 0 || rayIndex >= cone.numCornerRays()) {
            throw CallbackFailureError("ray index out of range");
        }
        if (!present[rayIndex]) {
            present[rayIndex] = true;
            rayRows.push_back(rayIndex);
        }
    };
    for (int r : warmRays) {
        addRow(r);
    }

    PolarResult result;
    const int maxIterations = cone.numCornerRays() + 16;
    for (int iteration = 0; iteration <= maxIterations; ++iteration) {
        const GeneralLp cglp = buildCglp(candidate, interior, cone, rayRows);
        const GeneralOutcome out = solveGeneral(cglp);
        ++result.cglpSolves;
        if (out.status == LpStatus::Infeasible) {
            throw NumericalFailureError("CGLP infeasible");
        }

        const bool unbounded = out.status == LpStatus::Unbounded;
        VectorXd alpha(p);
        double alpha0 = 0;
        if (unbounded) {
            alpha = out.ray.head(p);
            alpha0 = out.ray(p);
        } else {
            alpha = out.primal.head(p);
            alpha0 = out.primal(p);
        }

        std::vector<RayViolation> violations = source(alpha, alpha0);
        std::erase_if(violations, [&](const RayViolation &v) {
            return v.rayIndex >= 0 && v.rayIndex < cone.numCornerRays() &&
                   present[v.rayIndex];
        });
        if (!violations.empty()) {
            std::sort(violations.begin(), violations.end(),
                      [](const RayViolation &a, const RayViolation &b) {
                          if (a.slack != b.slack) {
                              return a.slack < b.slack;
                          }
                          return a.rayIndex < b.rayIndex;
                      });
            const int take = std::min<int>(options.maxRowsPerRound,
                                           static_cast<int>(violations.size()));
            for (int i = 0; i < take; ++i) {
                addRow(violations[i].rayIndex);
            }
            result.raysGenerated += take;
            continue;
        }

        // No violated ray inequalities remain; classify.
        if (unbounded) {
            const double scale =
                std::max(alpha.lpNorm<Eigen::Infinity>(), std::abs(alpha0));
            alpha /= scale;
            alpha0 /= scale;
            result.polarCase = PolarCase::ImplicitEquality;
            result.zCirc = -kInf;
            result.cut.alpha = alpha;
            result.cut.alpha0 = alpha0;
            result.cut.beta = alpha.dot(interior.w) + alpha0 * interior.theta;
            result.cut.kind = CutKind::ImplicitEqualityPair;
            result.cut.clampAlpha0();
            result.warmRays = warmRays;
            return result;
        }

        result.zCirc = out.objectiveValue;
        result.cut.alpha = alpha;
        result.cut.alpha0 = std::max(alpha0, 0.0);
        result.cut.beta = -1.0 + alpha.dot(interior.w) + alpha0 * interior.theta;
        result.cut.kind = CutKind::Facet;
        result.polarCase = result.zCirc >= -1.0 - options.boundaryTol
                               ? PolarCase::Member
                               : PolarCase::ViolatedFacet;
        if (result.polarCase == PolarCase::ViolatedFacet) {
            result.cut.clampAlpha0();
            // The lifted interior point must keep strict slack on the facet.
            const double interiorSlack =
                result.cut.evaluate(interior.w, interior.theta);
            if (interiorSlack <= 1e-9) {
                throw NumericalFailureError(
                    "interior point is tight on a separated facet");
            }
        }

        // Warm-start collection: rays with positive multipliers lie on the
        // returned facet.
        result.warmRays = warmRays;
        std::vector<bool> inWarm(cone.numCornerRays(), false);
        for (int r : warmRays) {
            inWarm[r] = true;
        }
        for (size_t i = 0; i < rayRows.size(); ++i) {
            const double mu = out.rowDuals(static_cast<int>(i) + 1);
            if (mu > 1e-9 && !inWarm[rayRows[i]]) {
                inWarm[rayRows[i]] = true;
                result.warmRays.push_back(rayRows[i]);
            }
        }
        std::sort(result.warmRays.begin(), result.warmRays.end());
        return result;
    }
    throw NumericalFailureError("reverse polar row generation did not settle");
}

FacetRankReport facetCertificate(const Cut &cut, const EpigraphCone &cone) {
    FacetRankReport report;
    const int p = static_cast<int>(cone.apexW.size());
    const double tol = 1e-7 * (1.0 + std::abs(cut.beta));

    report.apexTight =
        std::abs(cut.evaluate(cone.apexW, cone.apexTheta)) <= tol;

    std::vector<int> tight;
    for (int r = 0; r < cone.numRays(); ++r) {
        const double slack =
            cut.alpha.dot(cone.rayW[r]) + cut.alpha0 * cone.rayTheta[r];
        if (std::abs(slack) <= tol) {
            tight.push_back(r);
        }
    }
    report.tightRays = tight;

    auto rankOf = [&](const std::vector<int> &rays) {
        if (rays.empty()) {
            return 0;
        }
        MatrixXd mat(p + 1, static_cast<int>(rays.size()));
        for (size_t i = 0; i < rays.size(); ++i) {
            mat.col(static_cast<int>(i)).head(p) = cone.rayW[rays[i]];
            mat(p, static_cast<int>(i)) = cone.rayTheta[rays[i]];
        }
        Eigen::ColPivHouseholderQR<MatrixXd> qr(mat);
        qr.setThreshold(1e-7);
        return static_cast<int>(qr.rank());
    };

    std::vector<int> all(cone.numRays());
    for (int r = 0; r < cone.numRays(); ++r) {
        all[r] = r;
    }
    report.epiDimension = rankOf(all);
    report.tightRank = rankOf(tight);
    report.facetVerified =
        report.apexTight && report.tightRank == report.epiDimension - 1;
    return report;
}

} // namespace cornercuts
