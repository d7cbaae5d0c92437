#include "cornercuts/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cornercuts {
namespace oracle {

namespace {

void enumerateRec(const VrpsdInstance &instance, bool allowRepeat,
                  Route &current, long long load,
                  std::vector<EnumeratedRoute> &out) {
    if (!current.empty()) {
        EnumeratedRoute entry;
        entry.route = current;
        entry.firstStageCost = routeFirstStageCost(instance, current);
        entry.recourse = expectedRecourse(instance, current);
        out.push_back(std::move(entry));
    }
    for (int v = 1; v <= instance.numCustomers(); ++v) {
        if (!current.empty() && current.back() == v) {
            continue;
        }
        if (!allowRepeat &&
            std::find(current.begin(), current.end(), v) != current.end()) {
            continue;
        }
        if (load + instance.meanDemand(v) > instance.capacity()) {
            continue;
        }
        current.push_back(v);
        enumerateRec(instance, allowRepeat, current,
                     load + instance.meanDemand(v), out);
        current.pop_back();
    }
}

} // namespace

std::vector<EnumeratedRoute> enumerateQRoutes(const VrpsdInstance &instance) {
    if (instance.numCustomers() > 10) {
        throw TooLargeError("route enumeration capped at n = 10");
    }
    std::vector<EnumeratedRoute> out;
    Route current;
    enumerateRec(instance, false, current, 0, out);
    return out;
}

std::vector<EnumeratedRoute> enumerateQRouteSequences(
    const VrpsdInstance &instance) {
    if (instance.numCustomers() > 10) {
        throw TooLargeError("sequence enumeration capped at n = 10");
    }
    std::vector<EnumeratedRoute> out;
    Route current;
    enumerateRec(instance, true, current, 0, out);
    return out;
}

double dwBoundEnumeration(const VrpsdInstance &instance) {
    const std::vector<EnumeratedRoute> columns =
        enumerateQRouteSequences(instance);
    const int numEdges = instance.numEdges();
    const int numRoutes = static_cast<int>(columns.size());

    // Variables: x block, then one lambda per pattern.
    GeneralLp xRows = masterXRowsWithAllRci(instance);
    GeneralLp lp = GeneralLp::withVars(numEdges + numRoutes);
    for (int e = 0; e < numEdges; ++e) {
        lp.objective(e) = instance.edgeCost(e);
        lp.lowerBounds(e) = xRows.lowerBounds(e);
        lp.upperBounds(e) = xRows.upperBounds(e);
    }
    for (int r = 0; r < numRoutes; ++r) {
        lp.objective(numEdges + r) = columns[r].recourse;
    }
    for (const LpRow &row : xRows.rows) {
        lp.addRow(row);
    }

    // Linking rows x_e = sum_R count(R, e) lambda_R.
    std::vector<LpRow> linking(numEdges);
    for (int e = 0; e < numEdges; ++e) {
        linking[e].sense = RowSense::Equal;
        linking[e].rhs = 0;
        linking[e].coeffs.emplace_back(e, 1.0);
    }
    for (int r = 0; r < numRoutes; ++r) {
        const Route &route = columns[r].route;
        std::vector<std::pair<int, double>> counts;
        auto bump = [&](int e) {
            for (auto &[idx, value] : counts) {
                if (idx == e) {
                    value += 1.0;
                    return;
                }
            }
            counts.emplace_back(e, 1.0);
        };
        bump(instance.edgeIndex(0, route.front()));
        for (size_t i = 0; i + 1 < route.size(); ++i) {
            bump(instance.edgeIndex(route[i], route[i + 1]));
        }
        bump(instance.edgeIndex(0, route.back()));
        for (const auto &[e, value] : counts) {
            linking[e].coeffs.emplace_back(numEdges + r, -value);
        }
    }
    for (LpRow &row : linking) {
        lp.addRow(std::move(row));
    }

    LpRow convexity;
    convexity.sense = RowSense::Equal;
    convexity.rhs = static_cast<double>(instance.vehicles());
    for (int r = 0; r < numRoutes; ++r) {
        convexity.coeffs.emplace_back(numEdges + r, 1.0);
    }
    lp.addRow(std::move(convexity));

    const GeneralOutcome out = solveGeneral(lp);
    if (out.status == LpStatus::Infeasible) {
        return kInf;  // no fractional k-assignment exists
    }
    if (out.status != LpStatus::Optimal) {
        throw NumericalFailureError("path-flow relaxation unbounded");
    }
    return out.objectiveValue;
}

bool epiMembershipCorner(const EpigraphCone &cone, const VectorXd &w,
                         double theta) {
    const int p = static_cast<int>(cone.apexW.size());
    const int numRays = cone.numRays();
    if (numRays == 0) {
        return false;
    }
    GeneralLp lp = GeneralLp::withVars(numRays);
    for (int i = 0; i < p; ++i) {
        LpRow row;
        row.sense = RowSense::Equal;
        row.rhs = w(i) - cone.apexW(i);
        for (int r = 0; r < numRays; ++r) {
            if (cone.rayW[r](i) != 0.0) {
                row.coeffs.emplace_back(r, cone.rayW[r](i));
            }
        }
        lp.addRow(std::move(row));
    }
    LpRow thetaRow;
    thetaRow.sense = RowSense::Equal;  // vertical ray absorbs the slack
    thetaRow.rhs = theta - cone.apexTheta;
    for (int r = 0; r < numRays; ++r) {
        if (cone.rayTheta[r] != 0.0) {
            thetaRow.coeffs.emplace_back(r, cone.rayTheta[r]);
        }
    }
    lp.addRow(std::move(thetaRow));

    return solveGeneral(lp).status != LpStatus::Infeasible;
}

bool epiMembershipY(const ProblemData &data, const VectorXd &w, double theta) {
    const double value = valueEval(data, w);
    return value <= theta + 1e-7;
}

RestrictedDualReport restrictedDualCheck(const ProblemData &data,
                                         const Corner &corner,
                                         const VectorXd &w, double theta) {
    const StandardLp &yLp = data.yLp;
    const int rowsY = yLp.numRows();
    const int p = data.p();
    const int m = data.m();
    std::vector<bool> isBasic(m, false);
    for (int col : corner.basis.cols) {
        isBasic[col] = true;
    }

    // Variables: nu (free), alpha (free), alpha0 >= 0. Maximize
    //   nu'b + alpha'w - alpha0*theta
    // subject to  Q'alpha + A'nu - alpha0*d  = 0 on basic columns,
    //                                       <= 0 on nonbasic columns.
    const int nuBase = 0;
    const int alphaBase = rowsY;
    const int alpha0Var = rowsY + p;
    GeneralLp lp = GeneralLp::withVars(rowsY + p + 1);
    for (int i = 0; i < rowsY + p; ++i) {
        lp.lowerBounds(i) = -kInf;
    }
    for (int i = 0; i < rowsY; ++i) {
        lp.objective(nuBase + i) = -yLp.rhs(i);
    }
    for (int i = 0; i < p; ++i) {
        lp.objective(alphaBase + i) = -w(i);
    }
    lp.objective(alpha0Var) = theta;

    for (int j = 0; j < m; ++j) {
        LpRow row;
        row.sense = isBasic[j] ? RowSense::Equal : RowSense::LessEqual;
        row.rhs = 0;
        for (int i = 0; i < rowsY; ++i) {
            if (yLp.constraints(i, j) != 0.0) {
                row.coeffs.emplace_back(nuBase + i, yLp.constraints(i, j));
            }
        }
        for (int i = 0; i < p; ++i) {
            if (data.Q(i, j) != 0.0) {
                row.coeffs.emplace_back(alphaBase + i, data.Q(i, j));
            }
        }
        if (data.d(j) != 0.0) {
            row.coeffs.emplace_back(alpha0Var, -data.d(j));
        }
        lp.addRow(std::move(row));
    }

    const GeneralOutcome out = solveGeneral(lp);
    RestrictedDualReport report;
    if (out.status == LpStatus::Optimal) {
        report.accept = -out.objectiveValue <= 1e-6;
        report.nu = out.primal.segment(nuBase, rowsY);
        report.alpha = out.primal.segment(alphaBase, p);
        report.alpha0 = out.primal(alpha0Var);
        return report;
    }
    if (out.status == LpStatus::Unbounded) {
        report.accept = false;
        report.nu = out.ray.segment(nuBase, rowsY);
        report.alpha = out.ray.segment(alphaBase, p);
        report.alpha0 = out.ray(alpha0Var);
        return report;
    }
    throw NumericalFailureError("restricted dual LP infeasible");
}

namespace {

struct RouteDp {
    double value = kInf;
    Route order;
};

// Cheapest route through one customer subset, all orderings via a
// (mask, last) dynamic program.
std::vector<RouteDp> bestRoutePerMask(const VrpsdInstance &instance,
                                      bool firstStageOnly) {
    const int n = instance.numCustomers();
    const unsigned full = (1u << n) - 1;
    std::vector<long long> maskDemand(full + 1, 0);
    for (unsigned mask = 1; mask <= full; ++mask) {
        const int low = std::countr_zero(mask);
        maskDemand[mask] =
            maskDemand[mask & (mask - 1)] + instance.meanDemand(low + 1);
    }
    const double inf = kInf;
    std::vector<std::vector<double>> g(full + 1,
                                       std::vector<double>(n, inf));
    std::vector<std::vector<int>> parent(full + 1, std::vector<int>(n, -1));
    for (int v = 0; v < n; ++v) {
        if (instance.meanDemand(v + 1) <= instance.capacity()) {
            g[1u << v][v] =
                instance.cost(0, v + 1) +
                (firstStageOnly
                     ? 0.0
                     : psi(instance, v + 1, instance.meanDemand(v + 1)));
        }
    }
    for (unsigned mask = 1; mask <= full; ++mask) {
        if (maskDemand[mask] > instance.capacity()) {
            continue;
        }
        for (int last = 0; last < n; ++last) {
            if (!(mask & (1u << last)) || g[mask][last] == inf) {
                continue;
            }
            for (int nxt = 0; nxt < n; ++nxt) {
                if (mask & (1u << nxt)) {
                    continue;
                }
                const unsigned nm = mask | (1u << nxt);
                if (maskDemand[nm] > instance.capacity()) {
                    continue;
                }
                double cand = g[mask][last] + instance.cost(last + 1, nxt + 1);
                if (!firstStageOnly) {
                    cand += psi(instance, nxt + 1, maskDemand[nm]);
                }
                if (cand < g[nm][nxt] - 1e-15) {
                    g[nm][nxt] = cand;
                    parent[nm][nxt] = last;
                }
            }
        }
    }
    std::vector<RouteDp> best(full + 1);
    for (unsigned mask = 1; mask <= full; ++mask) {
        for (int last = 0; last < n; ++last) {
            if (g[mask][last] == inf) {
                continue;
            }
            const double closed = g[mask][last] + instance.cost(0, last + 1);
            if (closed < best[mask].value) {
                best[mask].value = closed;
                Route order;
                unsigned m2 = mask;
                int cur = last;
                while (cur >= 0) {
                    order.push_back(cur + 1);
                    const int prev = parent[m2][cur];
                    m2 &= ~(1u << cur);
                    cur = prev;
                }
                std::reverse(order.begin(), order.end());
                best[mask].order = std::move(order);
            }
        }
    }
    return best;
}

} // namespace

BruteForceResult bruteForceOptimum(const VrpsdInstance &instance,
                                   bool firstStageOnly) {
    const int n = instance.numCustomers();
    if (n > 8) {
        throw TooLargeError("brute force capped at n = 8");
    }
    const int k = instance.vehicles();
    const unsigned full = (1u << n) - 1;
    const std::vector<RouteDp> best = bestRoutePerMask(instance, firstStageOnly);

    // dp over (covered mask, parts used).
    const double inf = kInf;
    std::vector<std::vector<double>> dp(full + 1,
                                        std::vector<double>(k + 1, inf));
    std::vector<std::vector<unsigned>> choice(full + 1,
                                              std::vector<unsigned>(k + 1, 0));
    dp[0][0] = 0;
    for (unsigned mask = 1; mask <= full; ++mask) {
        const unsigned low = mask & (~mask + 1u);
        for (int parts = 1; parts <= k; ++parts) {
            for (unsigned sub = mask; sub; sub = (sub - 1) & mask) {
                if (!(sub & low) || best[sub].value == inf) {
                    continue;
                }
                if (dp[mask ^ sub][parts - 1] == inf) {
                    continue;
                }
                const double cand = dp[mask ^ sub][parts - 1] + best[sub].value;
                if (cand < dp[mask][parts] - 1e-15) {
                    dp[mask][parts] = cand;
                    choice[mask][parts] = sub;
                }
            }
        }
    }
    if (dp[full][k] == inf) {
        throw InfeasibleInstanceError("no partition into k q-routes");
    }

    BruteForceResult result;
    result.value = dp[full][k];
    unsigned mask = full;
    for (int parts = k; parts >= 1; --parts) {
        const unsigned sub = choice[mask][parts];
        result.routes.push_back(best[sub].order);
        mask ^= sub;
    }
    std::reverse(result.routes.begin(), result.routes.end());
    return result;
}

} // namespace oracle
} // namespace cornercuts
