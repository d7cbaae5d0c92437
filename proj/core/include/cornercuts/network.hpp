#ifndef CORNERCUTS_NETWORK_HPP
#define CORNERCUTS_NETWORK_HPP

#include <vector>

#include "cornercuts/corner.hpp"
#include "cornercuts/simplex.hpp"

namespace cornercuts {

struct Arc {
    int tail = -1;
    int head = -1;
};

// Directed network with supplies b (sum zero) and optional capacities.
// Connectivity is meant in the undirected sense.
struct Network {
    int numNodes = 0;
    std::vector<Arc> arcs;
    std::vector<long long> supply;       // b, +k at sinks
    std::vector<double> capacity;        // +inf when absent
    int source = -1;                     // row dropped from N y = b
    int sink = -1;

    int numArcs() const { return static_cast<int>(arcs.size()); }
    int rootNode() const { return source >= 0 ? source : 0; }
    void validate() const;
};

// Rooted representation of a spanning tree of the undirected skeleton.
struct SpanningTree {
    std::vector<int> arcIds;     // |V| - 1 arcs
    std::vector<int> parentArc;  // per node, -1 at root
    std::vector<int> parentNode; // per node, -1 at root
    std::vector<int> depth;      // per node, 0 at root
    std::vector<int> preorder;   // root first
    std::vector<bool> inTree;    // per arc
};

// Flow polytope rows N y = b with the source row dropped, bounds 0<=y<=u.
GeneralLp flowPolytope(const Network &net);

// Same polytope as a StandardLp with one column per arc; requires all
// capacities infinite so no slack columns are needed.
StandardLp flowStandardLp(const Network &net);

// True iff the arc subset (|T| = |V|-1) forms a spanning tree.
bool treeBasisCheck(const Network &net, const std::vector<int> &arcIds);

// Rooted tree structure for a verified spanning-tree arc set.
SpanningTree rootTree(const Network &net, const std::vector<int> &arcIds);

// Incidence vector of the unique cycle in T + {arc}, oriented with the arc.
SparseVec cycleRay(const Network &net, const SpanningTree &tree, int arcId);

struct ShortestPathResult {
    SpanningTree tree;
    VectorXd distance;
};

// Shortest-path tree of a DAG reachable from the source; ties broken by
// input arc order.
ShortestPathResult shortestPathTree(const Network &net,
                                    const VectorXd &weights);

// Column-sparse p x numArcs matrix.
struct SparseColumns {
    int numRows = 0;
    std::vector<std::vector<std::pair<int, double>>> cols;

    static SparseColumns fromDense(const MatrixXd &dense);
    double dotCol(const VectorXd &alpha, int col) const {
        double s = 0;
        for (const auto &[i, v] : cols[col]) {
            s += alpha(i) * v;
        }
        return s;
    }
};

struct ViolatedArc {
    int arcId = -1;
    double slack = 0;  // alpha'(Q r) + alpha0 (d'r), negative when violated
};

// Potential-based O(|A| p) scan for violated ray inequalities (non-tree arcs
// uv with nu_u - nu_v + alpha'Q_uv + alpha0 d_uv < -1e-7).
std::vector<ViolatedArc> findViolatedRayArcs(const VectorXd &alpha,
                                             double alpha0,
                                             const Network &net,
                                             const SpanningTree &tree,
                                             const SparseColumns &q,
                                             const VectorXd &d);

// Same scan, with the violated rays materialized as cycle incidence vectors.
std::vector<SparseVec> findViolatedRays(const VectorXd &alpha, double alpha0,
                                        const Network &net,
                                        const SpanningTree &tree,
                                        const SparseColumns &q,
                                        const VectorXd &d);

} // namespace cornercuts

#endif
