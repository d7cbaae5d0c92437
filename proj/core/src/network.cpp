#include "cornercuts/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace cornercuts {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[a] = b;
        return true;
    }
};

} // namespace

void Network::validate() const {
    if (numNodes <= 0) {
        throw DimensionMismatchError("network has no nodes");
    }
    if (supply.size() != static_cast<size_t>(numNodes)) {
        throw DimensionMismatchError("supply length != node count");
    }
    if (!capacity.empty() && capacity.size() != arcs.size()) {
        throw DimensionMismatchError("capacity length != arc count");
    }
    long long total = 0;
    for (long long s : supply) {
        total += s;
    }
    if (total != 0) {
        throw DimensionMismatchError("supplies do not sum to zero");
    }
    for (const Arc &a : arcs) {
        if (a.tail < 0 || a.tail >= numNodes || a.head < 0 ||
            a.head >= numNodes) {
            throw DimensionMismatchError("arc endpoint out of range");
        }
    }
    // Undirected connectivity.
    if (numNodes > 1) {
        std::vector<std::vector<int>> adj(numNodes);
        for (const Arc &a : arcs) {
            adj[a.tail].push_back(a.head);
            adj[a.head].push_back(a.tail);
        }
        std::vector<bool> seen(numNodes, false);
        std::queue<int> bfs;
        bfs.push(0);
        seen[0] = true;
        int count = 1;
        while (!bfs.empty()) {
            const int u = bfs.front();
            bfs.pop();
            for (int v : adj[u]) {
                if (!seen[v]) {
                    seen[v] = true;
                    ++count;
                    bfs.push(v);
                }
            }
        }
        if (count != numNodes) {
            throw DimensionMismatchError("network is not connected");
        }
    }
}

GeneralLp flowPolytope(const Network &net) {
    net.validate();
    const int root = net.rootNode();
    GeneralLp lp = GeneralLp::withVars(net.numArcs());
    if (!net.capacity.empty()) {
        for (int a = 0; a < net.numArcs(); ++a) {
            lp.upperBounds(a) = net.capacity[a];
        }
    }
    // One conservation row per node except the dropped one: in - out = b_v.
    std::vector<LpRow> rows(net.numNodes);
    for (int v = 0; v < net.numNodes; ++v) {
        rows[v].sense = RowSense::Equal;
        rows[v].rhs = static_cast<double>(net.supply[v]);
    }
    for (int a = 0; a < net.numArcs(); ++a) {
        rows[net.arcs[a].head].coeffs.emplace_back(a, 1.0);
        rows[net.arcs[a].tail].coeffs.emplace_back(a, -1.0);
    }
    for (int v = 0; v < net.numNodes; ++v) {
        if (v != root) {
            lp.addRow(std::move(rows[v]));
        }
    }
    return lp;
}

StandardLp flowStandardLp(const Network &net) {
    net.validate();
    if (!net.capacity.empty()) {
        for (double u : net.capacity) {
            if (u != kInf) {
                throw StructureUnsupportedError(
                    "flowStandardLp requires uncapacitated arcs");
            }
        }
    }
    const int root = net.rootNode();
    StandardLp lp;
    lp.constraints = MatrixXd::Zero(net.numNodes - 1, net.numArcs());
    lp.rhs.resize(net.numNodes - 1);
    lp.objective = VectorXd::Zero(net.numArcs());
    std::vector<int> rowOf(net.numNodes, -1);
    int row = 0;
    for (int v = 0; v < net.numNodes; ++v) {
        if (v != root) {
            rowOf[v] = row;
            lp.rhs(row) = static_cast<double>(net.supply[v]);
            ++row;
        }
    }
    for (int a = 0; a < net.numArcs(); ++a) {
        if (rowOf[net.arcs[a].head] >= 0) {
            lp.constraints(rowOf[net.arcs[a].head], a) += 1.0;
        }
        if (rowOf[net.arcs[a].tail] >= 0) {
            lp.constraints(rowOf[net.arcs[a].tail], a) -= 1.0;
        }
    }
    return lp;
}

bool treeBasisCheck(const Network &net, const std::vector<int> &arcIds) {
    if (static_cast<int>(arcIds.size()) != net.numNodes - 1) {
        return false;
    }
    UnionFind uf(net.numNodes);
    for (int id : arcIds) {
        if (id < 0 || id >= net.numArcs()) {
            return false;
        }
        if (!uf.unite(net.arcs[id].tail, net.arcs[id].head)) {
            return false;  // cycle
        }
    }
    return true;  // |V|-1 acyclic arcs span the graph
}

SpanningTree rootTree(const Network &net, const std::vector<int> &arcIds) {
    if (!treeBasisCheck(net, arcIds)) {
        throw DimensionMismatchError("arc set is not a spanning tree");
    }
    SpanningTree tree;
    tree.arcIds = arcIds;
    tree.inTree.assign(net.numArcs(), false);
    std::vector<std::vector<std::pair<int, int>>> adj(net.numNodes);
    for (int id : arcIds) {
        tree.inTree[id] = true;
        adj[net.arcs[id].tail].emplace_back(net.arcs[id].head, id);
        adj[net.arcs[id].head].emplace_back(net.arcs[id].tail, id);
    }
    const int root = net.rootNode();
    tree.parentArc.assign(net.numNodes, -1);
    tree.parentNode.assign(net.numNodes, -1);
    tree.depth.assign(net.numNodes, 0);
    tree.preorder.clear();
    tree.preorder.reserve(net.numNodes);
    std::vector<bool> seen(net.numNodes, false);
    std::vector<int> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        tree.preorder.push_back(u);
        for (const auto &[v, id] : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                tree.parentNode[v] = u;
                tree.parentArc[v] = id;
                tree.depth[v] = tree.depth[u] + 1;
                stack.push_back(v);
            }
        }
    }
    return tree;
}

SparseVec cycleRay(const Network &net, const SpanningTree &tree, int arcId) {
    if (arcId < 0 || arcId >= net.numArcs()) {
        throw DimensionMismatchError("arc id out of range");
    }
    if (tree.inTree[arcId]) {
        throw ArcInTreeError("cycle ray requires a non-tree arc");
    }
    SparseVec ray;
    ray.dim = net.numArcs();
    ray.nz.emplace_back(arcId, 1.0);

    // Walk both endpoints up to their lowest common ancestor. The cycle is
    // traversed from head(a) back to tail(a); a tree arc traversed with its
    // orientation gets +1, against it -1.
    int u = net.arcs[arcId].head;
    int v = net.arcs[arcId].tail;
    const std::vector<int> &depth = tree.depth;
    while (u != v) {
        if (depth[u] >= depth[v]) {
            const int arc = tree.parentArc[u];
            // Path step u -> parent(u).
            ray.nz.emplace_back(arc, net.arcs[arc].tail == u ? 1.0 : -1.0);
            u = tree.parentNode[u];
        } else {
            const int arc = tree.parentArc[v];
            // Path step parent(v) -> v, traversed in cycle direction.
            ray.nz.emplace_back(arc, net.arcs[arc].head == v ? 1.0 : -1.0);
            v = tree.parentNode[v];
        }
    }
    std::sort(ray.nz.begin(), ray.nz.end());
    return ray;
}

ShortestPathResult shortestPathTree(const Network &net,
                                    const VectorXd &weights) {
    net.validate();
    if (weights.size() != net.numArcs()) {
        throw DimensionMismatchError("weights length != arc count");
    }
    const int root = net.rootNode();

    // Topological order via Kahn, smallest node index first.
    std::vector<int> indeg(net.numNodes, 0);
    std::vector<std::vector<int>> inArcs(net.numNodes);
    for (int a = 0; a < net.numArcs(); ++a) {
        ++indeg[net.arcs[a].head];
        inArcs[net.arcs[a].head].push_back(a);
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < net.numNodes; ++v) {
        if (indeg[v] == 0) {
            ready.push(v);
        }
    }
    std::vector<int> topo;
    topo.reserve(net.numNodes);
    std::vector<std::vector<int>> outArcs(net.numNodes);
    for (int a = 0; a < net.numArcs(); ++a) {
        outArcs[net.arcs[a].tail].push_back(a);
    }
    while (!ready.empty()) {
        const int u = ready.top();
        ready.pop();
        topo.push_back(u);
        for (int a : outArcs[u]) {
            if (--indeg[net.arcs[a].head] == 0) {
                ready.push(net.arcs[a].head);
            }
        }
    }
    if (static_cast<int>(topo.size()) != net.numNodes) {
        throw StructureUnsupportedError("network has a directed cycle");
    }

    ShortestPathResult result;
    result.distance = VectorXd::Constant(net.numNodes, kInf);
    result.distance(root) = 0;
    std::vector<int> predArc(net.numNodes, -1);
    for (int v : topo) {
        if (v == root) {
            continue;
        }
        // In-arc scan in input order; strict improvement keeps the first
        // minimizer, which is the tie-break contract.
        for (int a : inArcs[v]) {
            const double cand = result.distance(net.arcs[a].tail) + weights(a);
            if (cand < result.distance(v)) {
                result.distance(v) = cand;
                predArc[v] = a;
            }
        }
        if (predArc[v] < 0) {
            throw UnreachableNodeError("node unreachable from source");
        }
    }

    std::vector<int> treeArcs;
    treeArcs.reserve(net.numNodes - 1);
    for (int v = 0; v < net.numNodes; ++v) {
        if (v != root) {
            treeArcs.push_back(predArc[v]);
        }
    }
    std::sort(treeArcs.begin(), treeArcs.end());
    result.tree = rootTree(net, treeArcs);
    return result;
}

SparseColumns SparseColumns::fromDense(const MatrixXd &dense) {
    SparseColumns s;
    s.numRows = static_cast<int>(dense.rows());
    s.cols.resize(dense.cols());
    for (int j = 0; j < dense.cols(); ++j) {
        for (int i = 0; i < dense.rows(); ++i) {
            if (dense(i, j) != 0.0) {
                s.cols[j].emplace_back(i, dense(i, j));
            }
        }
    }
    return s;
}

std::vector<ViolatedArc> findViolatedRayArcs(const VectorXd &alpha,
                                             double alpha0,
                                             const Network &net,
                                             const SpanningTree &tree,
                                             const SparseColumns &q,
                                             const VectorXd &d) {
    const int numArcs = net.numArcs();
    std::vector<double> arcTerm(numArcs);
    for (int a = 0; a < numArcs; ++a) {
        arcTerm[a] = q.dotCol(alpha, a) + alpha0 * d(a);
    }

    // Potentials along the tree, iteratively over the preorder array.
    std::vector<double> potential(net.numNodes, 0.0);
    for (int node : tree.preorder) {
        const int arc = tree.parentArc[node];
        if (arc < 0) {
            continue;
        }
        const int parent = tree.parentNode[node];
        if (net.arcs[arc].tail == parent) {
            potential[node] = potential[parent] + arcTerm[arc];
        } else {
            potential[node] = potential[parent] - arcTerm[arc];
        }
    }

    std::vector<ViolatedArc> violated;
    for (int a = 0; a < numArcs; ++a) {
        if (tree.inTree[a]) {
            continue;
        }
        const double slack =
            potential[net.arcs[a].tail] - potential[net.arcs[a].head] +
            arcTerm[a];
        if (slack < -1e-7) {
            violated.push_back(ViolatedArc{a, slack});
        }
    }
    return violated;
}

std::vector<SparseVec> findViolatedRays(const VectorXd &alpha, double alpha0,
                                        const Network &net,
                                        const SpanningTree &tree,
                                        const SparseColumns &q,
                                        const VectorXd &d) {
    std::vector<SparseVec> rays;
    for (const ViolatedArc &va :
         findViolatedRayArcs(alpha, alpha0, net, tree, q, d)) {
        rays.push_back(cycleRay(net, tree, va.arcId));
    }
    return rays;
}

} // namespace cornercuts
