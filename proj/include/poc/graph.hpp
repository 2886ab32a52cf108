#ifndef POC_GRAPH_HPP
#define POC_GRAPH_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <poc/errors.hpp>

namespace poc {

/// Opaque non-empty identifier of a software entity.
using NodeId = std::string;

using Edge = std::pair<NodeId, NodeId>;

/// One structural transition between consecutive snapshots. Removing a node
/// requires listing all of its incident edges in removed_edges.
struct GraphDelta {
    std::vector<NodeId> added_nodes;
    std::vector<NodeId> removed_nodes;
    std::vector<Edge> added_edges;
    std::vector<Edge> removed_edges;

    bool empty() const {
        return added_nodes.empty() && removed_nodes.empty() &&
               added_edges.empty() && removed_edges.empty();
    }
};

/// Directed dependency graph at one time step. Immutable after construction;
/// evolution produces new snapshots via apply_delta. Self-loops are allowed.
class DependencyGraph {
public:
    DependencyGraph() = default;

    DependencyGraph(std::set<NodeId> nodes, const std::vector<Edge>& edges,
                    long timestep = 0)
        : nodes_(std::move(nodes)), timestep_(timestep) {
        if (timestep < 0) {
            throw Error("timestep must be >= 0");
        }
        for (const NodeId& v : nodes_) {
            if (v.empty()) {
                throw Error("empty node id");
            }
        }
        for (const Edge& e : edges) {
            insert_edge(e);
        }
    }

    const std::set<NodeId>& nodes() const { return nodes_; }
    long timestep() const { return timestep_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    bool has_node(const NodeId& v) const { return nodes_.count(v) != 0; }

    bool has_edge(const NodeId& src, const NodeId& dst) const {
        auto it = adjacency_.find(src);
        return it != adjacency_.end() && it->second.count(dst) != 0;
    }

    /// Edge list in deterministic (lexicographic) order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (const auto& [src, dsts] : adjacency_) {
            for (const NodeId& dst : dsts) {
                out.emplace_back(src, dst);
            }
        }
        return out;
    }

    static const std::set<NodeId>& empty_neighborhood() {
        static const std::set<NodeId> empty;
        return empty;
    }

    DependencyGraph with_timestep(long t) const {
        DependencyGraph g(*this);
        g.timestep_ = t;
        return g;
    }

private:
    friend const std::set<NodeId>& out_neighborhood(const DependencyGraph&,
                                                    const NodeId&);
    friend DependencyGraph apply_delta(const DependencyGraph&,
                                       const GraphDelta&);

    void insert_edge(const Edge& e) {
        if (!has_node(e.first)) {
            throw DeltaError("edge source not in graph: " + e.first);
        }
        if (!has_node(e.second)) {
            throw DeltaError("edge destination not in graph: " + e.second);
        }
        auto [it, inserted] = adjacency_[e.first].insert(e.second);
        if (!inserted) {
            throw DeltaError("duplicate edge: " + e.first + " -> " + e.second);
        }
        ++edge_count_;
    }

    void erase_edge(const Edge& e) {
        auto it = adjacency_.find(e.first);
        if (it == adjacency_.end() || it->second.erase(e.second) == 0) {
            throw DeltaError("edge not in graph: " + e.first + " -> " +
                             e.second);
        }
        if (it->second.empty()) {
            adjacency_.erase(it);
        }
        --edge_count_;
    }

    bool has_incident_edge(const NodeId& v) const {
        if (adjacency_.count(v) != 0) {
            return true;
        }
        for (const auto& [src, dsts] : adjacency_) {
            if (dsts.count(v) != 0) {
                return true;
            }
        }
        return false;
    }

    std::set<NodeId> nodes_;
    std::map<NodeId, std::set<NodeId>> adjacency_;
    std::size_t edge_count_ = 0;
    long timestep_ = 0;
};

/// Outgoing dependency neighborhood { u | (v,u) in edges }.
inline const std::set<NodeId>& out_neighborhood(const DependencyGraph& graph,
                                                const NodeId& v) {
    if (!graph.has_node(v)) {
        throw UnknownNodeError(v);
    }
    auto it = graph.adjacency_.find(v);
    return it == graph.adjacency_.end() ? DependencyGraph::empty_neighborhood()
                                        : it->second;
}

/// Structural load d(v): number of outgoing dependencies.
inline std::size_t out_degree(const DependencyGraph& graph, const NodeId& v) {
    return out_neighborhood(graph, v).size();
}

/// Applies the delta atomically (edge removals, node removals, node
/// additions, edge additions) and returns a snapshot with timestep + 1.
/// The input graph is unmodified.
inline DependencyGraph apply_delta(const DependencyGraph& graph,
                                   const GraphDelta& delta) {
    {
        std::set<NodeId> added(delta.added_nodes.begin(),
                               delta.added_nodes.end());
        for (const NodeId& v : delta.removed_nodes) {
            if (added.count(v) != 0) {
                throw DeltaError("node both added and removed: " + v);
            }
        }
        std::set<Edge> added_e(delta.added_edges.begin(),
                               delta.added_edges.end());
        for (const Edge& e : delta.removed_edges) {
            if (added_e.count(e) != 0) {
                throw DeltaError("edge both added and removed: " + e.first +
                                 " -> " + e.second);
            }
        }
    }

    DependencyGraph next(graph);
    next.timestep_ = graph.timestep_ + 1;

    for (const Edge& e : delta.removed_edges) {
        next.erase_edge(e);
    }
    for (const NodeId& v : delta.removed_nodes) {
        if (!next.has_node(v)) {
            throw DeltaError("removed node not in graph: " + v);
        }
        if (next.has_incident_edge(v)) {
            throw DeltaError("removing node with surviving incident edges: " +
                             v);
        }
        next.nodes_.erase(v);
    }
    for (const NodeId& v : delta.added_nodes) {
        if (v.empty()) {
            throw DeltaError("empty node id");
        }
        if (!next.nodes_.insert(v).second) {
            throw DeltaError("added node already in graph: " + v);
        }
    }
    for (const Edge& e : delta.added_edges) {
        next.insert_edge(e);
    }
    return next;
}

} // namespace poc

#endif // POC_GRAPH_HPP
