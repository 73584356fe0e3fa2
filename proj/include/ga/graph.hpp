#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ga {

using NodeId = std::string;

struct Node {
    NodeId id;
    std::string node_type;
    // Ordered as in the source file; keys unique.
    std::vector<std::pair<std::string, std::string>> attributes;
    std::optional<std::string> label;

    const std::string* attribute(const std::string& key) const {
        for (const auto& [k, v] : attributes) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

struct Edge {
    NodeId src;
    NodeId dst;
    std::string edge_type;

    bool operator==(const Edge&) const = default;
};

// Immutable heterogeneous property graph. Neighborhood queries use the
// undirected view of the edge set; degree counts incident edges with
// multiplicity across edge types (a self-loop counts twice).
class Graph {
public:
    Graph() = default;
    Graph(std::vector<Node> nodes, std::vector<Edge> edges);

    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edges_.size(); }

    bool has_node(const NodeId& id) const { return index_.count(id) > 0; }
    const Node& node(const NodeId& id) const;

    // Insertion (file) order.
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Undirected neighbor list with multiplicity, in edge-file order.
    const std::vector<NodeId>& neighbors(const NodeId& id) const;

    std::vector<NodeId> node_ids_of_type(const std::string& node_type) const;
    std::vector<std::pair<std::string, size_t>> node_counts_by_type() const;

    // True if any edge of any type connects a and b, in either orientation.
    bool has_edge_between(const NodeId& a, const NodeId& b) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<NodeId, size_t> index_;
    std::unordered_map<NodeId, std::vector<NodeId>> adjacency_;
    std::unordered_set<std::string> connected_pairs_;
};

struct DegreeStats {
    std::unordered_map<NodeId, int64_t> degree;
    std::unordered_map<std::string, double> avg_degree_by_type;
    // degree(n) / avg_degree_by_type[type(n)]; 0 when the type average is 0.
    std::unordered_map<NodeId, double> importance;
};

struct Split {
    uint64_t seed = 0;
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

// Streams hold JSON-lines records:
//   nodes: {"id", "type", "attributes": {key: text}, "label"?}
//   edges: {"src", "dst", "type"}
// Errors carry the offending line number; dangling edge endpoints and
// duplicate node ids are hard errors.
Graph load_graph(std::istream& node_source, std::istream& edge_source);
Graph load_graph_files(const std::string& node_path, const std::string& edge_path);

// Exact per-node degrees and per-type means. OpenMP over nodes; the serial
// variant is the reference kept for tests and the benchmark.
DegreeStats degree_stats(const Graph& g, int threads = 0);
DegreeStats degree_stats_serial(const Graph& g);

// Breadth-first neighborhood: every node reachable within max_hops, reported
// once at its minimum hop, target excluded, in BFS visit order.
std::vector<std::pair<NodeId, int>> n_hop_neighbors(const Graph& g, const NodeId& v, int max_hops);

// SplitMix64-driven Fisher-Yates shuffle of sample_ids, then ratio slices;
// validation/test sizes are floored, train takes the remainder.
Split split_dataset(const std::vector<std::string>& sample_ids,
                    double train_ratio, double validation_ratio, double test_ratio,
                    uint64_t seed);

std::string split_to_json(const Split& split);
Split split_from_json(const std::string& text);

// Uniform (src, dst) draws over the two type populations, rejecting pairs
// already connected by any edge type and duplicates. Deterministic per seed.
std::vector<Edge> sample_negative_edges(const Graph& g,
                                        const std::string& src_type,
                                        const std::string& dst_type,
                                        size_t count, uint64_t seed);

} // namespace ga
