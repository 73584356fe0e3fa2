#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ga/graph.hpp"

namespace ga {

enum class SampleKind { Node, Edge };

inline const char* to_string(SampleKind kind) {
    return kind == SampleKind::Node ? "node" : "edge";
}

struct EncoderConfig {
    int hops = 1;
    int top_k = 8;
    // Empty list means "all attributes, in file order".
    std::vector<std::string> attribute_keys_target;
    std::vector<std::string> attribute_keys_neighbor;
    bool mask_target_label = true;
    // Attribute values are clipped to these character budgets.
    size_t target_value_budget = 1200;
    size_t neighbor_value_budget = 300;
};

struct EncodedSample {
    std::string sample_id; // node id, or "src|dst" for edges
    SampleKind kind = SampleKind::Node;
    std::string text;
    std::vector<NodeId> neighbor_ids_used;
};

inline std::string edge_sample_id(const NodeId& src, const NodeId& dst) {
    return src + "|" + dst;
}

// degree(n) / mean degree of its node type; 0 when the type average is 0.
double importance(const DegreeStats& stats, const NodeId& n);

// The top-k most important candidates, descending importance, ties broken by
// ascending node id. Returns all candidates (sorted) when k >= |candidates|.
std::vector<NodeId> sample_neighbors(const std::vector<NodeId>& candidates,
                                     const DegreeStats& stats, int k);

// Line-oriented rendering of a node and its sampled n-hop neighborhood:
//   node: <id>
//   attributes:
//   type: <node type>
//   <key>: <value>
//   n-hop-neighbours: hop <h>       (one section per hop, 1..cfg.hops)
//   - <type> | <id> | <key>: <value>; ...
// The target label is rendered only when cfg.mask_target_label is false.
// Connections among the listed neighbors are never rendered.
EncodedSample encode_node(const Graph& g, const DegreeStats& stats, const NodeId& v,
                          const EncoderConfig& cfg);

// Edge rendering: header, both endpoints' attribute blocks, then y's and x's
// neighbor sections (in that order), each hop sampled independently. When
// exclude_counterpart is set, each endpoint is removed from the other's
// candidate lists before sampling so the pair under question never names its
// own counterpart as a neighbor.
EncodedSample encode_edge(const Graph& g, const DegreeStats& stats,
                          const NodeId& x, const NodeId& y,
                          const EncoderConfig& cfg, bool exclude_counterpart = true);

} // namespace ga
