#include "ga/encoder.hpp"

#include <algorithm>
#include <map>

#include "ga/errors.hpp"

namespace ga {

namespace {

std::string clip(const std::string& value, size_t budget) {
    return value.size() > budget ? value.substr(0, budget) : value;
}

bool key_selected(const std::vector<std::string>& keys, const std::string& key) {
    return keys.empty() || std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::string render_neighbor_line(const Node& n, const EncoderConfig& cfg) {
    std::string attrs;
    for (const auto& [key, value] : n.attributes) {
        if (!key_selected(cfg.attribute_keys_neighbor, key)) continue;
        if (!attrs.empty()) attrs += "; ";
        attrs += key + ": " + clip(value, cfg.neighbor_value_budget);
    }
    std::string line = "- " + n.node_type + " | " + n.id;
    line += attrs.empty() ? " |" : " | " + attrs;
    return line;
}

void render_target_attributes(const Node& n, const EncoderConfig& cfg, std::string& out) {
    out += "attributes:\n";
    out += "type: " + n.node_type + "\n";
    for (const auto& [key, value] : n.attributes) {
        if (!key_selected(cfg.attribute_keys_target, key)) continue;
        out += key + ": " + clip(value, cfg.target_value_budget) + "\n";
    }
}

// Candidates grouped by hop (1-based), BFS order preserved within each hop.
std::vector<std::vector<NodeId>> candidates_by_hop(const Graph& g, const NodeId& v, int hops) {
    std::vector<std::vector<NodeId>> buckets(static_cast<size_t>(hops));
    for (const auto& [id, hop] : n_hop_neighbors(g, v, hops)) {
        buckets[static_cast<size_t>(hop - 1)].push_back(id);
    }
    return buckets;
}

void render_hop_sections(const Graph& g, const DegreeStats& stats, const NodeId& v,
                         const EncoderConfig& cfg, const std::string& section_prefix,
                         const NodeId* excluded, EncodedSample& sample) {
    auto buckets = candidates_by_hop(g, v, cfg.hops);
    for (int hop = 1; hop <= cfg.hops; ++hop) {
        sample.text += section_prefix + "n-hop-neighbours: hop " + std::to_string(hop) + "\n";
        std::vector<NodeId>& candidates = buckets[static_cast<size_t>(hop - 1)];
        if (excluded) {
            candidates.erase(std::remove(candidates.begin(), candidates.end(), *excluded),
                             candidates.end());
        }
        for (const NodeId& id : sample_neighbors(candidates, stats, cfg.top_k)) {
            sample.text += render_neighbor_line(g.node(id), cfg) + "\n";
            if (std::find(sample.neighbor_ids_used.begin(), sample.neighbor_ids_used.end(), id) ==
                sample.neighbor_ids_used.end()) {
                sample.neighbor_ids_used.push_back(id);
            }
        }
    }
}

} // namespace

double importance(const DegreeStats& stats, const NodeId& n) {
    auto it = stats.importance.find(n);
    if (it == stats.importance.end()) {
        throw Error(ErrorCode::UnknownNode, "no degree statistics for node '" + n + "'");
    }
    return it->second;
}

std::vector<NodeId> sample_neighbors(const std::vector<NodeId>& candidates,
                                     const DegreeStats& stats, int k) {
    if (k < 0) throw Error(ErrorCode::InvalidConfig, "top_k must be >= 0");
    std::vector<std::pair<double, NodeId>> scored;
    scored.reserve(candidates.size());
    for (const NodeId& id : candidates) {
        scored.emplace_back(importance(stats, id), id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    size_t keep = std::min(scored.size(), static_cast<size_t>(k));
    std::vector<NodeId> out;
    out.reserve(keep);
    for (size_t i = 0; i < keep; ++i) out.push_back(scored[i].second);
    return out;
}

EncodedSample encode_node(const Graph& g, const DegreeStats& stats, const NodeId& v,
                          const EncoderConfig& cfg) {
    const Node& target = g.node(v);
    EncodedSample sample;
    sample.sample_id = v;
    sample.kind = SampleKind::Node;
    sample.text = "node: " + v + "\n";
    render_target_attributes(target, cfg, sample.text);
    if (target.label && !cfg.mask_target_label) {
        sample.text += "label: " + *target.label + "\n";
    }
    render_hop_sections(g, stats, v, cfg, "", nullptr, sample);
    return sample;
}

EncodedSample encode_edge(const Graph& g, const DegreeStats& stats,
                          const NodeId& x, const NodeId& y,
                          const EncoderConfig& cfg, bool exclude_counterpart) {
    const Node& node_x = g.node(x);
    const Node& node_y = g.node(y);
    EncodedSample sample;
    sample.sample_id = edge_sample_id(x, y);
    sample.kind = SampleKind::Edge;
    sample.text = "edge: (" + x + ", " + y + ")\n";
    sample.text += "attributes:\n";
    sample.text += "node_a: " + x + "\n";
    sample.text += "type: " + node_x.node_type + "\n";
    for (const auto& [key, value] : node_x.attributes) {
        if (!key_selected(cfg.attribute_keys_target, key)) continue;
        sample.text += key + ": " + clip(value, cfg.target_value_budget) + "\n";
    }
    sample.text += "node_b: " + y + "\n";
    sample.text += "type: " + node_y.node_type + "\n";
    for (const auto& [key, value] : node_y.attributes) {
        if (!key_selected(cfg.attribute_keys_target, key)) continue;
        sample.text += key + ": " + clip(value, cfg.target_value_budget) + "\n";
    }
    render_hop_sections(g, stats, y, cfg, "y-", exclude_counterpart ? &x : nullptr, sample);
    render_hop_sections(g, stats, x, cfg, "x-", exclude_counterpart ? &y : nullptr, sample);
    return sample;
}

} // namespace ga
