#include "ga/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "ga/errors.hpp"
#include "ga/parallel.hpp"
#include "ga/rng.hpp"

namespace ga {

namespace {

std::string pair_key(const NodeId& a, const NodeId& b) {
    // Orientation-free key for "any edge between a and b".
    const NodeId& lo = a <= b ? a : b;
    const NodeId& hi = a <= b ? b : a;
    return lo + '\x1f' + hi;
}

const std::vector<NodeId> kNoNeighbors{};

} // namespace

Graph::Graph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    index_.reserve(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.id.empty()) throw Error(ErrorCode::MalformedRecord, "node with empty id");
        if (n.node_type.empty()) {
            throw Error(ErrorCode::MalformedRecord, "node '" + n.id + "' has empty type");
        }
        std::unordered_set<std::string> keys;
        for (const auto& [k, _] : n.attributes) {
            if (!keys.insert(k).second) {
                throw Error(ErrorCode::MalformedRecord,
                            "node '" + n.id + "' repeats attribute key '" + k + "'");
            }
        }
        if (!index_.emplace(n.id, i).second) {
            throw Error(ErrorCode::DuplicateNodeId, "node id '" + n.id + "' appears twice");
        }
    }
    for (const Edge& e : edges_) {
        if (!index_.count(e.src) || !index_.count(e.dst)) {
            throw Error(ErrorCode::DanglingEdgeEndpoint,
                        "edge (" + e.src + ", " + e.dst + ", " + e.edge_type +
                            ") references a node not in the graph");
        }
        adjacency_[e.src].push_back(e.dst);
        adjacency_[e.dst].push_back(e.src);
        connected_pairs_.insert(pair_key(e.src, e.dst));
    }
}

const Node& Graph::node(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "no node '" + id + "'");
    return nodes_[it->second];
}

const std::vector<NodeId>& Graph::neighbors(const NodeId& id) const {
    if (!index_.count(id)) throw Error(ErrorCode::UnknownNode, "no node '" + id + "'");
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? kNoNeighbors : it->second;
}

std::vector<NodeId> Graph::node_ids_of_type(const std::string& node_type) const {
    std::vector<NodeId> ids;
    for (const Node& n : nodes_) {
        if (n.node_type == node_type) ids.push_back(n.id);
    }
    return ids;
}

std::vector<std::pair<std::string, size_t>> Graph::node_counts_by_type() const {
    std::vector<std::pair<std::string, size_t>> counts;
    std::unordered_map<std::string, size_t> index;
    for (const Node& n : nodes_) {
        auto it = index.find(n.node_type);
        if (it == index.end()) {
            index.emplace(n.node_type, counts.size());
            counts.emplace_back(n.node_type, 1);
        } else {
            counts[it->second].second += 1;
        }
    }
    return counts;
}

bool Graph::has_edge_between(const NodeId& a, const NodeId& b) const {
    return connected_pairs_.count(pair_key(a, b)) > 0;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson parse_line(const std::string& line, size_t line_number, const char* what) {
    try {
        return ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRecord,
                    std::string(what) + " line " + std::to_string(line_number) + ": " + e.what());
    }
}

std::string require_string(const ojson& obj, const char* key, size_t line_number, const char* what) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
        throw Error(ErrorCode::MalformedRecord,
                    std::string(what) + " line " + std::to_string(line_number) +
                        ": missing or empty \"" + key + "\"");
    }
    return obj[key].get<std::string>();
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

} // namespace

Graph load_graph(std::istream& node_source, std::istream& edge_source) {
    std::vector<Node> nodes;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_number = 0;
    while (std::getline(node_source, line)) {
        ++line_number;
        if (blank(line)) continue;
        ojson obj = parse_line(line, line_number, "node file");
        Node n;
        n.id = require_string(obj, "id", line_number, "node file");
        n.node_type = require_string(obj, "type", line_number, "node file");
        if (!seen_ids.insert(n.id).second) {
            throw Error(ErrorCode::DuplicateNodeId,
                        "node file line " + std::to_string(line_number) + ": duplicate id '" +
                            n.id + "'");
        }
        if (obj.contains("attributes")) {
            if (!obj["attributes"].is_object()) {
                throw Error(ErrorCode::MalformedRecord,
                            "node file line " + std::to_string(line_number) +
                                ": \"attributes\" must be an object");
            }
            for (const auto& [key, value] : obj["attributes"].items()) {
                n.attributes.emplace_back(key, value.is_string() ? value.get<std::string>()
                                                                 : value.dump());
            }
        }
        if (obj.contains("label") && !obj["label"].is_null()) {
            if (!obj["label"].is_string()) {
                throw Error(ErrorCode::MalformedRecord,
                            "node file line " + std::to_string(line_number) +
                                ": \"label\" must be a string");
            }
            n.label = obj["label"].get<std::string>();
        }
        nodes.push_back(std::move(n));
    }

    std::vector<Edge> edges;
    line_number = 0;
    while (std::getline(edge_source, line)) {
        ++line_number;
        if (blank(line)) continue;
        ojson obj = parse_line(line, line_number, "edge file");
        Edge e;
        e.src = require_string(obj, "src", line_number, "edge file");
        e.dst = require_string(obj, "dst", line_number, "edge file");
        e.edge_type = require_string(obj, "type", line_number, "edge file");
        if (!seen_ids.count(e.src) || !seen_ids.count(e.dst)) {
            const std::string& missing = seen_ids.count(e.src) ? e.dst : e.src;
            throw Error(ErrorCode::DanglingEdgeEndpoint,
                        "edge file line " + std::to_string(line_number) + ": edge (" + e.src +
                            ", " + e.dst + ", " + e.edge_type + ") references unknown node '" +
                            missing + "'");
        }
        edges.push_back(std::move(e));
    }
    return Graph(std::move(nodes), std::move(edges));
}

Graph load_graph_files(const std::string& node_path, const std::string& edge_path) {
    std::ifstream node_stream(node_path);
    if (!node_stream) throw Error(ErrorCode::MalformedRecord, "cannot open node file " + node_path);
    std::ifstream edge_stream(edge_path);
    if (!edge_stream) throw Error(ErrorCode::MalformedRecord, "cannot open edge file " + edge_path);
    return load_graph(node_stream, edge_stream);
}

DegreeStats degree_stats(const Graph& g, int threads) {
    const auto& nodes = g.nodes();
    std::vector<int64_t> degrees(nodes.size());
    parallel_for(static_cast<int64_t>(nodes.size()), threads, [&](int64_t i) {
        degrees[i] = static_cast<int64_t>(g.neighbors(nodes[i].id).size());
    });

    // Integer sums keep the per-type means exact and order-independent.
    std::unordered_map<std::string, std::pair<int64_t, int64_t>> by_type; // sum, count
    for (size_t i = 0; i < nodes.size(); ++i) {
        auto& [sum, count] = by_type[nodes[i].node_type];
        sum += degrees[i];
        count += 1;
    }

    DegreeStats stats;
    stats.degree.reserve(nodes.size());
    stats.importance.reserve(nodes.size());
    for (auto& [type, acc] : by_type) {
        stats.avg_degree_by_type[type] =
            static_cast<double>(acc.first) / static_cast<double>(acc.second);
    }
    for (size_t i = 0; i < nodes.size(); ++i) {
        stats.degree[nodes[i].id] = degrees[i];
        double avg = stats.avg_degree_by_type[nodes[i].node_type];
        stats.importance[nodes[i].id] =
            avg > 0.0 ? static_cast<double>(degrees[i]) / avg : 0.0;
    }
    return stats;
}

DegreeStats degree_stats_serial(const Graph& g) {
    return degree_stats(g, 1);
}

std::vector<std::pair<NodeId, int>> n_hop_neighbors(const Graph& g, const NodeId& v, int max_hops) {
    if (!g.has_node(v)) throw Error(ErrorCode::UnknownNode, "no node '" + v + "'");
    if (max_hops < 1) throw Error(ErrorCode::InvalidConfig, "hop count must be >= 1");

    std::vector<std::pair<NodeId, int>> result;
    std::unordered_set<NodeId> visited{v};
    std::deque<std::pair<NodeId, int>> frontier{{v, 0}};
    while (!frontier.empty()) {
        auto [id, hop] = frontier.front();
        frontier.pop_front();
        if (hop == max_hops) continue;
        for (const NodeId& next : g.neighbors(id)) {
            if (visited.insert(next).second) {
                result.emplace_back(next, hop + 1);
                frontier.emplace_back(next, hop + 1);
            }
        }
    }
    return result;
}

Split split_dataset(const std::vector<std::string>& sample_ids,
                    double train_ratio, double validation_ratio, double test_ratio,
                    uint64_t seed) {
    if (train_ratio <= 0.0 || validation_ratio <= 0.0 || test_ratio <= 0.0 ||
        std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9) {
        throw Error(ErrorCode::RatioSumInvalid, "ratios must be positive and sum to 1");
    }
    std::vector<std::string> shuffled = sample_ids;
    seeded_shuffle(shuffled, seed);

    const size_t n = shuffled.size();
    const size_t n_validation = static_cast<size_t>(static_cast<double>(n) * validation_ratio);
    const size_t n_test = static_cast<size_t>(static_cast<double>(n) * test_ratio);
    const size_t n_train = n - n_validation - n_test;

    Split split;
    split.seed = seed;
    split.train.assign(shuffled.begin(), shuffled.begin() + n_train);
    split.validation.assign(shuffled.begin() + n_train, shuffled.begin() + n_train + n_validation);
    split.test.assign(shuffled.begin() + n_train + n_validation, shuffled.end());
    return split;
}

std::string split_to_json(const Split& split) {
    nlohmann::ordered_json obj;
    obj["seed"] = split.seed;
    obj["train"] = split.train;
    obj["validation"] = split.validation;
    obj["test"] = split.test;
    return obj.dump();
}

Split split_from_json(const std::string& text) {
    ojson obj = ojson::parse(text);
    Split split;
    split.seed = obj.at("seed").get<uint64_t>();
    split.train = obj.at("train").get<std::vector<std::string>>();
    split.validation = obj.at("validation").get<std::vector<std::string>>();
    split.test = obj.at("test").get<std::vector<std::string>>();
    return split;
}

std::vector<Edge> sample_negative_edges(const Graph& g,
                                        const std::string& src_type,
                                        const std::string& dst_type,
                                        size_t count, uint64_t seed) {
    if (count == 0) return {};
    const std::vector<NodeId> src_ids = g.node_ids_of_type(src_type);
    const std::vector<NodeId> dst_ids = g.node_ids_of_type(dst_type);
    const bool same_type = src_type == dst_type;

    // Free slots = full grid minus connected pairs minus (for same-type) the diagonal.
    size_t connected = 0;
    std::unordered_set<std::string> counted;
    for (const Edge& e : g.edges()) {
        bool forward = g.node(e.src).node_type == src_type && g.node(e.dst).node_type == dst_type;
        bool backward = g.node(e.src).node_type == dst_type && g.node(e.dst).node_type == src_type;
        if ((forward || backward) && e.src != e.dst) {
            if (counted.insert(pair_key(e.src, e.dst)).second) ++connected;
        }
    }
    size_t grid = same_type ? src_ids.size() * (src_ids.size() - 1) / 2
                            : src_ids.size() * dst_ids.size();
    if (grid < connected || count > grid - connected) {
        throw Error(ErrorCode::InsufficientNegativeSpace,
                    "requested " + std::to_string(count) + " negatives but only " +
                        std::to_string(grid > connected ? grid - connected : 0) +
                        " non-connected pairs exist");
    }

    SplitMix64 rng(seed);
    std::vector<Edge> negatives;
    negatives.reserve(count);
    std::unordered_set<std::string> drawn;
    const size_t attempt_cap = std::max<size_t>(100000, 50 * count);
    size_t attempts = 0;
    while (negatives.size() < count && attempts < attempt_cap) {
        ++attempts;
        const NodeId& src = src_ids[rng.next_below(src_ids.size())];
        const NodeId& dst = dst_ids[rng.next_below(dst_ids.size())];
        if (src == dst) continue;
        if (g.has_edge_between(src, dst)) continue;
        // Same-type draws treat (a, b) and (b, a) as one pair.
        if (!drawn.insert(same_type ? pair_key(src, dst) : src + '\x1f' + dst).second) continue;
        negatives.push_back(Edge{src, dst, "negative"});
    }

    if (negatives.size() < count) {
        // Dense region: enumerate the remaining free pairs and draw from them.
        std::vector<Edge> pool;
        std::unordered_set<std::string> pooled;
        for (const NodeId& src : src_ids) {
            for (const NodeId& dst : dst_ids) {
                if (src == dst || g.has_edge_between(src, dst)) continue;
                const std::string key = same_type ? pair_key(src, dst) : src + '\x1f' + dst;
                if (drawn.count(key) || !pooled.insert(key).second) continue;
                pool.push_back(Edge{src, dst, "negative"});
            }
        }
        for (size_t i = pool.size(); i > 1 && negatives.size() < count; --i) {
            size_t j = static_cast<size_t>(rng.next_below(i));
            std::swap(pool[i - 1], pool[j]);
            negatives.push_back(pool[i - 1]);
        }
        if (negatives.size() < count && !pool.empty() && negatives.size() + 1 == count) {
            negatives.push_back(pool[0]);
        }
    }
    return negatives;
}

} // namespace ga
