#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ga {

// Binary confusion counts for link prediction. Samples whose prediction could
// not be parsed are counted as wrong (predicted = !truth) and tallied in
// `unparseable` so reports can surface them.
struct BinaryMetrics {
    int64_t true_positives = 0;
    int64_t true_negatives = 0;
    int64_t false_positives = 0;
    int64_t false_negatives = 0;
    int64_t unparseable = 0;

    int64_t total() const {
        return true_positives + true_negatives + false_positives + false_negatives;
    }
    double accuracy() const;
    double precision() const;
    double recall() const;
    double f1() const;
};

struct BinaryOutcome {
    bool truth = false;
    // nullopt means the model response was unparseable.
    std::optional<bool> predicted;
};

BinaryMetrics compute_binary_metrics(const std::vector<BinaryOutcome>& outcomes);

// Multi-class metrics for node classification.
struct ClassCounts {
    int64_t support = 0;
    int64_t correct = 0;
    double accuracy() const { return support == 0 ? 0.0 : double(correct) / double(support); }
};

struct NodeMetrics {
    int64_t total = 0;
    int64_t correct = 0;
    int64_t unparseable = 0;
    std::map<std::string, ClassCounts> per_class;

    double accuracy() const { return total == 0 ? 0.0 : double(correct) / double(total); }
};

struct NodeOutcome {
    std::string truth;
    // nullopt means the model response was unparseable; counts as incorrect.
    std::optional<std::string> predicted;
};

NodeMetrics compute_node_metrics(const std::vector<NodeOutcome>& outcomes);

// F1 from raw confusion counts; returns 0 when precision + recall is 0.
double f1_score(int64_t tp, int64_t fp, int64_t fn);

} // namespace ga
