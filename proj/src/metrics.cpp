#include "ga/metrics.hpp"

namespace ga {

double BinaryMetrics::accuracy() const {
    const int64_t n = total();
    return n == 0 ? 0.0 : double(true_positives + true_negatives) / double(n);
}

double BinaryMetrics::precision() const {
    const int64_t denom = true_positives + false_positives;
    return denom == 0 ? 0.0 : double(true_positives) / double(denom);
}

double BinaryMetrics::recall() const {
    const int64_t denom = true_positives + false_negatives;
    return denom == 0 ? 0.0 : double(true_positives) / double(denom);
}

double BinaryMetrics::f1() const {
    const double p = precision();
    const double r = recall();
    return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double f1_score(int64_t tp, int64_t fp, int64_t fn) {
    const double p = (tp + fp) == 0 ? 0.0 : double(tp) / double(tp + fp);
    const double r = (tp + fn) == 0 ? 0.0 : double(tp) / double(tp + fn);
    return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

BinaryMetrics compute_binary_metrics(const std::vector<BinaryOutcome>& outcomes) {
    BinaryMetrics m;
    for (const auto& o : outcomes) {
        // An unparseable answer is scored as the wrong prediction.
        const bool predicted = o.predicted.has_value() ? *o.predicted : !o.truth;
        if (!o.predicted.has_value()) m.unparseable += 1;
        if (o.truth && predicted) m.true_positives += 1;
        else if (!o.truth && !predicted) m.true_negatives += 1;
        else if (!o.truth && predicted) m.false_positives += 1;
        else m.false_negatives += 1;
    }
    return m;
}

NodeMetrics compute_node_metrics(const std::vector<NodeOutcome>& outcomes) {
    NodeMetrics m;
    for (const auto& o : outcomes) {
        m.total += 1;
        auto& cls = m.per_class[o.truth];
        cls.support += 1;
        if (!o.predicted.has_value()) {
            m.unparseable += 1;
            continue;
        }
        if (*o.predicted == o.truth) {
            m.correct += 1;
            cls.correct += 1;
        }
    }
    return m;
}

} // namespace ga
