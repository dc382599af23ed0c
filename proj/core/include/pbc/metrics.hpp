#ifndef PBC_METRICS_HPP
#define PBC_METRICS_HPP

#include <cstdint>

#include "pbc/types.hpp"

namespace pbc {

struct EvalReport {
    double ac_percent = 0.0;
    double mi_percent = 0.0;
    std::uint64_t agree_together = 0;
    std::uint64_t agree_apart = 0;
    std::uint64_t disagree = 0;
};

/// Pairwise-agreement accuracy in percent (Rand index * 100): over all
/// unordered sample pairs, the share where both partitions agree on
/// same-cluster versus different-cluster.
double accuracy(const Labels& pred, const Labels& truth);

/// Normalized mutual information in percent, I / sqrt(H H) with natural
/// logs. 100 exactly when the partitions match up to relabeling; 0 when a
/// zero-entropy partition faces a differing one.
double mutual_information(const Labels& pred, const Labels& truth);

EvalReport evaluate(const Labels& pred, const Labels& truth);

/// Matched-label accuracy: best fraction of samples explained by a
/// one-to-one cluster correspondence (optimal assignment on the
/// contingency table).
double best_match_accuracy(const Labels& pred, const Labels& truth);

}  // namespace pbc

#endif  // PBC_METRICS_HPP
