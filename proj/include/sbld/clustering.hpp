#ifndef SBLD_CLUSTERING_HPP
#define SBLD_CLUSTERING_HPP

#include <string>
#include <vector>

#include "sbld/log_abstraction.hpp"

namespace sbld {

struct ScoredEvent {
    EventId event_id = 0;
    double score = 0.0; // finite; sentinels already replaced upstream
};

// Cluster of similarly scored events. `aggregate` is the arithmetic mean of
// the member scores; the max-pairwise score difference never exceeds the
// clustering threshold.
struct ScoredCluster {
    std::vector<ScoredEvent> members; // sorted by score desc, then id asc
    double aggregate = 0.0;

    double max_score() const;
    double min_score() const;
    EventId min_event_id() const;
};

// Uncorrected sample standard deviation sqrt((1/N) * sum (x - mean)^2).
double threshold(const std::vector<double>& scores);

// Complete-linkage agglomerative clustering over 1-D scores: repeatedly
// merge the pair of clusters with the smallest complete-linkage distance
// while that distance does not exceed t. Equal-distance candidates merge in
// order of their smallest member event id (then the other cluster's smallest
// id), which makes the partition deterministic. Returned clusters are in
// ascending score order.
std::vector<ScoredCluster> hac_complete(const std::vector<ScoredEvent>& events, double t);

enum class Aggregate { Mean, Max };
const char* to_string(Aggregate a);
Aggregate aggregate_from_string(const std::string& s);

// Orders clusters by decreasing aggregate interestingness. Ties fall back to
// the higher max member score, then the smallest member event id.
std::vector<ScoredCluster> rank_clusters(std::vector<ScoredCluster> partition,
                                         Aggregate aggregate = Aggregate::Mean);

} // namespace sbld

#endif
