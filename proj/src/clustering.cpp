#include "sbld/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "sbld/errors.hpp"
#include "sbld/util.hpp"

namespace sbld {

double ScoredCluster::max_score() const {
    return members.front().score;
}

double ScoredCluster::min_score() const {
    return members.back().score;
}

EventId ScoredCluster::min_event_id() const {
    EventId id = members.front().event_id;
    for (const auto& e : members)
        id = std::min(id, e.event_id);
    return id;
}

double threshold(const std::vector<double>& scores) {
    if (scores.empty())
        throw UsageError("threshold: empty score list");
    double mean = 0.0;
    for (double s : scores)
        mean += s;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores)
        var += (s - mean) * (s - mean);
    return std::sqrt(var / static_cast<double>(scores.size()));
}

namespace {

struct Cluster {
    double min_score = 0.0;
    double max_score = 0.0;
    EventId min_id = 0;
    std::vector<ScoredEvent> members;
    int prev = -1;
    int next = -1;
    bool alive = true;
    unsigned version = 0;
};

struct Candidate {
    double distance;
    EventId tie_union_min; // smallest member id across the pair
    EventId tie_other_min; // smallest member id of the other cluster
    int left, right;
    unsigned left_version, right_version;

    bool operator>(const Candidate& o) const {
        if (distance != o.distance)
            return distance > o.distance;
        if (tie_union_min != o.tie_union_min)
            return tie_union_min > o.tie_union_min;
        return tie_other_min > o.tie_other_min;
    }
};

Candidate make_candidate(const std::vector<Cluster>& clusters, int left, int right) {
    const Cluster& a = clusters[left];
    const Cluster& b = clusters[right];
    Candidate c;
    c.distance = b.max_score - a.min_score;
    c.tie_union_min = std::min(a.min_id, b.min_id);
    c.tie_other_min = std::max(a.min_id, b.min_id);
    c.left = left;
    c.right = right;
    c.left_version = a.version;
    c.right_version = b.version;
    return c;
}

} // namespace

std::vector<ScoredCluster> hac_complete(const std::vector<ScoredEvent>& events, double t) {
    if (events.empty())
        throw UsageError("hac_complete: no events to cluster");

    std::vector<ScoredEvent> sorted = events;
    std::sort(sorted.begin(), sorted.end(), [](const ScoredEvent& a, const ScoredEvent& b) {
        if (a.score != b.score)
            return a.score < b.score;
        return a.event_id < b.event_id;
    });

    // Equal scores are at distance 0 and always merge first, so they start
    // out consolidated.
    std::vector<Cluster> clusters;
    for (const ScoredEvent& e : sorted) {
        if (!clusters.empty() && clusters.back().max_score == e.score) {
            Cluster& c = clusters.back();
            c.members.push_back(e);
            c.min_id = std::min(c.min_id, e.event_id);
        } else {
            Cluster c;
            c.min_score = c.max_score = e.score;
            c.min_id = e.event_id;
            c.members.push_back(e);
            clusters.push_back(std::move(c));
        }
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        clusters[i].prev = i == 0 ? -1 : static_cast<int>(i) - 1;
        clusters[i].next = i + 1 == clusters.size() ? -1 : static_cast<int>(i) + 1;
    }

    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> heap;
    for (std::size_t i = 0; i + 1 < clusters.size(); ++i)
        heap.push(make_candidate(clusters, static_cast<int>(i), static_cast<int>(i) + 1));

    int head = clusters.empty() ? -1 : 0;
    while (!heap.empty()) {
        Candidate c = heap.top();
        heap.pop();
        Cluster& a = clusters[c.left];
        Cluster& b = clusters[c.right];
        if (!a.alive || !b.alive || a.version != c.left_version || b.version != c.right_version)
            continue;
        if (c.distance > t)
            break;

        a.max_score = b.max_score;
        a.min_id = std::min(a.min_id, b.min_id);
        a.members.insert(a.members.end(), b.members.begin(), b.members.end());
        a.version++;
        b.alive = false;
        b.members.clear();
        a.next = b.next;
        if (b.next != -1)
            clusters[b.next].prev = c.left;
        if (a.prev != -1)
            heap.push(make_candidate(clusters, a.prev, c.left));
        if (a.next != -1)
            heap.push(make_candidate(clusters, c.left, a.next));
    }

    std::vector<ScoredCluster> out;
    for (int i = head; i != -1; i = clusters[i].next) {
        Cluster& c = clusters[i];
        ScoredCluster sc;
        sc.members = std::move(c.members);
        std::sort(sc.members.begin(), sc.members.end(),
                  [](const ScoredEvent& x, const ScoredEvent& y) {
                      if (x.score != y.score)
                          return x.score > y.score;
                      return x.event_id < y.event_id;
                  });
        double sum = 0.0;
        for (const auto& e : sc.members)
            sum += e.score;
        sc.aggregate = sum / static_cast<double>(sc.members.size());
        out.push_back(std::move(sc));
    }
    return out;
}

const char* to_string(Aggregate a) {
    return a == Aggregate::Mean ? "mean" : "max";
}

Aggregate aggregate_from_string(const std::string& s) {
    std::string n = to_lower(trim(s));
    if (n == "mean")
        return Aggregate::Mean;
    if (n == "max")
        return Aggregate::Max;
    throw ConfigError("unknown aggregate '" + s + "' (expected mean or max)");
}

std::vector<ScoredCluster> rank_clusters(std::vector<ScoredCluster> partition,
                                         Aggregate aggregate) {
    std::sort(partition.begin(), partition.end(),
              [aggregate](const ScoredCluster& a, const ScoredCluster& b) {
                  double ka = aggregate == Aggregate::Mean ? a.aggregate : a.max_score();
                  double kb = aggregate == Aggregate::Mean ? b.aggregate : b.max_score();
                  if (ka != kb)
                      return ka > kb;
                  if (a.max_score() != b.max_score())
                      return a.max_score() > b.max_score();
                  return a.min_event_id() < b.min_event_id();
              });
    return partition;
}

} // namespace sbld
