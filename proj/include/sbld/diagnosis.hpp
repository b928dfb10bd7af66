#ifndef SBLD_DIAGNOSIS_HPP
#define SBLD_DIAGNOSIS_HPP

#include <set>
#include <string>
#include <vector>

#include "sbld/clustering.hpp"
#include "sbld/spectrum.hpp"

namespace sbld {

// Result of analyzing one target failing log: its events scored against the
// spectrum, clustered by score, clusters ranked, the first k marked
// retrieved.
struct DiagnosisReport {
    struct ClusterEntry {
        bool retrieved = false;
        double aggregate = 0.0;
        std::vector<ScoredEvent> members;
    };

    std::string target;
    Measure measure = Measure::Ochiai;
    double threshold_value = 0.0;
    std::size_t retrieved_k = 0;     // min(requested k, cluster count)
    std::size_t events_in_log = 0;   // distinct events in the target log
    std::size_t events_retrieved = 0;
    std::vector<ClusterEntry> clusters; // highest aggregate first

    std::set<EventId> retrieved_events() const;
    double effort_reduction() const; // 1 - events_retrieved / events_in_log
};

// Scores only the events occurring in the target log, replaces sentinel
// scores, clusters at the uncorrected-standard-deviation threshold and ranks
// the clusters. The target must be one of the matrix's failing rows. Pass
// k = kRetrieveAll to retrieve every cluster.
inline constexpr std::size_t kRetrieveAll = static_cast<std::size_t>(-1);

DiagnosisReport diagnose(const std::string& target_source_id, const CoverageMatrix& matrix,
                         Measure m, std::size_t k = 1, Aggregate aggregate = Aggregate::Mean);

std::string report_to_json(const DiagnosisReport& report, const EventVocabulary& vocab);
std::string report_to_text(const DiagnosisReport& report, const EventVocabulary& vocab);

} // namespace sbld

#endif
