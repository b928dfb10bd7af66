#include "sbld/diagnosis.hpp"

#include <sstream>

#include "json.hpp"
#include "sbld/errors.hpp"
#include "sbld/util.hpp"

namespace sbld {

using nlohmann::json;

std::set<EventId> DiagnosisReport::retrieved_events() const {
    std::set<EventId> ids;
    for (const auto& cluster : clusters) {
        if (!cluster.retrieved)
            continue;
        for (const auto& e : cluster.members)
            ids.insert(e.event_id);
    }
    return ids;
}

double DiagnosisReport::effort_reduction() const {
    return 1.0 - static_cast<double>(events_retrieved) / static_cast<double>(events_in_log);
}

DiagnosisReport diagnose(const std::string& target_source_id, const CoverageMatrix& matrix,
                         Measure m, std::size_t k, Aggregate aggregate) {
    if (k < 1)
        throw UsageError("diagnose: k must be at least 1");
    const CoverageMatrix::Row* row = matrix.find_row(target_source_id);
    if (row == nullptr || row->verdict != Verdict::Fail)
        throw UsageError("diagnose: target '" + target_source_id +
                         "' is not a failing row of the spectrum; rebuild the spectrum "
                         "with the target included");

    std::vector<double> scores;
    scores.reserve(row->events.size());
    for (EventId id : row->events)
        scores.push_back(score(matrix.primitives(id), m));
    scores = replace_sentinels(std::move(scores));

    std::vector<ScoredEvent> scored;
    scored.reserve(row->events.size());
    for (std::size_t i = 0; i < row->events.size(); ++i)
        scored.push_back({row->events[i], scores[i]});

    DiagnosisReport report;
    report.target = target_source_id;
    report.measure = m;
    report.events_in_log = row->events.size();
    report.threshold_value = threshold(scores);

    auto ranked = rank_clusters(hac_complete(scored, report.threshold_value), aggregate);
    report.retrieved_k = std::min(k, ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        DiagnosisReport::ClusterEntry entry;
        entry.retrieved = i < report.retrieved_k;
        entry.aggregate = ranked[i].aggregate;
        entry.members = std::move(ranked[i].members);
        if (entry.retrieved)
            report.events_retrieved += entry.members.size();
        report.clusters.push_back(std::move(entry));
    }
    return report;
}

std::string report_to_json(const DiagnosisReport& report, const EventVocabulary& vocab) {
    json doc;
    doc["target"] = report.target;
    doc["measure"] = to_string(report.measure);
    doc["threshold"] = report.threshold_value;
    doc["retrieved_k"] = report.retrieved_k;
    doc["events_in_log"] = report.events_in_log;
    doc["events_retrieved"] = report.events_retrieved;
    doc["effort_reduction"] = report.effort_reduction();
    doc["clusters"] = json::array();
    for (const auto& cluster : report.clusters) {
        json entry;
        entry["retrieved"] = cluster.retrieved;
        entry["aggregate"] = cluster.aggregate;
        entry["events"] = json::array();
        for (const auto& e : cluster.members)
            entry["events"].push_back(
                {{"id", e.event_id}, {"score", e.score}, {"text", vocab.text_of(e.event_id)}});
        doc["clusters"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::string report_to_text(const DiagnosisReport& report, const EventVocabulary& vocab) {
    std::ostringstream out;
    out << "target: " << report.target << '\n';
    out << "measure: " << to_string(report.measure) << '\n';
    out << "threshold: " << fmt_sig(report.threshold_value) << '\n';
    out << "events in log: " << report.events_in_log << ", retrieved " << report.events_retrieved
        << " in " << report.retrieved_k << " of " << report.clusters.size()
        << " clusters (effort reduction " << fmt_fixed(report.effort_reduction(), 4) << ")\n";
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        const auto& cluster = report.clusters[i];
        out << "-- cluster " << (i + 1) << (cluster.retrieved ? " [retrieved]" : "")
            << "  aggregate=" << fmt_sig(cluster.aggregate) << "  size=" << cluster.members.size()
            << '\n';
        for (const auto& e : cluster.members) {
            std::string text = vocab.text_of(e.event_id);
            // Keep one event per line in the console dump.
            for (char& c : text)
                if (c == '\n')
                    c = ' ';
            out << "   [" << e.event_id << "] " << fmt_sig(e.score) << "  " << text << '\n';
        }
    }
    return out.str();
}

} // namespace sbld
