#ifndef SBLD_EVALUATION_HPP
#define SBLD_EVALUATION_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sbld/clustering.hpp"
#include "sbld/diagnosis.hpp"
#include "sbld/spectrum.hpp"

namespace sbld {
namespace evaluation {

// Named set of regex sub-patterns that together identify one known error
// class. A log matches when every sub-pattern matches at least one of its
// abstracted event texts.
struct Signature {
    std::string name;
    std::vector<std::string> sub_patterns;
};

struct SignatureSet {
    std::vector<Signature> signatures;
    std::map<std::string, std::string> test_to_signature; // test name -> signature name

    const Signature* find(const std::string& name) const;
    const Signature* for_test(const std::string& test) const;
};

// File format: {"signatures": [{name, sub_patterns}], "tests": {test: name}}.
SignatureSet load_signatures(const std::string& json_text);
SignatureSet load_signatures_file(const std::string& path);
std::string signatures_to_json(const SignatureSet& set);

bool matches_signature(const AbstractedLog& log, const EventVocabulary& vocab,
                       const Signature& sig);

// Ids of the target's events whose abstracted text matches any sub-pattern.
// Throws UsageError when the log does not satisfy the full signature (such
// logs are excluded from evaluation).
std::set<EventId> ground_truth(const AbstractedLog& log, const EventVocabulary& vocab,
                               const Signature& sig);

// Flags degenerate sub-patterns that match every log of the test set.
std::vector<std::string> lint_signature(const std::vector<AbstractedLog>& test_logs,
                                        const EventVocabulary& vocab, const Signature& sig);

double recall_best(const std::set<EventId>& retrieved, const std::set<EventId>& relevant);
double effort_reduction(std::size_t retrieved_count, std::size_t log_event_count);

// One sweep observation: SBLD run on `target` with the first i failing and
// first j passing logs as spectrum data, scores aggregated as the median
// over the measure set.
struct SweepRecord {
    std::string test;
    std::size_t i = 0;
    std::size_t j = 0;
    std::string target;
    double median_effort_reduction = 0.0;
    double median_recall = 0.0;
};

struct SweepOptions {
    std::vector<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
    std::size_t k = 1;
    Aggregate aggregate = Aggregate::Mean;
    unsigned jobs = 1;
};

// Chronological step-wise growth: for i in 1..|F| and j in 0..|P| run SBLD
// on every log of the failing prefix against the spectrum built from the
// two prefixes. Inputs must be sorted by (produced_at, source_id); targets
// without ground truth are skipped. Records are sorted by (test, i, j,
// target).
std::vector<SweepRecord> sweep(const std::string& test,
                               const std::vector<AbstractedLog>& failing_sorted,
                               const std::vector<AbstractedLog>& passing_sorted,
                               const std::map<std::string, std::set<EventId>>& truth,
                               const SweepOptions& options = {});

// Sorts logs chronologically, ties broken by source id.
void sort_chronologically(std::vector<AbstractedLog>& logs);

enum class EvidenceVariant { Minimal, Median, Maximal };
const char* to_string(EvidenceVariant v);
EvidenceVariant evidence_variant_from_string(const std::string& s);

struct EvidenceSelection {
    std::vector<const AbstractedLog*> failing;
    std::vector<const AbstractedLog*> passing;
};

// Evidence given to the spectrum for one target:
//   minimal: the target plus the chronologically first passing log;
//   median:  the first ceil(|F|/2) failing logs with the target forced in,
//            plus the first ceil(|P|/2) passing logs;
//   maximal: everything.
// Throws UsageError for minimal when there is no passing log.
EvidenceSelection evidence_config(const std::vector<AbstractedLog>& failing_sorted,
                                  const std::vector<AbstractedLog>& passing_sorted,
                                  std::size_t target_index, EvidenceVariant variant);

// Events whose text contains "error", "fault" or "fail" case-insensitively
// (the grep-style search a user would try first).
std::set<EventId> baseline_search(const AbstractedLog& log, const EventVocabulary& vocab);

struct HeatmapCell {
    std::string test;
    std::size_t i = 0;
    std::size_t j = 0;
    double median_effort_reduction = 0.0;
    double median_recall = 0.0;
};

// Medians over all target logs of a sweep cell, sorted by (test, i, j).
std::vector<HeatmapCell> heatmap_cells(const std::vector<SweepRecord>& records);
std::string sweep_to_csv(const std::vector<SweepRecord>& records);
std::string heatmap_to_csv(const std::vector<HeatmapCell>& cells);

} // namespace evaluation
} // namespace sbld

#endif
