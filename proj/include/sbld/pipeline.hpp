#ifndef SBLD_PIPELINE_HPP
#define SBLD_PIPELINE_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbld/clustering.hpp"
#include "sbld/corpus.hpp"
#include "sbld/evaluation.hpp"
#include "sbld/spectrum.hpp"

namespace sbld {
namespace pipeline {

// Logs of one test, both sides sorted chronologically.
struct TestLogs {
    std::vector<AbstractedLog> failing;
    std::vector<AbstractedLog> passing;
};

std::map<std::string, TestLogs> group_by_test(std::vector<AbstractedLog> logs);

// abstract: raw corpus -> vocabulary.json + abstracted.jsonl + one
// spectrum/<test>.matrix.csv per test.
struct AbstractOptions {
    std::filesystem::path corpus_root;
    std::optional<std::filesystem::path> config_path;
    std::optional<std::filesystem::path> manifest_path;
    std::filesystem::path out_dir;
};

struct AbstractResult {
    std::size_t logs = 0;
    std::size_t vocabulary_size = 0;
    std::vector<std::string> tests;
};

AbstractResult run_abstract(const AbstractOptions& options, std::ostream& info);

// diagnose: reads the artifacts written by run_abstract.
struct DiagnoseOptions {
    std::filesystem::path spectrum_dir;
    std::string target;
    std::optional<std::string> test; // inferred from the target id when absent
    std::vector<Measure> measures{Measure::Ochiai};
    std::size_t k = 1;
    Aggregate aggregate = Aggregate::Mean;
    std::optional<evaluation::EvidenceVariant> variant; // default: persisted matrix
    std::optional<std::filesystem::path> out_dir;       // JSON reports
};

void run_diagnose(const DiagnoseOptions& options, std::ostream& text_out);

// evaluate: the full experimental pipeline over a corpus with signatures.
struct EvaluateOptions {
    std::filesystem::path corpus_root;
    std::optional<std::filesystem::path> config_path;
    std::optional<std::filesystem::path> manifest_path;
    std::filesystem::path signatures_path;
    std::filesystem::path out_dir;
    std::vector<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
    std::size_t k = 1;
    Aggregate aggregate = Aggregate::Mean;
    unsigned jobs = 1;
};

struct EvaluateOutcome {
    std::size_t admitted_targets = 0;
    std::size_t excluded_logs = 0;
    std::size_t comparison_rows = 0;
};

// Writes sweep.csv, heatmap.csv, per_log_scores.csv and compare.csv under
// out_dir. Progress goes to `info`, exclusion notices and lint warnings to
// `warn`.
EvaluateOutcome run_evaluate(const EvaluateOptions& options, std::ostream& info,
                             std::ostream& warn);

} // namespace pipeline
} // namespace sbld

#endif
