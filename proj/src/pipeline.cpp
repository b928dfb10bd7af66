#include "sbld/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sbld/diagnosis.hpp"
#include "sbld/errors.hpp"
#include "sbld/stats.hpp"
#include "sbld/util.hpp"

namespace sbld {
namespace pipeline {

namespace fs = std::filesystem;
using evaluation::EvidenceVariant;

std::map<std::string, TestLogs> group_by_test(std::vector<AbstractedLog> logs) {
    std::map<std::string, TestLogs> grouped;
    for (auto& log : logs) {
        TestLogs& bucket = grouped[log.test_name()];
        (log.verdict == Verdict::Fail ? bucket.failing : bucket.passing)
            .push_back(std::move(log));
    }
    for (auto& [test, bucket] : grouped) {
        evaluation::sort_chronologically(bucket.failing);
        evaluation::sort_chronologically(bucket.passing);
    }
    return grouped;
}

namespace {

AbstractionConfig load_config_or_default(const std::optional<fs::path>& path) {
    if (path)
        return load_abstraction_config_file(path->string());
    return default_abstraction_config();
}

std::vector<AbstractedLog> abstract_corpus(const fs::path& corpus_root,
                                           const std::optional<fs::path>& manifest_path,
                                           const AbstractionConfig& config,
                                           EventVocabulary& vocab) {
    // Interning order is the sorted source-id order, which keeps event ids
    // stable across reruns.
    std::vector<AbstractedLog> logs;
    for (const CorpusEntry& entry : scan_corpus(corpus_root, manifest_path))
        logs.push_back(abstract_log(read_raw_log(entry), config, vocab));
    return logs;
}

fs::path matrix_path(const fs::path& out_dir, const std::string& test) {
    return out_dir / "spectrum" / (test + ".matrix.csv");
}

} // namespace

AbstractResult run_abstract(const AbstractOptions& options, std::ostream& info) {
    AbstractionConfig config = load_config_or_default(options.config_path);
    EventVocabulary vocab;
    std::vector<AbstractedLog> logs =
        abstract_corpus(options.corpus_root, options.manifest_path, config, vocab);

    fs::create_directories(options.out_dir);
    fs::create_directories(options.out_dir / "spectrum");
    vocab.save((options.out_dir / "vocabulary.json").string());
    save_abstracted_logs(logs, (options.out_dir / "abstracted.jsonl").string());

    AbstractResult result;
    result.logs = logs.size();
    result.vocabulary_size = vocab.size();
    for (const auto& [test, bucket] : group_by_test(std::move(logs))) {
        auto matrix = CoverageMatrix::build(bucket.failing, bucket.passing);
        matrix.save_csv(matrix_path(options.out_dir, test).string());
        result.tests.push_back(test);
    }
    info << "abstracted " << result.logs << " logs over " << result.vocabulary_size
         << " distinct events into " << options.out_dir.string() << " (" << result.tests.size()
         << " tests)\n";
    return result;
}

namespace {

CoverageMatrix build_from_selection(const evaluation::EvidenceSelection& selection) {
    return CoverageMatrix::build(selection.failing, selection.passing);
}

} // namespace

void run_diagnose(const DiagnoseOptions& options, std::ostream& text_out) {
    fs::path vocab_path = options.spectrum_dir / "vocabulary.json";
    if (!fs::exists(vocab_path))
        throw ConfigError("no spectrum database at '" + options.spectrum_dir.string() +
                          "'; run `sbld abstract` on the corpus first");
    EventVocabulary vocab = EventVocabulary::load(vocab_path.string());

    std::string test;
    if (options.test) {
        test = *options.test;
    } else {
        auto pos = options.target.find('/');
        if (pos == std::string::npos)
            throw ConfigError("cannot infer the test from target '" + options.target +
                              "'; pass --test");
        test = options.target.substr(0, pos);
    }

    CoverageMatrix matrix;
    if (options.variant) {
        fs::path jsonl = options.spectrum_dir / "abstracted.jsonl";
        if (!fs::exists(jsonl))
            throw ConfigError("no abstracted logs at '" + jsonl.string() +
                              "'; run `sbld abstract` on the corpus first");
        auto grouped = group_by_test(load_abstracted_logs(jsonl.string()));
        auto it = grouped.find(test);
        if (it == grouped.end())
            throw ConfigError("test '" + test + "' not found in the spectrum database");
        const TestLogs& bucket = it->second;
        std::size_t target_index = bucket.failing.size();
        for (std::size_t i = 0; i < bucket.failing.size(); ++i)
            if (bucket.failing[i].source_id == options.target)
                target_index = i;
        if (target_index == bucket.failing.size())
            throw UsageError("diagnose: target '" + options.target +
                             "' is not a failing log of test '" + test +
                             "'; rebuild the spectrum with the target included");
        matrix = build_from_selection(evaluation::evidence_config(
            bucket.failing, bucket.passing, target_index, *options.variant));
    } else {
        fs::path mpath = matrix_path(options.spectrum_dir, test);
        if (!fs::exists(mpath))
            throw ConfigError("no spectrum matrix for test '" + test + "' at '" +
                              mpath.string() + "'; run `sbld abstract` on the corpus first");
        matrix = CoverageMatrix::load_csv(mpath.string());
    }

    if (options.out_dir)
        fs::create_directories(*options.out_dir);
    for (Measure m : options.measures) {
        DiagnosisReport report =
            diagnose(options.target, matrix, m, options.k, options.aggregate);
        text_out << report_to_text(report, vocab);
        if (options.out_dir) {
            std::string stem = options.target;
            std::replace(stem.begin(), stem.end(), '/', '_');
            fs::path out = *options.out_dir / ("diagnosis_" + stem + "_" + to_string(m) + ".json");
            std::ofstream file(out, std::ios::binary);
            if (!file)
                throw ConfigError("cannot write report '" + out.string() + "'");
            file << report_to_json(report, vocab);
        }
    }
}

namespace {

struct PerLogScore {
    std::string test;
    std::string target;
    std::string variant; // pattern_search | minimal | median | maximal
    std::string metric;  // effort_reduction | recall
    double score = 0.0;
    std::string flag;
};

const char* kVariantOrder[] = {"pattern_search", "minimal", "median", "maximal"};
const char* kMetricOrder[] = {"effort_reduction", "recall"};

std::size_t variant_rank(const std::string& v) {
    for (std::size_t i = 0; i < std::size(kVariantOrder); ++i)
        if (v == kVariantOrder[i])
            return i;
    return std::size(kVariantOrder);
}

std::string per_log_scores_to_csv(std::vector<PerLogScore> rows) {
    std::sort(rows.begin(), rows.end(), [](const PerLogScore& a, const PerLogScore& b) {
        return std::make_tuple(a.test, a.target, variant_rank(a.variant), a.metric) <
               std::make_tuple(b.test, b.target, variant_rank(b.variant), b.metric);
    });
    std::ostringstream out;
    out << "test,target,variant,metric,score,flag\n";
    for (const auto& r : rows)
        out << csv_field(r.test) << ',' << csv_field(r.target) << ',' << r.variant << ','
            << r.metric << ',' << fmt_fixed(r.score, 6) << ',' << r.flag << '\n';
    return out.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << contents;
}

} // namespace

EvaluateOutcome run_evaluate(const EvaluateOptions& options, std::ostream& info,
                             std::ostream& warn) {
    AbstractionConfig config = load_config_or_default(options.config_path);
    evaluation::SignatureSet signatures =
        evaluation::load_signatures_file(options.signatures_path.string());
    EventVocabulary vocab;
    auto grouped = group_by_test(
        abstract_corpus(options.corpus_root, options.manifest_path, config, vocab));

    fs::create_directories(options.out_dir);
    EvaluateOutcome outcome;
    std::vector<evaluation::SweepRecord> all_records;
    std::vector<PerLogScore> score_rows;
    // variant -> (test, target) -> score, used for the paired comparisons
    std::map<std::string, std::map<std::pair<std::string, std::string>, double>> er_scores,
        recall_scores;

    evaluation::SweepOptions sweep_options;
    sweep_options.measures = options.measures;
    sweep_options.k = options.k;
    sweep_options.aggregate = options.aggregate;
    sweep_options.jobs = options.jobs;

    for (const auto& [test, bucket] : grouped) {
        const evaluation::Signature* sig = signatures.for_test(test);
        if (sig == nullptr) {
            warn << "warning: test '" << test << "' has no signature mapping; skipped\n";
            continue;
        }

        std::vector<AbstractedLog> all_logs = bucket.failing;
        all_logs.insert(all_logs.end(), bucket.passing.begin(), bucket.passing.end());
        for (const std::string& w : evaluation::lint_signature(all_logs, vocab, *sig))
            warn << "warning: " << w << '\n';

        std::map<std::string, std::set<EventId>> truth;
        for (const auto& log : bucket.failing) {
            if (!evaluation::matches_signature(log, vocab, *sig)) {
                warn << "notice: log '" << log.source_id << "' does not satisfy signature '"
                     << sig->name << "' in full; excluded from evaluation\n";
                ++outcome.excluded_logs;
                continue;
            }
            auto relevant = evaluation::ground_truth(log, vocab, *sig);
            if (relevant.empty()) {
                ++outcome.excluded_logs;
                continue;
            }
            truth[log.source_id] = std::move(relevant);
        }
        if (truth.empty()) {
            warn << "warning: test '" << test << "' has no admissible failing logs\n";
            continue;
        }
        outcome.admitted_targets += truth.size();

        auto records =
            evaluation::sweep(test, bucket.failing, bucket.passing, truth, sweep_options);
        all_records.insert(all_records.end(), records.begin(), records.end());

        for (std::size_t t = 0; t < bucket.failing.size(); ++t) {
            const AbstractedLog& target = bucket.failing[t];
            auto truth_it = truth.find(target.source_id);
            if (truth_it == truth.end())
                continue;
            const std::set<EventId>& relevant = truth_it->second;
            std::set<EventId> distinct(target.events.begin(), target.events.end());
            auto key = std::make_pair(test, target.source_id);

            // Textual baseline.
            {
                auto retrieved = evaluation::baseline_search(target, vocab);
                double er, recall;
                std::string flag;
                if (retrieved.empty()) {
                    er = 1.0;
                    recall = 0.0;
                    flag = "empty_retrieval";
                } else {
                    er = evaluation::effort_reduction(retrieved.size(), distinct.size());
                    recall = evaluation::recall_best(retrieved, relevant);
                }
                score_rows.push_back(
                    {test, target.source_id, "pattern_search", "effort_reduction", er, flag});
                score_rows.push_back(
                    {test, target.source_id, "pattern_search", "recall", recall, flag});
                er_scores["pattern_search"][key] = er;
                recall_scores["pattern_search"][key] = recall;
            }

            for (EvidenceVariant variant : {EvidenceVariant::Minimal, EvidenceVariant::Median,
                                            EvidenceVariant::Maximal}) {
                if (variant == EvidenceVariant::Minimal && bucket.passing.empty()) {
                    warn << "warning: test '" << test
                         << "': minimal evidence unavailable (no passing logs)\n";
                    continue;
                }
                auto matrix = build_from_selection(
                    evaluation::evidence_config(bucket.failing, bucket.passing, t, variant));
                std::vector<double> ers, recalls;
                for (Measure m : options.measures) {
                    auto report =
                        diagnose(target.source_id, matrix, m, options.k, options.aggregate);
                    ers.push_back(report.effort_reduction());
                    recalls.push_back(
                        evaluation::recall_best(report.retrieved_events(), relevant));
                }
                double er = median(ers);
                double recall = median(recalls);
                const char* name = to_string(variant);
                score_rows.push_back(
                    {test, target.source_id, name, "effort_reduction", er, ""});
                score_rows.push_back({test, target.source_id, name, "recall", recall, ""});
                er_scores[name][key] = er;
                recall_scores[name][key] = recall;
            }
        }
    }

    write_file(options.out_dir / "sweep.csv", evaluation::sweep_to_csv(all_records));
    write_file(options.out_dir / "heatmap.csv",
               evaluation::heatmap_to_csv(evaluation::heatmap_cells(all_records)));
    write_file(options.out_dir / "per_log_scores.csv", per_log_scores_to_csv(score_rows));

    // Pairwise comparisons: every variant pair on both quality measures,
    // paired per failing log, Holm-corrected as one family.
    struct ComparisonRow {
        std::string variant1, variant2, metric;
        double statistic = 0.0, a12 = 0.0, a21 = 0.0, p_raw = 1.0, p_holm = 1.0;
    };
    std::vector<ComparisonRow> comparisons;
    std::vector<double> raw_ps;
    for (const char* metric : kMetricOrder) {
        auto& scores = std::string(metric) == "effort_reduction" ? er_scores : recall_scores;
        for (std::size_t v1 = 0; v1 < std::size(kVariantOrder); ++v1) {
            for (std::size_t v2 = v1 + 1; v2 < std::size(kVariantOrder); ++v2) {
                const auto& s1 = scores[kVariantOrder[v1]];
                const auto& s2 = scores[kVariantOrder[v2]];
                std::vector<double> xs, ys;
                for (const auto& [key, value] : s1) {
                    auto it = s2.find(key);
                    if (it == s2.end())
                        continue;
                    xs.push_back(value);
                    ys.push_back(it->second);
                }
                if (xs.empty()) {
                    warn << "warning: no paired observations for " << kVariantOrder[v1]
                         << " vs " << kVariantOrder[v2] << " on " << metric << "; skipped\n";
                    continue;
                }
                std::vector<std::pair<double, double>> pairs;
                for (std::size_t i = 0; i < xs.size(); ++i)
                    pairs.emplace_back(xs[i], ys[i]);
                auto wilcoxon = stats::wilcoxon_pratt(pairs);
                ComparisonRow row;
                row.variant1 = kVariantOrder[v1];
                row.variant2 = kVariantOrder[v2];
                row.metric = metric;
                row.statistic = wilcoxon.statistic;
                row.a12 = stats::a12(xs, ys);
                row.a21 = 1.0 - row.a12;
                row.p_raw = wilcoxon.p_value;
                comparisons.push_back(std::move(row));
                raw_ps.push_back(wilcoxon.p_value);
            }
        }
    }
    std::vector<double> adjusted = stats::holm(raw_ps);
    for (std::size_t i = 0; i < comparisons.size(); ++i)
        comparisons[i].p_holm = adjusted[i];

    std::ostringstream compare_csv;
    compare_csv << "variant1,variant2,metric,statistic,a12,a21,p_raw,p_holm,significant\n";
    for (const auto& row : comparisons)
        compare_csv << row.variant1 << ',' << row.variant2 << ',' << row.metric << ','
                    << fmt_fixed(row.statistic, 1) << ',' << fmt_fixed(row.a12, 6) << ','
                    << fmt_fixed(row.a21, 6) << ',' << fmt_sig(row.p_raw) << ','
                    << fmt_sig(row.p_holm) << ','
                    << (row.p_holm < 0.05 ? "true" : "false") << '\n';
    write_file(options.out_dir / "compare.csv", compare_csv.str());
    outcome.comparison_rows = comparisons.size();

    info << "evaluated " << outcome.admitted_targets << " failing logs ("
         << outcome.excluded_logs << " excluded); " << all_records.size()
         << " sweep records, " << outcome.comparison_rows << " statistical comparisons\n";
    info << "wrote sweep.csv, heatmap.csv, per_log_scores.csv, compare.csv to "
         << options.out_dir.string() << '\n';
    return outcome;
}

} // namespace pipeline
} // namespace sbld
