#include "sbld/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "sbld/errors.hpp"
#include "sbld/util.hpp"

namespace sbld {
namespace evaluation {

using nlohmann::json;

const Signature* SignatureSet::find(const std::string& name) const {
    for (const auto& sig : signatures)
        if (sig.name == name)
            return &sig;
    return nullptr;
}

const Signature* SignatureSet::for_test(const std::string& test) const {
    auto it = test_to_signature.find(test);
    if (it == test_to_signature.end())
        return nullptr;
    return find(it->second);
}

SignatureSet load_signatures(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("signatures: invalid JSON: ") + e.what());
    }
    SignatureSet set;
    try {
        for (const auto& entry : doc.at("signatures")) {
            Signature sig;
            sig.name = entry.at("name").get<std::string>();
            sig.sub_patterns = entry.at("sub_patterns").get<std::vector<std::string>>();
            if (sig.sub_patterns.empty())
                throw ConfigError("signature '" + sig.name + "' has no sub-patterns");
            set.signatures.push_back(std::move(sig));
        }
        if (doc.contains("tests"))
            for (const auto& [test, name] : doc.at("tests").items())
                set.test_to_signature[test] = name.get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("signatures: missing field: ") + e.what());
    }
    for (const auto& [test, name] : set.test_to_signature)
        if (set.find(name) == nullptr)
            throw ConfigError("signatures: test '" + test + "' maps to unknown signature '" +
                              name + "'");
    for (const auto& sig : set.signatures)
        for (const auto& pattern : sig.sub_patterns) {
            try {
                std::regex re(pattern, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw ConfigError("signature '" + sig.name + "': invalid sub-pattern '" +
                                  pattern + "': " + e.what());
            }
        }
    return set;
}

SignatureSet load_signatures_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("signatures: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return load_signatures(text.str());
}

std::string signatures_to_json(const SignatureSet& set) {
    json doc;
    doc["signatures"] = json::array();
    for (const auto& sig : set.signatures)
        doc["signatures"].push_back({{"name", sig.name}, {"sub_patterns", sig.sub_patterns}});
    doc["tests"] = json::object();
    for (const auto& [test, name] : set.test_to_signature)
        doc["tests"][test] = name;
    return doc.dump(2) + "\n";
}

namespace {

std::vector<std::regex> compile_sub_patterns(const Signature& sig) {
    std::vector<std::regex> res;
    res.reserve(sig.sub_patterns.size());
    for (const auto& pattern : sig.sub_patterns)
        res.emplace_back(pattern, std::regex::ECMAScript);
    return res;
}

std::set<EventId> distinct_events(const AbstractedLog& log) {
    return {log.events.begin(), log.events.end()};
}

} // namespace

bool matches_signature(const AbstractedLog& log, const EventVocabulary& vocab,
                       const Signature& sig) {
    auto res = compile_sub_patterns(sig);
    auto events = distinct_events(log);
    for (const auto& re : res) {
        bool hit = false;
        for (EventId id : events)
            if (std::regex_search(vocab.text_of(id), re)) {
                hit = true;
                break;
            }
        if (!hit)
            return false;
    }
    return true;
}

std::set<EventId> ground_truth(const AbstractedLog& log, const EventVocabulary& vocab,
                               const Signature& sig) {
    if (!matches_signature(log, vocab, sig))
        throw UsageError("log '" + log.source_id + "' does not satisfy signature '" + sig.name +
                         "' in full; excluded from evaluation");
    std::set<EventId> relevant;
    auto res = compile_sub_patterns(sig);
    for (EventId id : distinct_events(log))
        for (const auto& re : res)
            if (std::regex_search(vocab.text_of(id), re)) {
                relevant.insert(id);
                break;
            }
    return relevant;
}

std::vector<std::string> lint_signature(const std::vector<AbstractedLog>& test_logs,
                                        const EventVocabulary& vocab, const Signature& sig) {
    std::vector<std::string> warnings;
    if (test_logs.empty())
        return warnings;
    for (std::size_t p = 0; p < sig.sub_patterns.size(); ++p) {
        std::regex re(sig.sub_patterns[p], std::regex::ECMAScript);
        std::size_t matched = 0;
        for (const auto& log : test_logs) {
            for (EventId id : distinct_events(log))
                if (std::regex_search(vocab.text_of(id), re)) {
                    ++matched;
                    break;
                }
        }
        if (matched == test_logs.size())
            warnings.push_back("signature '" + sig.name + "' sub-pattern " + std::to_string(p) +
                               " ('" + sig.sub_patterns[p] +
                               "') matches every log in the test set");
    }
    return warnings;
}

double recall_best(const std::set<EventId>& retrieved, const std::set<EventId>& relevant) {
    if (relevant.empty())
        throw UsageError("recall: empty relevant set; log is excluded from evaluation");
    std::size_t hits = 0;
    for (EventId id : relevant)
        hits += retrieved.count(id);
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double effort_reduction(std::size_t retrieved_count, std::size_t log_event_count) {
    if (retrieved_count < 1 || retrieved_count > log_event_count)
        throw UsageError("effort_reduction: need 1 <= retrieved (" +
                         std::to_string(retrieved_count) + ") <= events in log (" +
                         std::to_string(log_event_count) + ")");
    return 1.0 - static_cast<double>(retrieved_count) / static_cast<double>(log_event_count);
}

void sort_chronologically(std::vector<AbstractedLog>& logs) {
    std::stable_sort(logs.begin(), logs.end(), [](const AbstractedLog& a, const AbstractedLog& b) {
        if (a.produced_at != b.produced_at)
            return a.produced_at < b.produced_at;
        return a.source_id < b.source_id;
    });
}

namespace {

struct CellResult {
    std::vector<SweepRecord> records;
};

void run_cells(std::size_t cell_count, unsigned jobs,
               const std::function<void(std::size_t)>& run) {
    if (jobs <= 1) {
        for (std::size_t c = 0; c < cell_count; ++c)
            run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    unsigned count = std::min<std::size_t>(jobs, cell_count ? cell_count : 1);
    for (unsigned w = 0; w < count; ++w)
        workers.emplace_back([&]() {
            while (true) {
                std::size_t c = next.fetch_add(1);
                if (c >= cell_count)
                    return;
                run(c);
            }
        });
    for (auto& worker : workers)
        worker.join();
}

} // namespace

std::vector<SweepRecord> sweep(const std::string& test,
                               const std::vector<AbstractedLog>& failing_sorted,
                               const std::vector<AbstractedLog>& passing_sorted,
                               const std::map<std::string, std::set<EventId>>& truth,
                               const SweepOptions& options) {
    const std::size_t F = failing_sorted.size();
    const std::size_t P = passing_sorted.size();
    if (F == 0)
        return {};

    // One cell per (i, j) pair; i = 0 would have no targets.
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 1; i <= F; ++i)
        for (std::size_t j = 0; j <= P; ++j)
            cells.emplace_back(i, j);
    std::vector<CellResult> results(cells.size());

    run_cells(cells.size(), options.jobs, [&](std::size_t c) {
        const auto [i, j] = cells[c];
        auto matrix = CoverageMatrix::build(
            std::span<const AbstractedLog>(failing_sorted.data(), i),
            std::span<const AbstractedLog>(passing_sorted.data(), j));
        for (std::size_t t = 0; t < i; ++t) {
            const AbstractedLog& target = failing_sorted[t];
            auto truth_it = truth.find(target.source_id);
            if (truth_it == truth.end() || truth_it->second.empty())
                continue; // no ground truth; not evaluated
            std::vector<double> ers, recalls;
            for (Measure m : options.measures) {
                auto report = diagnose(target.source_id, matrix, m, options.k,
                                       options.aggregate);
                ers.push_back(report.effort_reduction());
                recalls.push_back(recall_best(report.retrieved_events(), truth_it->second));
            }
            SweepRecord record;
            record.test = test;
            record.i = i;
            record.j = j;
            record.target = target.source_id;
            record.median_effort_reduction = median(ers);
            record.median_recall = median(recalls);
            results[c].records.push_back(std::move(record));
        }
    });

    std::vector<SweepRecord> records;
    for (auto& cell : results)
        for (auto& record : cell.records)
            records.push_back(std::move(record));
    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return std::tie(a.test, a.i, a.j, a.target) < std::tie(b.test, b.i, b.j, b.target);
    });
    return records;
}

const char* to_string(EvidenceVariant v) {
    switch (v) {
    case EvidenceVariant::Minimal: return "minimal";
    case EvidenceVariant::Median: return "median";
    case EvidenceVariant::Maximal: return "maximal";
    }
    return "?";
}

EvidenceVariant evidence_variant_from_string(const std::string& s) {
    std::string n = to_lower(trim(s));
    if (n == "minimal")
        return EvidenceVariant::Minimal;
    if (n == "median")
        return EvidenceVariant::Median;
    if (n == "maximal")
        return EvidenceVariant::Maximal;
    throw ConfigError("unknown evidence variant '" + s + "'");
}

EvidenceSelection evidence_config(const std::vector<AbstractedLog>& failing_sorted,
                                  const std::vector<AbstractedLog>& passing_sorted,
                                  std::size_t target_index, EvidenceVariant variant) {
    if (target_index >= failing_sorted.size())
        throw UsageError("evidence_config: target index out of range");
    EvidenceSelection out;
    switch (variant) {
    case EvidenceVariant::Minimal: {
        if (passing_sorted.empty())
            throw UsageError("evidence_config: minimal evidence needs at least one passing log");
        out.failing.push_back(&failing_sorted[target_index]);
        out.passing.push_back(&passing_sorted.front());
        break;
    }
    case EvidenceVariant::Median: {
        std::size_t nf = (failing_sorted.size() + 1) / 2;
        std::size_t np = (passing_sorted.size() + 1) / 2;
        for (std::size_t i = 0; i < nf; ++i)
            out.failing.push_back(&failing_sorted[i]);
        if (target_index >= nf)
            out.failing.back() = &failing_sorted[target_index];
        for (std::size_t i = 0; i < np; ++i)
            out.passing.push_back(&passing_sorted[i]);
        break;
    }
    case EvidenceVariant::Maximal: {
        for (const auto& log : failing_sorted)
            out.failing.push_back(&log);
        for (const auto& log : passing_sorted)
            out.passing.push_back(&log);
        break;
    }
    }
    return out;
}

std::set<EventId> baseline_search(const AbstractedLog& log, const EventVocabulary& vocab) {
    static const std::regex pattern("error|fault|fail", std::regex::ECMAScript | std::regex::icase);
    std::set<EventId> matched;
    for (EventId id : distinct_events(log))
        if (std::regex_search(vocab.text_of(id), pattern))
            matched.insert(id);
    return matched;
}

std::vector<HeatmapCell> heatmap_cells(const std::vector<SweepRecord>& records) {
    std::map<std::tuple<std::string, std::size_t, std::size_t>,
             std::pair<std::vector<double>, std::vector<double>>>
        grouped;
    for (const auto& record : records) {
        auto& bucket = grouped[{record.test, record.i, record.j}];
        bucket.first.push_back(record.median_effort_reduction);
        bucket.second.push_back(record.median_recall);
    }
    std::vector<HeatmapCell> cells;
    for (const auto& [key, bucket] : grouped) {
        HeatmapCell cell;
        cell.test = std::get<0>(key);
        cell.i = std::get<1>(key);
        cell.j = std::get<2>(key);
        cell.median_effort_reduction = median(bucket.first);
        cell.median_recall = median(bucket.second);
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream out;
    out << "test,i,j,target,median_er,median_recall\n";
    for (const auto& r : records)
        out << csv_field(r.test) << ',' << r.i << ',' << r.j << ',' << csv_field(r.target) << ','
            << fmt_fixed(r.median_effort_reduction, 6) << ',' << fmt_fixed(r.median_recall, 6)
            << '\n';
    return out.str();
}

std::string heatmap_to_csv(const std::vector<HeatmapCell>& cells) {
    std::ostringstream out;
    out << "test,i,j,median_er,median_recall\n";
    for (const auto& c : cells)
        out << csv_field(c.test) << ',' << c.i << ',' << c.j << ','
            << fmt_fixed(c.median_effort_reduction, 6) << ',' << fmt_fixed(c.median_recall, 6)
            << '\n';
    return out.str();
}

} // namespace evaluation
} // namespace sbld
