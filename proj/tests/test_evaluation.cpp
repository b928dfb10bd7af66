#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "sbld/errors.hpp"
#include "sbld/evaluation.hpp"

using namespace sbld;
using namespace sbld::evaluation;

namespace {

AbstractedLog make_log(std::string sid, Verdict v, std::vector<EventId> events,
                       std::int64_t produced_at = 0) {
    AbstractedLog log;
    log.source_id = std::move(sid);
    log.verdict = v;
    log.events = std::move(events);
    log.produced_at = produced_at;
    return log;
}

} // namespace

TEST_CASE("ground truth collects events matched by sub-patterns") {
    EventVocabulary vocab;
    EventId disk = vocab.intern("ERROR: disk full");
    EventId ok = vocab.intern("all good");
    EventId disk2 = vocab.intern("retry after disk full condition");
    auto log = make_log("f", Verdict::Fail, {disk, ok, disk2});

    Signature sig{"disk", {"disk full"}};
    auto relevant = ground_truth(log, vocab, sig);
    CHECK(relevant == std::set<EventId>{disk, disk2});

    Signature miss{"other", {"disk full", "network down"}};
    CHECK_FALSE(matches_signature(log, vocab, miss));
    CHECK_THROWS_AS(ground_truth(log, vocab, miss), UsageError);
}

TEST_CASE("signature lint flags sub-patterns matching every log") {
    EventVocabulary vocab;
    EventId start = vocab.intern("starting test run");
    EventId bad = vocab.intern("ERROR: boom");
    EventId fine = vocab.intern("finished cleanly");
    std::vector<AbstractedLog> logs = {
        make_log("f0", Verdict::Fail, {start, bad}),
        make_log("p0", Verdict::Pass, {start, fine}),
        make_log("p1", Verdict::Pass, {start}),
    };
    Signature sig{"s", {"starting test", "ERROR"}};
    auto warnings = lint_signature(logs, vocab, sig);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("starting test") != std::string::npos);
}

TEST_CASE("recall in best cluster") {
    std::set<EventId> relevant = {1, 2};
    CHECK(recall_best({1, 3}, relevant) == doctest::Approx(0.5));
    CHECK(recall_best({1, 2, 3, 4}, relevant) == doctest::Approx(1.0));
    CHECK(recall_best({5, 6}, relevant) == doctest::Approx(0.0));
    CHECK_THROWS_AS(recall_best({1}, {}), UsageError);
}

TEST_CASE("effort reduction formula and bounds") {
    CHECK(effort_reduction(11, 30) == doctest::Approx(0.6333).epsilon(1e-4));
    CHECK(effort_reduction(1, 100) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(effort_reduction(30, 30) == 0.0);
    CHECK_THROWS_AS(effort_reduction(0, 10), UsageError);
    CHECK_THROWS_AS(effort_reduction(11, 10), UsageError);
}

TEST_CASE("sweep covers the loop structure for one failing and one passing log") {
    std::map<std::string, std::set<EventId>> truth = {{"f0", {42}}};
    std::vector<AbstractedLog> failing = {make_log("f0", Verdict::Fail, {42, 7}, 100)};
    std::vector<AbstractedLog> passing = {make_log("p0", Verdict::Pass, {7}, 50)};
    auto records = sweep("t", failing, passing, truth);
    REQUIRE(records.size() == 2); // cells (1,0) and (1,1)
    CHECK(records[0].i == 1);
    CHECK(records[0].j == 0);
    CHECK(records[1].i == 1);
    CHECK(records[1].j == 1);
    CHECK(records[0].target == "f0");
}

TEST_CASE("sweep record count matches the closed form") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t F = 1 + rng() % 4, P = rng() % 4;
        std::vector<AbstractedLog> failing, passing;
        std::map<std::string, std::set<EventId>> truth;
        for (std::size_t i = 0; i < F; ++i) {
            failing.push_back(make_log("f" + std::to_string(i), Verdict::Fail, {1, 2},
                                       static_cast<std::int64_t>(i)));
            truth[failing.back().source_id] = {1};
        }
        for (std::size_t j = 0; j < P; ++j)
            passing.push_back(make_log("p" + std::to_string(j), Verdict::Pass, {2},
                                       static_cast<std::int64_t>(j)));
        auto records = sweep("t", failing, passing, truth);
        std::size_t expected = 0;
        for (std::size_t i = 1; i <= F; ++i)
            expected += (P + 1) * i;
        CHECK(records.size() == expected);
    }
}

TEST_CASE("j=0 with failed_only collapses to full recall and zero effort reduction") {
    std::map<std::string, std::set<EventId>> truth = {{"f0", {1}}, {"f1", {1}}};
    std::vector<AbstractedLog> failing = {make_log("f0", Verdict::Fail, {1, 2, 3}, 1),
                                          make_log("f1", Verdict::Fail, {1, 4}, 2)};
    std::vector<AbstractedLog> passing = {make_log("p0", Verdict::Pass, {2}, 1)};
    SweepOptions options;
    options.measures = {Measure::FailedOnly};
    auto records = sweep("t", failing, passing, truth, options);
    for (const auto& r : records) {
        if (r.j != 0)
            continue;
        CHECK(r.median_recall == doctest::Approx(1.0));
        CHECK(r.median_effort_reduction == doctest::Approx(0.0));
    }
}

TEST_CASE("sweep skips targets without ground truth") {
    std::map<std::string, std::set<EventId>> truth = {{"f0", {1}}}; // f1 inadmissible
    std::vector<AbstractedLog> failing = {make_log("f0", Verdict::Fail, {1, 2}, 1),
                                          make_log("f1", Verdict::Fail, {2}, 2)};
    std::vector<AbstractedLog> passing;
    auto records = sweep("t", failing, passing, truth);
    // i=1: one record; i=2: still only f0
    REQUIRE(records.size() == 2);
    for (const auto& r : records)
        CHECK(r.target == "f0");
}

TEST_CASE("evidence configurations slice chronological prefixes") {
    std::vector<AbstractedLog> failing, passing;
    for (int i = 0; i < 4; ++i)
        failing.push_back(make_log("f" + std::to_string(i), Verdict::Fail, {1}, i));
    for (int j = 0; j < 25; ++j)
        passing.push_back(make_log("p" + std::to_string(j), Verdict::Pass, {1}, j));

    SUBCASE("median takes the ceilings") {
        auto sel = evidence_config(failing, passing, 0, EvidenceVariant::Median);
        CHECK(sel.failing.size() == 2);
        CHECK(sel.passing.size() == 13);
        CHECK(sel.failing[0]->source_id == "f0");
        CHECK(sel.failing[1]->source_id == "f1");
    }
    SUBCASE("median forces the target into the prefix") {
        auto sel = evidence_config(failing, passing, 3, EvidenceVariant::Median);
        REQUIRE(sel.failing.size() == 2);
        CHECK(sel.failing[0]->source_id == "f0");
        CHECK(sel.failing[1]->source_id == "f3");
    }
    SUBCASE("maximal uses everything") {
        auto sel = evidence_config(failing, passing, 2, EvidenceVariant::Maximal);
        CHECK(sel.failing.size() == 4);
        CHECK(sel.passing.size() == 25);
    }
    SUBCASE("minimal is the target plus the first passing log") {
        auto sel = evidence_config(failing, passing, 2, EvidenceVariant::Minimal);
        REQUIRE(sel.failing.size() == 1);
        CHECK(sel.failing[0]->source_id == "f2");
        REQUIRE(sel.passing.size() == 1);
        CHECK(sel.passing[0]->source_id == "p0");
    }
    SUBCASE("minimal needs a passing log") {
        CHECK_THROWS_AS(evidence_config(failing, {}, 0, EvidenceVariant::Minimal), UsageError);
    }
}

TEST_CASE("baseline search matches the three alarm words case-insensitively") {
    EventVocabulary vocab;
    EventId e0 = vocab.intern("ERROR: disk full");
    EventId e1 = vocab.intern("all good");
    EventId e2 = vocab.intern("Failover engaged");
    auto log = make_log("f", Verdict::Fail, {e0, e1, e2});
    CHECK(baseline_search(log, vocab) == std::set<EventId>{e0, e2});

    EventId e3 = vocab.intern("segfault in module x");
    auto log2 = make_log("f2", Verdict::Fail, {e1, e3});
    CHECK(baseline_search(log2, vocab) == std::set<EventId>{e3});

    auto log3 = make_log("f3", Verdict::Fail, {e1});
    CHECK(baseline_search(log3, vocab).empty());
}

TEST_CASE("heatmap cells aggregate per-target medians") {
    SweepRecord single{"t", 1, 0, "f0", 0.8, 1.0};
    auto cells = heatmap_cells({single});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].median_effort_reduction == doctest::Approx(0.8));
    CHECK(cells[0].median_recall == doctest::Approx(1.0));

    SweepRecord a{"t", 2, 1, "f0", 0.8, 1.0};
    SweepRecord b{"t", 2, 1, "f1", 0.6, 0.5};
    cells = heatmap_cells({a, b});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].median_effort_reduction == doctest::Approx(0.7));
    CHECK(cells[0].median_recall == doctest::Approx(0.75));
}

TEST_CASE("heatmap output is sorted by test, i, j") {
    std::vector<SweepRecord> records = {
        {"b", 1, 1, "x", 0.1, 0.1}, {"a", 2, 0, "x", 0.2, 0.2}, {"a", 1, 5, "x", 0.3, 0.3},
        {"a", 1, 2, "x", 0.4, 0.4},
    };
    auto cells = heatmap_cells(records);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].test == "a");
    CHECK(cells[0].i == 1);
    CHECK(cells[0].j == 2);
    CHECK(cells[1].j == 5);
    CHECK(cells[2].i == 2);
    CHECK(cells[3].test == "b");

    auto csv = heatmap_to_csv(cells);
    CHECK(csv.substr(0, csv.find('\n')) == "test,i,j,median_er,median_recall");
}

TEST_CASE("signatures file round-trips and validates") {
    std::string json = R"({
      "signatures": [{"name": "sigA", "sub_patterns": ["disk full", "raid"]}],
      "tests": {"test_01": "sigA"}
    })";
    auto set = load_signatures(json);
    REQUIRE(set.signatures.size() == 1);
    CHECK(set.for_test("test_01") == set.find("sigA"));
    CHECK(set.for_test("unknown") == nullptr);
    auto re = load_signatures(signatures_to_json(set));
    CHECK(re.signatures[0].sub_patterns == set.signatures[0].sub_patterns);

    CHECK_THROWS_AS(load_signatures(R"({"signatures": [], "tests": {"t": "missing"}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        load_signatures(R"({"signatures": [{"name": "x", "sub_patterns": ["(bad"]}]})"),
        ConfigError);
}

TEST_CASE("sweep parallel execution yields identical records") {
    std::map<std::string, std::set<EventId>> truth;
    std::vector<AbstractedLog> failing, passing;
    std::mt19937 rng(31);
    for (int i = 0; i < 4; ++i) {
        std::vector<EventId> ev;
        for (EventId e = 0; e < 12; ++e)
            if (rng() % 2)
                ev.push_back(e);
        ev.push_back(90 + static_cast<EventId>(i % 2));
        failing.push_back(make_log("f" + std::to_string(i), Verdict::Fail, ev, i));
        truth[failing.back().source_id] = {90 + static_cast<EventId>(i % 2)};
    }
    for (int j = 0; j < 5; ++j) {
        std::vector<EventId> ev;
        for (EventId e = 0; e < 12; ++e)
            if (rng() % 2)
                ev.push_back(e);
        passing.push_back(make_log("p" + std::to_string(j), Verdict::Pass, ev, j));
    }
    SweepOptions serial, parallel;
    parallel.jobs = 4;
    auto r1 = sweep("t", failing, passing, truth, serial);
    auto r2 = sweep("t", failing, passing, truth, parallel);
    CHECK(sweep_to_csv(r1) == sweep_to_csv(r2));
}
