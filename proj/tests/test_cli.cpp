#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("sbld_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run(const std::string& args) {
    fs::path out = scratch_dir() / "cmd.out";
    fs::path err = scratch_dir() / "cmd.err";
    std::string cmd = std::string(SBLD_TOOL_PATH) + " " + args + " >" + out.string() + " 2>" +
                      err.string();
    int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Small corpus with one planted failure-exclusive event; every other event
// occurs in at least one passing log.
fs::path planted_corpus() {
    fs::path root = scratch_dir() / "planted";
    if (fs::exists(root))
        return root;
    write_file(root / "t1/fail/a.log",
               "2025-01-01 10:00:00 shared alpha ready\n"
               "2025-01-01 10:00:01 PLANTED omega condition engaged\n"
               "2025-01-01 10:00:02 shared beta ready\n");
    write_file(root / "t1/fail/b.log",
               "2025-01-01 11:00:00 shared alpha ready\n"
               "2025-01-01 11:00:01 PLANTED omega condition engaged\n");
    write_file(root / "t1/pass/c.log",
               "2025-01-01 12:00:00 shared alpha ready\n"
               "2025-01-01 12:00:01 shared beta ready\n");
    write_file(root / "t1/pass/d.log", "2025-01-01 13:00:00 shared beta ready\n");
    return root;
}

} // namespace

TEST_CASE("synth then abstract produces the spectrum database deterministically") {
    fs::path corpus = scratch_dir() / "corpus";
    auto synth = run("synth --out " + corpus.string() +
                     " --tests 1 --failing 3 --passing 3 --noise-events 30");
    REQUIRE(synth.exit_code == 0);
    CHECK(fs::exists(corpus / "manifest.csv"));
    CHECK(fs::exists(corpus / "signatures.json"));
    CHECK(fs::exists(corpus / "config.json"));

    std::string common = " --corpus " + corpus.string() + " --config " +
                         (corpus / "config.json").string() + " --manifest " +
                         (corpus / "manifest.csv").string();
    fs::path db1 = scratch_dir() / "db1";
    fs::path db2 = scratch_dir() / "db2";
    REQUIRE(run("abstract" + common + " --out " + db1.string()).exit_code == 0);
    REQUIRE(run("abstract" + common + " --out " + db2.string()).exit_code == 0);

    for (const char* rel : {"vocabulary.json", "abstracted.jsonl",
                            "spectrum/test_01.matrix.csv"}) {
        CAPTURE(rel);
        CHECK(slurp(db1 / rel) == slurp(db2 / rel));
    }
}

TEST_CASE("corrupt config exits with code 2 and names the offending rule") {
    fs::path cfg = scratch_dir() / "bad_config.json";
    write_file(cfg, R"({"delimiter": "^x", "masking_rules":
        [{"name": "mangled_rule", "pattern": "([oops", "replacement": "<X>"}]})");
    fs::path corpus = planted_corpus();
    auto result = run("abstract --corpus " + corpus.string() + " --config " + cfg.string() +
                      " --out " + (scratch_dir() / "nowhere").string());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("mangled_rule") != std::string::npos);
}

TEST_CASE("diagnose without a spectrum database hints at rebuilding") {
    auto result = run("diagnose --spectrum " + (scratch_dir() / "missing").string() +
                      " --target t1/fail/a.log");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("abstract") != std::string::npos);
}

TEST_CASE("diagnose retrieves exactly the planted failure-exclusive events") {
    fs::path corpus = planted_corpus();
    fs::path db = scratch_dir() / "planted_db";
    REQUIRE(run("abstract --corpus " + corpus.string() + " --out " + db.string()).exit_code == 0);

    fs::path reports = scratch_dir() / "planted_reports";
    auto result = run("diagnose --spectrum " + db.string() +
                      " --target t1/fail/a.log --measure failed_only --k 1 --out " +
                      reports.string());
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("PLANTED omega condition engaged") != std::string::npos);

    auto doc = nlohmann::json::parse(
        slurp(reports / "diagnosis_t1_fail_a.log_failed_only.json"));
    REQUIRE(doc.at("clusters").size() >= 1);
    const auto& top = doc.at("clusters").at(0);
    CHECK(top.at("retrieved").get<bool>());
    REQUIRE(top.at("events").size() == 1);
    CHECK(top.at("events").at(0).at("text").get<std::string>().find("PLANTED omega") !=
          std::string::npos);
    CHECK(doc.at("events_in_log").get<int>() == 3);
    CHECK(doc.at("events_retrieved").get<int>() == 1);
}

TEST_CASE("diagnose with k ALL prints every event grouped") {
    fs::path db = scratch_dir() / "planted_db";
    auto result = run("diagnose --spectrum " + db.string() +
                      " --target t1/fail/a.log --measure ochiai --k ALL");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("retrieved 3 in") != std::string::npos);
    CHECK(result.out.find("effort reduction 0.0000") != std::string::npos);
}

TEST_CASE("diagnose accepts evidence variants") {
    fs::path db = scratch_dir() / "planted_db";
    auto result = run("diagnose --spectrum " + db.string() +
                      " --target t1/fail/b.log --measure tarantula --variant minimal");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("measure: tarantula") != std::string::npos);
}

TEST_CASE("evaluate writes the four csv artifacts with twelve comparisons") {
    fs::path corpus = scratch_dir() / "corpus"; // from the synth test above
    fs::path out = scratch_dir() / "eval";
    auto result = run("evaluate --corpus " + corpus.string() + " --config " +
                      (corpus / "config.json").string() + " --manifest " +
                      (corpus / "manifest.csv").string() + " --signatures " +
                      (corpus / "signatures.json").string() + " --out " + out.string());
    REQUIRE(result.exit_code == 0);
    for (const char* rel : {"sweep.csv", "heatmap.csv", "per_log_scores.csv", "compare.csv"})
        CHECK(fs::exists(out / rel));

    std::istringstream compare(slurp(out / "compare.csv"));
    std::string line;
    std::getline(compare, line);
    CHECK(line == "variant1,variant2,metric,statistic,a12,a21,p_raw,p_holm,significant");
    int rows = 0;
    while (std::getline(compare, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == 12);

    // sweep shape: |F|=3, |P|=3 -> sum i*(P+1) = 24 records, 12 heatmap cells
    std::istringstream sweep(slurp(out / "sweep.csv"));
    std::getline(sweep, line);
    int records = 0;
    while (std::getline(sweep, line))
        if (!line.empty())
            ++records;
    CHECK(records == 24);
}

TEST_CASE("evaluate without any admissible logs exits with code 1") {
    fs::path corpus = planted_corpus();
    fs::path sigs = scratch_dir() / "empty_sigs.json";
    write_file(sigs, R"({"signatures": [{"name": "s", "sub_patterns": ["nope"]}], "tests": {}})");
    auto result = run("evaluate --corpus " + corpus.string() + " --signatures " + sigs.string() +
                      " --out " + (scratch_dir() / "eval_none").string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("no admissible") != std::string::npos);
}

TEST_CASE("unknown flags exit with code 2") {
    auto result = run("evaluate --bogus");
    CHECK(result.exit_code == 2);
}
