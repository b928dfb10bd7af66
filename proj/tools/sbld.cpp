// sbld: spectrum-based log diagnosis for failing CI and test runs.
//
// Subcommands:
//   abstract  turn a corpus of raw logs into events and spectrum matrices
//   diagnose  rank event clusters for one failing log
//   evaluate  run the full sweep/variant/baseline/statistics pipeline
//   synth     generate a synthetic corpus with planted faults

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sbld/errors.hpp"
#include "sbld/pipeline.hpp"
#include "sbld/synth.hpp"
#include "sbld/util.hpp"

namespace {

std::size_t parse_k(const std::string& value) {
    if (sbld::to_lower(sbld::trim(value)) == "all")
        return sbld::kRetrieveAll;
    long long k = std::stoll(value);
    if (k < 1)
        throw sbld::ConfigError("--k must be at least 1 (or ALL)");
    return static_cast<std::size_t>(k);
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* env = std::getenv("SBLD_SEED");
    if (env == nullptr || *env == '\0')
        return fallback;
    return std::stoull(env);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectrum-based log diagnosis"};
    app.require_subcommand(1);

    // abstract
    auto* abstract_cmd =
        app.add_subcommand("abstract", "abstract a raw corpus into events and spectra");
    std::string a_corpus, a_config, a_manifest, a_out;
    abstract_cmd->add_option("--corpus", a_corpus, "corpus root (<test>/fail, <test>/pass)")
        ->required();
    abstract_cmd->add_option("--config", a_config, "abstraction config JSON");
    abstract_cmd->add_option("--manifest", a_manifest, "source_id,verdict,produced_at CSV");
    abstract_cmd->add_option("--out", a_out, "output directory")->required();

    // diagnose
    auto* diagnose_cmd = app.add_subcommand("diagnose", "diagnose one failing log");
    std::string d_spectrum, d_target, d_test, d_measure = "ochiai", d_k = "1";
    std::string d_aggregate = "mean", d_variant, d_out;
    diagnose_cmd->add_option("--spectrum", d_spectrum, "directory written by `sbld abstract`")
        ->required();
    diagnose_cmd->add_option("--target", d_target, "source id of the failing log")->required();
    diagnose_cmd->add_option("--test", d_test, "test name (default: from the target id)");
    diagnose_cmd->add_option("--measure", d_measure,
                             "measure name, comma list, or ALL (default ochiai)");
    diagnose_cmd->add_option("--k", d_k, "clusters to retrieve, or ALL (default 1)");
    diagnose_cmd->add_option("--aggregate", d_aggregate, "cluster ranking aggregate: mean|max");
    diagnose_cmd->add_option("--variant", d_variant,
                             "evidence variant minimal|median|maximal (default: full spectrum)");
    diagnose_cmd->add_option("--out", d_out, "directory for JSON reports");

    // evaluate
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "run sweep, evidence variants, baseline and statistics");
    std::string e_corpus, e_config, e_manifest, e_signatures, e_out;
    std::string e_measure = "ALL", e_k = "1", e_aggregate = "mean";
    unsigned e_jobs = 1;
    evaluate_cmd->add_option("--corpus", e_corpus, "corpus root")->required();
    evaluate_cmd->add_option("--config", e_config, "abstraction config JSON");
    evaluate_cmd->add_option("--manifest", e_manifest, "source_id,verdict,produced_at CSV");
    evaluate_cmd->add_option("--signatures", e_signatures, "signatures JSON")->required();
    evaluate_cmd->add_option("--out", e_out, "output directory for the CSVs")->required();
    evaluate_cmd->add_option("--measure", e_measure, "measure selection (default ALL)");
    evaluate_cmd->add_option("--k", e_k, "clusters retrieved per diagnosis (default 1)");
    evaluate_cmd->add_option("--aggregate", e_aggregate, "cluster ranking aggregate: mean|max");
    evaluate_cmd->add_option("--jobs", e_jobs, "parallel sweep workers (default 1)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    sbld::synth::SynthOptions synth_options;
    std::string s_out;
    synth_cmd->add_option("--out", s_out, "corpus output directory")->required();
    synth_cmd->add_option("--tests", synth_options.tests, "number of tests (default 5)");
    synth_cmd->add_option("--failing", synth_options.failing, "failing logs per test");
    synth_cmd->add_option("--passing", synth_options.passing, "passing logs per test");
    synth_cmd->add_option("--signature-events", synth_options.signature_events,
                          "planted failure-exclusive events per test");
    synth_cmd->add_option("--shared-events", synth_options.shared_events,
                          "events present in every log of a test");
    synth_cmd->add_option("--noise-events", synth_options.noise_events,
                          "noise event pool size per test");
    synth_cmd->add_option("--noise-inclusion", synth_options.noise_inclusion,
                          "per-log inclusion probability of a noise event");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (abstract_cmd->parsed()) {
            sbld::pipeline::AbstractOptions options;
            options.corpus_root = a_corpus;
            if (!a_config.empty())
                options.config_path = a_config;
            if (!a_manifest.empty())
                options.manifest_path = a_manifest;
            options.out_dir = a_out;
            sbld::pipeline::run_abstract(options, std::cout);
        } else if (diagnose_cmd->parsed()) {
            sbld::pipeline::DiagnoseOptions options;
            options.spectrum_dir = d_spectrum;
            options.target = d_target;
            if (!d_test.empty())
                options.test = d_test;
            options.measures = sbld::parse_measure_selection(d_measure);
            options.k = parse_k(d_k);
            options.aggregate = sbld::aggregate_from_string(d_aggregate);
            if (!d_variant.empty())
                options.variant = sbld::evaluation::evidence_variant_from_string(d_variant);
            if (!d_out.empty())
                options.out_dir = d_out;
            sbld::pipeline::run_diagnose(options, std::cout);
        } else if (evaluate_cmd->parsed()) {
            sbld::pipeline::EvaluateOptions options;
            options.corpus_root = e_corpus;
            if (!e_config.empty())
                options.config_path = e_config;
            if (!e_manifest.empty())
                options.manifest_path = e_manifest;
            options.signatures_path = e_signatures;
            options.out_dir = e_out;
            options.measures = sbld::parse_measure_selection(e_measure);
            options.k = parse_k(e_k);
            options.aggregate = sbld::aggregate_from_string(e_aggregate);
            options.jobs = e_jobs == 0 ? 1 : e_jobs;
            auto outcome = sbld::pipeline::run_evaluate(options, std::cout, std::cerr);
            if (outcome.admitted_targets == 0) {
                std::cerr << "error: no admissible failing logs to evaluate\n";
                return 1;
            }
        } else if (synth_cmd->parsed()) {
            synth_options.out_dir = s_out;
            synth_options.seed = seed_from_env(synth_options.seed);
            auto summary = sbld::synth::generate_corpus(synth_options);
            std::cout << "wrote " << summary.logs_written << " logs, "
                      << summary.manifest_path.string() << ", "
                      << summary.signatures_path.string() << ", "
                      << summary.config_path.string() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
