#ifndef SBLD_SYNTH_HPP
#define SBLD_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>

namespace sbld {
namespace synth {

// Generates a corpus of failing/passing logs with planted failure-exclusive
// signature events, shared infrastructure events and a pool of noise events
// that occur on both sides. Emits matching ground-truth signatures, an
// abstraction config and a manifest, so the result is directly consumable by
// the abstract/diagnose/evaluate commands.
struct SynthOptions {
    std::filesystem::path out_dir;
    unsigned tests = 5;
    unsigned failing = 10;          // per test
    unsigned passing = 20;          // per test
    unsigned signature_events = 3;  // planted per test, failing logs only
    unsigned shared_events = 8;     // present in every log of a test
    unsigned noise_events = 240;    // pool size per test
    double noise_inclusion = 0.25;  // probability a pool event enters a log
    std::uint64_t seed = 42;        // SBLD_SEED
};

struct SynthSummary {
    unsigned logs_written = 0;
    std::filesystem::path config_path;
    std::filesystem::path manifest_path;
    std::filesystem::path signatures_path;
};

SynthSummary generate_corpus(const SynthOptions& options);

// Test directory name for index t (0-based): test_01, test_02, ...
std::string test_dir_name(unsigned t);

} // namespace synth
} // namespace sbld

#endif
