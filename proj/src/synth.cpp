#include "sbld/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "sbld/corpus.hpp"
#include "sbld/errors.hpp"
#include "sbld/evaluation.hpp"
#include "sbld/log_abstraction.hpp"
#include "sbld/util.hpp"

namespace sbld {
namespace synth {

namespace fs = std::filesystem;

namespace {

const char* kComponents[] = {"auth",      "routing", "media",     "billing",
                             "telemetry", "storage", "sessions",  "registry",
                             "transport", "codec",   "scheduler", "dispatch"};
const char* kRoles[] = {"gateway", "daemon", "worker", "manager",
                        "proxy",   "bridge", "agent",  "monitor"};

std::string component_name(unsigned test, unsigned k) {
    std::string c = kComponents[(test * 7 + k) % std::size(kComponents)];
    std::string r = kRoles[(test * 3 + k * 5) % std::size(kRoles)];
    return c + "-" + r;
}

struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    unsigned below(unsigned n) {
        return std::uniform_int_distribution<unsigned>(0, n - 1)(engine);
    }
    bool chance(double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine) < p;
    }
    std::string decimal_id() { // 6-9 digits, gets masked to <NUM>
        unsigned digits = 6 + below(4);
        std::string s;
        s += static_cast<char>('1' + below(9));
        for (unsigned i = 1; i < digits; ++i)
            s += static_cast<char>('0' + below(10));
        return s;
    }
    std::string ipv4() {
        std::ostringstream out;
        out << (1 + below(223)) << '.' << below(256) << '.' << below(256) << '.'
            << (1 + below(254));
        return out.str();
    }
    std::string hex_token() { // 8-16 chars; first is a letter so it stays hex
        static const char* digits = "0123456789abcdef";
        unsigned len = 8 + below(9);
        std::string s;
        s += static_cast<char>('a' + below(6));
        for (unsigned i = 1; i < len; ++i)
            s += digits[below(16)];
        return s;
    }
    std::string uuid() {
        static const char* digits = "0123456789abcdef";
        std::string s;
        const int groups[] = {8, 4, 4, 4, 12};
        for (int g = 0; g < 5; ++g) {
            if (g)
                s += '-';
            for (int i = 0; i < groups[g]; ++i)
                s += digits[below(16)];
        }
        return s;
    }
};

// The variable spans of every template are maskable (timestamps, ips, hex,
// 6+ digit ids), so each pool index abstracts to one stable event text.
std::string noise_message(unsigned p, Rng& rng) {
    std::ostringstream out;
    switch (p % 8) {
    case 0:
        out << "worker-" << p << " completed batch " << rng.decimal_id() << " from queue q"
            << p % 7;
        break;
    case 1:
        out << "connection established to " << rng.ipv4() << " on port " << 5000 + p;
        break;
    case 2:
        out << "cache shard " << p << " rebalanced, continuation token " << rng.hex_token();
        break;
    case 3:
        out << "heartbeat from node-" << p << " rtt " << 1 + p % 90 << " ms";
        break;
    case 4:
        out << "request " << rng.uuid() << " served from pool-" << p << " with status 200";
        break;
    case 5:
        out << "gc cycle reclaimed " << p % 64 << " pages in region r" << p;
        break;
    case 6: // multi-line event: continuation lines carry no timestamp
        out << "retrying transfer for segment s" << p << "\n    attempt journal: offset "
            << rng.decimal_id() << " committed, checksum " << rng.hex_token();
        break;
    default: // benign use of an alarm word; the textual baseline will bite
        out << "error budget consumed " << p % 100 << " percent for slo tier t" << p % 4;
        break;
    }
    return out.str();
}

struct PlantedEvent {
    std::string message;      // raw message, stable across occurrences
    std::string match_token;  // distinctive literal used as the sub-pattern
};

PlantedEvent planted_event(unsigned test, unsigned idx) {
    std::string component = component_name(test, idx);
    std::string code = "QX-" + std::to_string(100 + test * 10 + idx);
    PlantedEvent e;
    if (idx % 2 == 0) {
        e.message = "ERROR: " + component + " fault detected, diagnostic code " + code;
        e.match_token = "diagnostic code " + code;
    } else {
        e.message = "watchdog escalated " + component + " to quarantine level " + code;
        e.match_token = "quarantine level " + code;
    }
    return e;
}

std::string timestamp_line(std::int64_t epoch, unsigned millis) {
    std::string iso = format_timestamp(epoch); // 2025-03-01T00:00:00Z
    std::string out = iso.substr(0, 10) + " " + iso.substr(11, 8);
    char frac[8];
    std::snprintf(frac, sizeof(frac), ".%03u", millis % 1000);
    return out + frac;
}

} // namespace

std::string test_dir_name(unsigned t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "test_%02u", t + 1);
    return buf;
}

SynthSummary generate_corpus(const SynthOptions& options) {
    if (options.tests == 0 || options.failing == 0)
        throw ConfigError("synth: need at least one test with one failing log");
    fs::create_directories(options.out_dir);

    Rng rng(options.seed);
    std::ostringstream manifest;
    manifest << "source_id,verdict,produced_at\n";

    evaluation::SignatureSet signatures;
    const std::int64_t base_epoch = parse_timestamp("2025-03-01T00:00:00Z");
    SynthSummary summary;

    for (unsigned t = 0; t < options.tests; ++t) {
        const std::string test_name = test_dir_name(t);
        fs::create_directories(options.out_dir / test_name / "fail");
        fs::create_directories(options.out_dir / test_name / "pass");

        std::vector<PlantedEvent> planted;
        evaluation::Signature sig;
        sig.name = "err_class_" + std::to_string(t + 1);
        for (unsigned s = 0; s < options.signature_events; ++s) {
            planted.push_back(planted_event(t, s));
            sig.sub_patterns.push_back(planted.back().match_token);
        }
        signatures.signatures.push_back(sig);
        signatures.test_to_signature[test_name] = sig.name;

        // Chronological interleaving of verdicts.
        std::vector<Verdict> order(options.failing, Verdict::Fail);
        order.insert(order.end(), options.passing, Verdict::Pass);
        std::shuffle(order.begin(), order.end(), rng.engine);

        unsigned fail_seq = 0, pass_seq = 0;
        for (std::size_t seq = 0; seq < order.size(); ++seq) {
            Verdict verdict = order[seq];
            std::int64_t produced_at =
                base_epoch + static_cast<std::int64_t>(t) * 40 * 86400 +
                static_cast<std::int64_t>(seq) * 3600;

            // Build the event list: shared components, sampled noise and,
            // for failing runs, the planted symptoms.
            std::vector<std::string> messages;
            for (unsigned k = 0; k < options.shared_events; ++k)
                messages.push_back("component " + component_name(t, 100 + k) +
                                   " ready, session " + rng.decimal_id());
            for (unsigned p = 0; p < options.noise_events; ++p)
                if (rng.chance(options.noise_inclusion))
                    messages.push_back(noise_message(p, rng));
            if (verdict == Verdict::Fail)
                for (const auto& e : planted)
                    messages.push_back(e.message);
            std::shuffle(messages.begin(), messages.end(), rng.engine);

            std::ostringstream log;
            log << "=== integration run " << rng.decimal_id() << " on host build-"
                << rng.decimal_id() << " ===\n";
            std::int64_t clock = produced_at;
            for (const auto& message : messages) {
                clock += 1 + rng.below(5);
                log << timestamp_line(clock, rng.below(1000)) << ' ' << message << '\n';
            }

            char file[32];
            if (verdict == Verdict::Fail)
                std::snprintf(file, sizeof(file), "f%03u.log", fail_seq++);
            else
                std::snprintf(file, sizeof(file), "p%03u.log", pass_seq++);
            std::string rel = test_name + "/" + (verdict == Verdict::Fail ? "fail/" : "pass/") +
                              file;
            std::ofstream out(options.out_dir / rel, std::ios::binary);
            if (!out)
                throw ConfigError("synth: cannot write '" + rel + "'");
            out << log.str();
            manifest << rel << ',' << to_string(verdict) << ','
                     << format_timestamp(produced_at) << '\n';
            ++summary.logs_written;
        }
    }

    summary.config_path = options.out_dir / "config.json";
    {
        std::ofstream out(summary.config_path);
        out << abstraction_config_to_json(default_abstraction_config());
    }
    summary.manifest_path = options.out_dir / "manifest.csv";
    {
        std::ofstream out(summary.manifest_path, std::ios::binary);
        out << manifest.str();
    }
    summary.signatures_path = options.out_dir / "signatures.json";
    {
        std::ofstream out(summary.signatures_path);
        out << evaluation::signatures_to_json(signatures);
    }
    return summary;
}

} // namespace synth
} // namespace sbld
