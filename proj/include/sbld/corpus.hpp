#ifndef SBLD_CORPUS_HPP
#define SBLD_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbld/log_abstraction.hpp"

namespace sbld {

// Entry discovered under the corpus root, laid out as
// <test>/fail/*.log and <test>/pass/*.log. When the root itself contains
// fail/ or pass/ it is treated as a single test named after the root
// directory. Source ids are <test>/<fail|pass>/<filename>.
struct CorpusEntry {
    std::string source_id;
    std::string test;
    Verdict verdict = Verdict::Fail;
    std::int64_t produced_at = 0;
    std::filesystem::path path;
};

struct ManifestEntry {
    Verdict verdict = Verdict::Fail;
    std::int64_t produced_at = 0;
};

// CSV `source_id,verdict,produced_at`; a header line is skipped when
// present. produced_at accepts epoch seconds or ISO-like UTC timestamps.
std::map<std::string, ManifestEntry> load_manifest(const std::filesystem::path& path);

// Accepts "1735689600", "2025-01-01 10:00:00", "2025-01-01T10:00:00Z".
std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t epoch_seconds);

// Scans the corpus tree; produced_at comes from the manifest when the
// source id is listed, file mtime otherwise. Entries are sorted by
// source id. Throws ConfigError when the layout or manifest is invalid.
std::vector<CorpusEntry> scan_corpus(const std::filesystem::path& root,
                                     const std::optional<std::filesystem::path>& manifest_path);

RawLog read_raw_log(const CorpusEntry& entry);

} // namespace sbld

#endif
