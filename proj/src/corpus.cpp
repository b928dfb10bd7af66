#include "sbld/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sbld/errors.hpp"
#include "sbld/util.hpp"

namespace sbld {

namespace fs = std::filesystem;

std::int64_t parse_timestamp(const std::string& text) {
    std::string s = trim(text);
    if (s.empty())
        throw ConfigError("timestamp: empty value");
    if (s.find_first_not_of("0123456789-") == std::string::npos &&
        s.find('-', 1) == std::string::npos) {
        return std::stoll(s); // plain epoch seconds
    }
    std::tm tm{};
    int year, month, day, hour, minute, second;
    char sep;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &year, &month, &day, &sep, &hour, &minute,
                    &second) == 7 &&
        (sep == ' ' || sep == 'T')) {
        tm.tm_year = year - 1900;
        tm.tm_mon = month - 1;
        tm.tm_mday = day;
        tm.tm_hour = hour;
        tm.tm_min = minute;
        tm.tm_sec = second;
        return static_cast<std::int64_t>(timegm(&tm));
    }
    throw ConfigError("timestamp: cannot parse '" + text + "'");
}

std::string format_timestamp(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::map<std::string, ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("manifest: cannot open '" + path.string() + "'");
    std::map<std::string, ManifestEntry> entries;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty())
            continue;
        if (first && to_lower(t) == "source_id,verdict,produced_at") {
            first = false;
            continue;
        }
        first = false;
        auto fields = split(t, ',');
        if (fields.size() != 3)
            throw ConfigError("manifest: expected 'source_id,verdict,produced_at', got '" + t +
                              "'");
        ManifestEntry entry;
        entry.verdict = verdict_from_string(fields[1]);
        entry.produced_at = parse_timestamp(fields[2]);
        if (!entries.emplace(trim(fields[0]), entry).second)
            throw ConfigError("manifest: duplicate source id '" + fields[0] + "'");
    }
    return entries;
}

namespace {

std::int64_t mtime_epoch(const fs::path& p) {
    auto ftime = fs::last_write_time(p);
    auto sys = std::chrono::time_point_cast<std::chrono::seconds>(
        ftime - fs::file_time_type::clock::now() + std::chrono::system_clock::now());
    return sys.time_since_epoch().count();
}

bool has_verdict_dirs(const fs::path& dir) {
    return fs::is_directory(dir / "fail") || fs::is_directory(dir / "pass");
}

void collect_test(const fs::path& test_dir, const std::string& test_name,
                  std::vector<CorpusEntry>& out) {
    for (const char* sub : {"fail", "pass"}) {
        fs::path dir = test_dir / sub;
        if (!fs::is_directory(dir))
            continue;
        Verdict verdict = std::string(sub) == "fail" ? Verdict::Fail : Verdict::Pass;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file())
                continue;
            std::string name = entry.path().filename().string();
            if (name.empty() || name[0] == '.')
                continue;
            CorpusEntry ce;
            ce.test = test_name;
            ce.verdict = verdict;
            ce.path = entry.path();
            ce.source_id = test_name + "/" + sub + "/" + name;
            out.push_back(std::move(ce));
        }
    }
}

} // namespace

std::vector<CorpusEntry> scan_corpus(const fs::path& root,
                                     const std::optional<fs::path>& manifest_path) {
    if (!fs::is_directory(root))
        throw ConfigError("corpus: '" + root.string() + "' is not a directory");

    std::vector<CorpusEntry> entries;
    if (has_verdict_dirs(root)) {
        collect_test(root, fs::absolute(root).filename().string(), entries);
    } else {
        for (const auto& child : fs::directory_iterator(root)) {
            if (!child.is_directory())
                continue;
            if (has_verdict_dirs(child.path()))
                collect_test(child.path(), child.path().filename().string(), entries);
        }
    }
    if (entries.empty())
        throw ConfigError("corpus: no <test>/fail or <test>/pass log files under '" +
                          root.string() + "'");

    std::map<std::string, ManifestEntry> manifest;
    if (manifest_path)
        manifest = load_manifest(*manifest_path);
    for (auto& entry : entries) {
        auto it = manifest.find(entry.source_id);
        if (it != manifest.end()) {
            if (it->second.verdict != entry.verdict)
                throw ConfigError("manifest: verdict for '" + entry.source_id +
                                  "' conflicts with its directory");
            entry.produced_at = it->second.produced_at;
        } else {
            entry.produced_at = mtime_epoch(entry.path);
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) { return a.source_id < b.source_id; });
    return entries;
}

RawLog read_raw_log(const CorpusEntry& entry) {
    std::ifstream in(entry.path, std::ios::binary);
    if (!in)
        throw ConfigError("corpus: cannot read '" + entry.path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    RawLog raw;
    raw.source_id = entry.source_id;
    raw.verdict = entry.verdict;
    raw.produced_at = entry.produced_at;
    raw.text = text.str();
    return raw;
}

} // namespace sbld
