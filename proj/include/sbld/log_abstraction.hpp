#ifndef SBLD_LOG_ABSTRACTION_HPP
#define SBLD_LOG_ABSTRACTION_HPP

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <regex>
#include <string>
#include <unordered_map>
#include <vector>

namespace sbld {

using EventId = std::uint32_t;

enum class Verdict { Fail, Pass };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

// One raw log file with its outcome already known.
struct RawLog {
    std::string source_id;
    Verdict verdict = Verdict::Fail;
    std::int64_t produced_at = 0; // UTC epoch seconds
    std::string text;
};

// Replaces run-specific spans (timestamps, addresses, checksums, ...) with a
// stable placeholder so recurrences of the same event share one identity.
struct MaskingRule {
    std::string name;
    std::string pattern;
    std::string replacement;
    std::regex re;
};

struct AbstractionConfig {
    std::string delimiter; // matched at line starts; a match opens a new event
    std::regex delimiter_re;
    std::vector<MaskingRule> rules; // applied in order, each globally
};

// Shipped profile: ISO-like timestamps, UUIDs, IPv6/IPv4, hex strings of 8+
// chars, decimal ids of 6+ digits.
AbstractionConfig default_abstraction_config();

// Parses {"delimiter": ..., "masking_rules": [{name, pattern, replacement}]}.
// Throws ConfigError on invalid regexes (naming the rule) or when a
// replacement token could itself match some rule's pattern.
AbstractionConfig load_abstraction_config(const std::string& json_text);
AbstractionConfig load_abstraction_config_file(const std::string& path);
std::string abstraction_config_to_json(const AbstractionConfig& config);

// Bidirectional map event id <-> abstracted event text. Ids are dense and
// assigned in interning order; get-or-insert is serialized so abstraction of
// distinct logs may run concurrently.
class EventVocabulary {
public:
    EventVocabulary() = default;
    EventVocabulary(const EventVocabulary& other);
    EventVocabulary& operator=(const EventVocabulary& other);

    EventId intern(const std::string& text);
    // Lookup without inserting; throws UsageError if absent.
    EventId id_of(const std::string& text) const;
    const std::string& text_of(EventId id) const;
    bool contains_text(const std::string& text) const;
    std::size_t size() const { return texts_; }

    std::string to_json() const;                  // [{id, text}] ordered by id
    static EventVocabulary from_json(const std::string& json_text);
    void save(const std::string& path) const;
    static EventVocabulary load(const std::string& path);

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, EventId> index_;
    std::vector<const std::string*> by_id_;
    std::size_t texts_ = 0;
};

// Ordered sequence of event ids produced from one raw log.
struct AbstractedLog {
    std::string source_id;
    Verdict verdict = Verdict::Fail;
    std::int64_t produced_at = 0;
    std::vector<EventId> events;

    std::size_t event_count() const { return events.size(); }
    // Name of the test this log belongs to: the leading path segment of its
    // source id.
    std::string test_name() const;
};

// Splits raw text into blocks. A new block starts at every line whose start
// matches the delimiter; text before the first match becomes a preamble
// block. Joining the blocks reproduces the input byte for byte.
std::vector<std::string> delineate(const std::string& text, const std::regex& delimiter);

// Applies the masking rules in order, each globally. No-match is a no-op.
std::string mask(const std::string& block, const std::vector<MaskingRule>& rules);

AbstractedLog abstract_log(const RawLog& raw, const AbstractionConfig& config,
                           EventVocabulary& vocab);

// JSON-lines persistence, one AbstractedLog per line.
std::string abstracted_log_to_json(const AbstractedLog& log);
AbstractedLog abstracted_log_from_json(const std::string& line);
void save_abstracted_logs(const std::vector<AbstractedLog>& logs, const std::string& path);
std::vector<AbstractedLog> load_abstracted_logs(const std::string& path);

} // namespace sbld

#endif
