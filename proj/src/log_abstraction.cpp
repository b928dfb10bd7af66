#include "sbld/log_abstraction.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sbld/errors.hpp"
#include "sbld/util.hpp"

namespace sbld {

using nlohmann::json;

const char* to_string(Verdict v) {
    return v == Verdict::Fail ? "FAIL" : "PASS";
}

Verdict verdict_from_string(const std::string& s) {
    std::string u = to_lower(trim(s));
    if (u == "fail")
        return Verdict::Fail;
    if (u == "pass")
        return Verdict::Pass;
    throw ConfigError("unknown verdict '" + s + "' (expected FAIL or PASS)");
}

namespace {

std::regex compile_pattern(const std::string& pattern, const std::string& what) {
    try {
        return std::regex(pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
        throw ConfigError(what + ": invalid regular expression '" + pattern + "': " + e.what());
    }
}

// A replacement that any rule's pattern could match would make masking
// non-idempotent, so it is rejected at load time.
void check_replacements(const std::vector<MaskingRule>& rules) {
    for (const auto& rule : rules) {
        for (const auto& other : rules) {
            if (std::regex_search(rule.replacement, other.re)) {
                throw ConfigError("masking rule '" + rule.name + "': replacement '" +
                                  rule.replacement + "' matches pattern of rule '" +
                                  other.name + "'");
            }
        }
    }
}

MaskingRule make_rule(std::string name, std::string pattern, std::string replacement) {
    MaskingRule rule;
    rule.re = compile_pattern(pattern, "masking rule '" + name + "'");
    rule.name = std::move(name);
    rule.pattern = std::move(pattern);
    rule.replacement = std::move(replacement);
    return rule;
}

} // namespace

AbstractionConfig default_abstraction_config() {
    AbstractionConfig config;
    config.delimiter = R"(\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}:\d{2})";
    config.delimiter_re = compile_pattern(config.delimiter, "delimiter");
    config.rules.push_back(make_rule(
        "timestamp",
        R"(\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}:\d{2}(\.\d+)?( (?:UTC|GMT|CET|CEST|[ECMP][SD]T)|Z)?)",
        "<TS>"));
    config.rules.push_back(make_rule(
        "uuid",
        R"(\b[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}\b)",
        "<UUID>"));
    config.rules.push_back(make_rule(
        "ipv6", R"(\b(?:[0-9a-fA-F]{1,4}:){2,7}[0-9a-fA-F]{1,4}\b)", "<IP6>"));
    config.rules.push_back(make_rule("ipv4", R"(\b\d{1,3}(?:\.\d{1,3}){3}\b)", "<IP>"));
    // Requires at least one a-f character so digit-only runs fall through to
    // the decimal-id rule.
    config.rules.push_back(
        make_rule("hex", R"(\b(?=[0-9]*[a-fA-F])[0-9a-fA-F]{8,}\b)", "<HEX>"));
    config.rules.push_back(make_rule("decimal_id", R"(\b\d{6,}\b)", "<NUM>"));
    check_replacements(config.rules);
    return config;
}

AbstractionConfig load_abstraction_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    AbstractionConfig config;
    try {
        config.delimiter = doc.at("delimiter").get<std::string>();
        for (const auto& entry : doc.at("masking_rules")) {
            config.rules.push_back(make_rule(entry.at("name").get<std::string>(),
                                             entry.at("pattern").get<std::string>(),
                                             entry.at("replacement").get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: missing or malformed field: ") + e.what());
    }
    config.delimiter_re = compile_pattern(config.delimiter, "delimiter");
    check_replacements(config.rules);
    return config;
}

AbstractionConfig load_abstraction_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return load_abstraction_config(text.str());
}

std::string abstraction_config_to_json(const AbstractionConfig& config) {
    json doc;
    doc["delimiter"] = config.delimiter;
    doc["masking_rules"] = json::array();
    for (const auto& rule : config.rules) {
        doc["masking_rules"].push_back(
            {{"name", rule.name}, {"pattern", rule.pattern}, {"replacement", rule.replacement}});
    }
    return doc.dump(2) + "\n";
}

// --- EventVocabulary ---------------------------------------------------

EventVocabulary::EventVocabulary(const EventVocabulary& other) {
    *this = other;
}

EventVocabulary& EventVocabulary::operator=(const EventVocabulary& other) {
    if (this == &other)
        return *this;
    std::scoped_lock lock(other.mutex_);
    index_ = other.index_;
    texts_ = other.texts_;
    by_id_.assign(texts_, nullptr);
    for (const auto& [text, id] : index_)
        by_id_[id] = &text;
    return *this;
}

EventId EventVocabulary::intern(const std::string& text) {
    std::scoped_lock lock(mutex_);
    auto it = index_.find(text);
    if (it != index_.end())
        return it->second;
    EventId id = static_cast<EventId>(texts_++);
    auto [pos, inserted] = index_.emplace(text, id);
    (void)inserted;
    by_id_.push_back(&pos->first);
    return id;
}

EventId EventVocabulary::id_of(const std::string& text) const {
    std::scoped_lock lock(mutex_);
    auto it = index_.find(text);
    if (it == index_.end())
        throw UsageError("vocabulary: unknown event text");
    return it->second;
}

const std::string& EventVocabulary::text_of(EventId id) const {
    std::scoped_lock lock(mutex_);
    if (id >= by_id_.size())
        throw UsageError("vocabulary: unknown event id " + std::to_string(id));
    return *by_id_[id];
}

bool EventVocabulary::contains_text(const std::string& text) const {
    std::scoped_lock lock(mutex_);
    return index_.count(text) > 0;
}

std::string EventVocabulary::to_json() const {
    std::scoped_lock lock(mutex_);
    json doc = json::array();
    for (EventId id = 0; id < by_id_.size(); ++id)
        doc.push_back({{"id", id}, {"text", *by_id_[id]}});
    return doc.dump() + "\n";
}

EventVocabulary EventVocabulary::from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("vocabulary: invalid JSON: ") + e.what());
    }
    EventVocabulary vocab;
    for (const auto& entry : doc) {
        EventId id = entry.at("id").get<EventId>();
        std::string text = entry.at("text").get<std::string>();
        if (id != vocab.size())
            throw ConfigError("vocabulary: ids must be dense and ordered, got " +
                              std::to_string(id));
        if (vocab.contains_text(text))
            throw ConfigError("vocabulary: duplicate text for id " + std::to_string(id));
        vocab.intern(text);
    }
    return vocab;
}

void EventVocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("vocabulary: cannot write '" + path + "'");
    out << to_json();
}

EventVocabulary EventVocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("vocabulary: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return from_json(text.str());
}

// --- abstraction --------------------------------------------------------

std::string AbstractedLog::test_name() const {
    std::size_t pos = source_id.find('/');
    return pos == std::string::npos ? source_id : source_id.substr(0, pos);
}

std::vector<std::string> delineate(const std::string& text, const std::regex& delimiter) {
    std::vector<std::string> blocks;
    if (text.empty())
        return blocks;

    std::string current;
    std::size_t pos = 0;
    bool have_block = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::size_t end = (eol == std::string::npos) ? text.size() : eol + 1;
        std::cmatch m;
        bool starts_event = std::regex_search(text.data() + pos, text.data() + end, m,
                                              delimiter, std::regex_constants::match_continuous);
        if (starts_event && have_block) {
            blocks.push_back(std::move(current));
            current.clear();
        }
        current.append(text, pos, end - pos);
        have_block = true;
        pos = end;
    }
    if (have_block)
        blocks.push_back(std::move(current));
    return blocks;
}

std::string mask(const std::string& block, const std::vector<MaskingRule>& rules) {
    std::string out = block;
    for (const auto& rule : rules)
        out = std::regex_replace(out, rule.re, rule.replacement);
    return out;
}

namespace {

// Trailing newlines are part of the raw block (the splice property needs
// them) but not of the event identity.
std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
        s.pop_back();
    return s;
}

} // namespace

AbstractedLog abstract_log(const RawLog& raw, const AbstractionConfig& config,
                           EventVocabulary& vocab) {
    AbstractedLog out;
    out.source_id = raw.source_id;
    out.verdict = raw.verdict;
    out.produced_at = raw.produced_at;
    for (const std::string& block : delineate(raw.text, config.delimiter_re)) {
        std::string text = mask(strip_trailing_newlines(block), config.rules);
        out.events.push_back(vocab.intern(text));
    }
    return out;
}

// --- JSONL persistence ---------------------------------------------------

std::string abstracted_log_to_json(const AbstractedLog& log) {
    json doc;
    doc["source_id"] = log.source_id;
    doc["verdict"] = to_string(log.verdict);
    doc["produced_at"] = log.produced_at;
    doc["event_count"] = log.events.size();
    doc["events"] = log.events;
    return doc.dump();
}

AbstractedLog abstracted_log_from_json(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("abstracted log: invalid JSON: ") + e.what());
    }
    AbstractedLog log;
    try {
        log.source_id = doc.at("source_id").get<std::string>();
        log.verdict = verdict_from_string(doc.at("verdict").get<std::string>());
        log.produced_at = doc.at("produced_at").get<std::int64_t>();
        log.events = doc.at("events").get<std::vector<EventId>>();
        if (doc.at("event_count").get<std::size_t>() != log.events.size())
            throw ConfigError("abstracted log '" + log.source_id +
                              "': event_count does not match events length");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("abstracted log: missing field: ") + e.what());
    }
    return log;
}

void save_abstracted_logs(const std::vector<AbstractedLog>& logs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("abstracted logs: cannot write '" + path + "'");
    for (const auto& log : logs)
        out << abstracted_log_to_json(log) << '\n';
}

std::vector<AbstractedLog> load_abstracted_logs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("abstracted logs: cannot open '" + path + "'");
    std::vector<AbstractedLog> logs;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        logs.push_back(abstracted_log_from_json(line));
    }
    return logs;
}

} // namespace sbld
