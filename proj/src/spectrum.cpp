#include "sbld/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sbld/errors.hpp"
#include "sbld/util.hpp"

namespace sbld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 0/0 -> 0; x/0 with x > 0 -> +infinity. Division by +infinity yields 0, so
// Zoltar's penalty term degrades the way the formula's limit does.
double safe_div(double num, double den) {
    if (den == 0.0)
        return num == 0.0 ? 0.0 : kInf;
    return num / den;
}

} // namespace

const char* to_string(Measure m) {
    switch (m) {
    case Measure::Tarantula: return "tarantula";
    case Measure::Jaccard: return "jaccard";
    case Measure::Ochiai: return "ochiai";
    case Measure::Ochiai2: return "ochiai2";
    case Measure::Zoltar: return "zoltar";
    case Measure::DStar2: return "dstar2";
    case Measure::Op: return "op";
    case Measure::Wong3: return "wong3";
    case Measure::Kulczynski2: return "kulczynski2";
    case Measure::FailedOnly: return "failed_only";
    }
    return "?";
}

Measure measure_from_string(const std::string& name) {
    std::string n = to_lower(trim(name));
    for (Measure m : kAllMeasures)
        if (n == to_string(m))
            return m;
    throw ConfigError("unknown measure '" + name + "'");
}

std::vector<Measure> parse_measure_selection(const std::string& selection) {
    std::string s = to_lower(trim(selection));
    if (s.empty() || s == "all")
        return {std::begin(kAllMeasures), std::end(kAllMeasures)};
    std::vector<Measure> out;
    for (const std::string& part : split(s, ','))
        out.push_back(measure_from_string(part));
    return out;
}

double score(const SpectrumPrimitives& p, Measure m) {
    const double fi = static_cast<double>(p.n_fi);
    const double fe = static_cast<double>(p.n_fe);
    const double pi = static_cast<double>(p.n_pi);
    const double pe = static_cast<double>(p.n_pe);
    switch (m) {
    case Measure::Tarantula: {
        double fail_frac = safe_div(fi, fi + fe);
        double pass_frac = safe_div(pi, pi + pe);
        return safe_div(fail_frac, fail_frac + pass_frac);
    }
    case Measure::Jaccard:
        return safe_div(fi, fi + fe + pi);
    case Measure::Ochiai:
        return safe_div(fi, std::sqrt((fi + fe) * (fi + pi)));
    case Measure::Ochiai2:
        return safe_div(fi * pe, std::sqrt((fi + pi) * (fe + pe) * (fi + fe) * (pi + pe)));
    case Measure::Zoltar:
        return safe_div(fi, fi + fe + pi + safe_div(10000.0 * fe * pi, fi));
    case Measure::DStar2:
        return safe_div(fi * fi, fe + pi);
    case Measure::Op:
        return fi - pi / (pi + pe + 1.0);
    case Measure::Wong3: {
        double h;
        if (pi <= 2.0)
            h = pi;
        else if (pi <= 10.0)
            h = 2.0 + 0.1 * (pi - 2.0);
        else
            h = 2.8 + 0.001 * (pi - 10.0);
        return fi - h;
    }
    case Measure::Kulczynski2:
        return 0.5 * (safe_div(fi, fi + fe) + safe_div(fi, fi + pi));
    case Measure::FailedOnly:
        return p.n_pi == 0 ? 1.0 : 0.0;
    }
    throw UsageError("score: unknown measure");
}

// --- CoverageMatrix ------------------------------------------------------

CoverageMatrix CoverageMatrix::build(std::span<const AbstractedLog> failing,
                                     std::span<const AbstractedLog> passing) {
    std::vector<const AbstractedLog*> f, p;
    f.reserve(failing.size());
    p.reserve(passing.size());
    for (const auto& log : failing)
        f.push_back(&log);
    for (const auto& log : passing)
        p.push_back(&log);
    return build(f, p);
}

CoverageMatrix CoverageMatrix::build(const std::vector<const AbstractedLog*>& failing,
                                     const std::vector<const AbstractedLog*>& passing) {
    CoverageMatrix m;
    m.failing_total_ = failing.size();
    m.passing_total_ = passing.size();

    std::set<EventId> all_events;
    auto add_row = [&](const AbstractedLog& log, Verdict verdict) {
        Row row;
        row.source_id = log.source_id;
        row.verdict = verdict;
        row.events.assign(log.events.begin(), log.events.end());
        std::sort(row.events.begin(), row.events.end());
        row.events.erase(std::unique(row.events.begin(), row.events.end()), row.events.end());
        all_events.insert(row.events.begin(), row.events.end());
        m.rows_.push_back(std::move(row));
    };
    for (const AbstractedLog* log : failing)
        add_row(*log, Verdict::Fail);
    for (const AbstractedLog* log : passing)
        add_row(*log, Verdict::Pass);

    std::set<std::string> seen_ids;
    for (const Row& row : m.rows_)
        if (!seen_ids.insert(row.source_id).second)
            throw UsageError("coverage matrix: duplicate source id '" + row.source_id + "'");

    m.columns_.assign(all_events.begin(), all_events.end());
    m.index_columns();
    return m;
}

void CoverageMatrix::index_columns() {
    fail_count_.assign(columns_.size(), 0);
    pass_count_.assign(columns_.size(), 0);
    for (const Row& row : rows_) {
        auto& counts = row.verdict == Verdict::Fail ? fail_count_ : pass_count_;
        for (EventId id : row.events) {
            auto idx = column_index(id);
            counts[*idx] += 1;
        }
    }
}

std::optional<std::size_t> CoverageMatrix::column_index(EventId id) const {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), id);
    if (it == columns_.end() || *it != id)
        return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

bool CoverageMatrix::has_event(EventId id) const {
    return column_index(id).has_value();
}

SpectrumPrimitives CoverageMatrix::primitives(EventId id) const {
    auto idx = column_index(id);
    if (!idx)
        throw UsageError("coverage matrix: event " + std::to_string(id) + " has no column");
    SpectrumPrimitives p;
    p.n_fi = fail_count_[*idx];
    p.n_fe = failing_total_ - p.n_fi;
    p.n_pi = pass_count_[*idx];
    p.n_pe = passing_total_ - p.n_pi;
    return p;
}

const CoverageMatrix::Row* CoverageMatrix::find_row(const std::string& source_id) const {
    for (const Row& row : rows_)
        if (row.source_id == source_id)
            return &row;
    return nullptr;
}

std::vector<double> CoverageMatrix::score_all(Measure m) const {
    std::vector<double> scores;
    scores.reserve(columns_.size());
    for (EventId id : columns_)
        scores.push_back(score(primitives(id), m));
    return scores;
}

std::string CoverageMatrix::to_csv() const {
    std::ostringstream out;
    out << "source_id,verdict,event_id,present\n";
    for (const Row& row : rows_) {
        if (row.events.empty()) {
            out << csv_field(row.source_id) << ',' << to_string(row.verdict) << ",,0\n";
            continue;
        }
        for (EventId id : row.events)
            out << csv_field(row.source_id) << ',' << to_string(row.verdict) << ',' << id
                << ",1\n";
    }
    return out.str();
}

namespace {

// Minimal CSV line splitter with quote support, enough for our own files.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace

CoverageMatrix CoverageMatrix::from_csv(const std::string& csv_text) {
    CoverageMatrix m;
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "source_id,verdict,event_id,present")
        throw ConfigError("matrix csv: missing 'source_id,verdict,event_id,present' header");

    std::set<EventId> all_events;
    std::unordered_map<std::string, std::size_t> row_index;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw ConfigError("matrix csv: expected 4 fields, got line '" + line + "'");
        const std::string& sid = fields[0];
        Verdict verdict = verdict_from_string(fields[1]);
        auto it = row_index.find(sid);
        if (it == row_index.end()) {
            it = row_index.emplace(sid, m.rows_.size()).first;
            m.rows_.push_back(Row{sid, verdict, {}});
            (verdict == Verdict::Fail ? m.failing_total_ : m.passing_total_) += 1;
        } else if (m.rows_[it->second].verdict != verdict) {
            throw ConfigError("matrix csv: conflicting verdicts for '" + sid + "'");
        }
        if (fields[3] == "0" && trim(fields[2]).empty())
            continue; // row marker without events
        if (fields[3] != "1")
            throw ConfigError("matrix csv: occurrence flag must be 1, got '" + fields[3] + "'");
        EventId id = static_cast<EventId>(std::stoul(fields[2]));
        m.rows_[it->second].events.push_back(id);
        all_events.insert(id);
    }
    for (Row& row : m.rows_) {
        std::sort(row.events.begin(), row.events.end());
        row.events.erase(std::unique(row.events.begin(), row.events.end()), row.events.end());
    }
    m.columns_.assign(all_events.begin(), all_events.end());
    m.index_columns();
    return m;
}

void CoverageMatrix::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("matrix csv: cannot write '" + path + "'");
    out << to_csv();
}

CoverageMatrix CoverageMatrix::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("matrix csv: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return from_csv(text.str());
}

// --- sentinel replacement -------------------------------------------------

std::vector<double> replace_sentinels(std::vector<double> scores) {
    double max_finite = 0.0;
    bool any_finite = false;
    bool any_inf = false;
    for (double s : scores) {
        if (std::isinf(s)) {
            any_inf = true;
        } else {
            max_finite = any_finite ? std::max(max_finite, s) : s;
            any_finite = true;
        }
    }
    if (!any_inf)
        return scores;

    double unit = 1.0;
    if (any_finite) {
        double mean = 0.0;
        std::size_t n = 0;
        for (double s : scores)
            if (!std::isinf(s)) {
                mean += s;
                ++n;
            }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double s : scores)
            if (!std::isinf(s))
                var += (s - mean) * (s - mean);
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd > 0.0)
            unit = sd;
    }
    double replacement = (any_finite ? max_finite : 0.0) + unit;
    for (double& s : scores)
        if (std::isinf(s))
            s = replacement;
    return scores;
}

} // namespace sbld
