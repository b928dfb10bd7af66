#ifndef SBLD_SPECTRUM_HPP
#define SBLD_SPECTRUM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbld/log_abstraction.hpp"

namespace sbld {

// Occurrence counts for one event over the failing and passing corpora.
struct SpectrumPrimitives {
    std::size_t n_fi = 0; // failing logs that include the event
    std::size_t n_fe = 0; // failing logs that exclude it
    std::size_t n_pi = 0; // passing logs that include it
    std::size_t n_pe = 0; // passing logs that exclude it
};

enum class Measure {
    Tarantula,
    Jaccard,
    Ochiai,
    Ochiai2,
    Zoltar,
    DStar2,
    Op,
    Wong3,
    Kulczynski2,
    FailedOnly,
};

inline constexpr Measure kAllMeasures[] = {
    Measure::Tarantula, Measure::Jaccard,     Measure::Ochiai, Measure::Ochiai2,
    Measure::Zoltar,    Measure::DStar2,      Measure::Op,     Measure::Wong3,
    Measure::Kulczynski2, Measure::FailedOnly,
};

const char* to_string(Measure m);
Measure measure_from_string(const std::string& name);
// Parses "ALL", one name, or a comma-separated list.
std::vector<Measure> parse_measure_selection(const std::string& selection);

// Interestingness score; higher means more interesting. Degenerate
// denominators follow the 0/0 -> 0 rule, and x/0 with x > 0 makes the whole
// measure +infinity (maximum preference). In practice only DStar2 can reach
// the infinite case.
double score(const SpectrumPrimitives& p, Measure m);

// Binary logs x events occurrence matrix. Rows keep supply order (failing
// then passing), columns are the sorted union of event ids.
class CoverageMatrix {
public:
    struct Row {
        std::string source_id;
        Verdict verdict = Verdict::Fail;
        std::vector<EventId> events; // sorted distinct event ids
    };

    static CoverageMatrix build(std::span<const AbstractedLog> failing,
                                std::span<const AbstractedLog> passing);
    // Convenience overload over pointers, used by evidence slicing.
    static CoverageMatrix build(const std::vector<const AbstractedLog*>& failing,
                                const std::vector<const AbstractedLog*>& passing);

    std::size_t failing_total() const { return failing_total_; }
    std::size_t passing_total() const { return passing_total_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<EventId>& columns() const { return columns_; }

    bool has_event(EventId id) const;
    SpectrumPrimitives primitives(EventId id) const;
    const Row* find_row(const std::string& source_id) const;

    // Scores for every column, aligned with columns().
    std::vector<double> score_all(Measure m) const;

    // Sparse-triplet CSV: `source_id,verdict,event_id,1` per occurrence, in
    // row order with event ids ascending; a row without events is kept as
    // `source_id,verdict,,0`. Round-trips bit-exact.
    std::string to_csv() const;
    static CoverageMatrix from_csv(const std::string& csv_text);
    void save_csv(const std::string& path) const;
    static CoverageMatrix load_csv(const std::string& path);

private:
    std::vector<Row> rows_;
    std::vector<EventId> columns_;
    std::vector<std::size_t> fail_count_; // per column
    std::vector<std::size_t> pass_count_; // per column
    std::size_t failing_total_ = 0;
    std::size_t passing_total_ = 0;

    void index_columns();
    std::optional<std::size_t> column_index(EventId id) const;
};

// Scored events feed the clustering step, which needs finite distances:
// +infinity sentinels become (max finite score + one threshold unit), where
// the unit is the uncorrected sample standard deviation of the finite scores
// (1.0 when that is zero or there are no finite scores).
std::vector<double> replace_sentinels(std::vector<double> scores);

} // namespace sbld

#endif
