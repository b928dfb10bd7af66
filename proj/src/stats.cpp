#include "sbld/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbld/errors.hpp"

namespace sbld {
namespace stats {

namespace {

constexpr std::size_t kExactLimit = 25; // nonzero differences handled exactly

// Average ranks over |values|; zeros get the lowest ranks.
std::vector<double> rank_absolute(const std::vector<double>& diffs) {
    const std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(diffs[a]) < std::fabs(diffs[b]);
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]]))
            ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0; // ranks are 1-based
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Exact two-sided p for W+ given the (possibly tied) ranks of the nonzero
// differences. Ranks are halves, so doubling them makes the sum distribution
// a small integer-indexed table.
double exact_two_sided_p(const std::vector<double>& nonzero_ranks, double w_plus) {
    long long total2 = 0;
    std::vector<long long> scaled;
    scaled.reserve(nonzero_ranks.size());
    for (double r : nonzero_ranks) {
        long long s = static_cast<long long>(std::llround(2.0 * r));
        scaled.push_back(s);
        total2 += s;
    }
    std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    for (long long s : scaled)
        for (long long v = total2 - s; v >= 0; --v)
            if (ways[static_cast<std::size_t>(v)] != 0.0)
                ways[static_cast<std::size_t>(v + s)] += ways[static_cast<std::size_t>(v)];

    const double patterns = std::ldexp(1.0, static_cast<int>(scaled.size()));
    const long long w2 = static_cast<long long>(std::llround(2.0 * w_plus));
    double below = 0.0, above = 0.0;
    for (long long v = 0; v <= total2; ++v) {
        double c = ways[static_cast<std::size_t>(v)];
        if (v <= w2)
            below += c;
        if (v >= w2)
            above += c;
    }
    return std::min(1.0, 2.0 * std::min(below, above) / patterns);
}

double normal_two_sided_p(const std::vector<double>& ranks, const std::vector<double>& diffs,
                          double w_plus) {
    const double n = static_cast<double>(diffs.size());
    double zeros = 0.0;
    for (double d : diffs)
        if (d == 0.0)
            zeros += 1.0;
    const double mean = (n * (n + 1.0) - zeros * (zeros + 1.0)) / 4.0;
    double variance = (n * (n + 1.0) * (2.0 * n + 1.0) -
                       zeros * (zeros + 1.0) * (2.0 * zeros + 1.0)) / 24.0;
    // Tie correction over the nonzero ranks.
    std::vector<double> nz;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] != 0.0)
            nz.push_back(ranks[i]);
    std::sort(nz.begin(), nz.end());
    std::size_t i = 0;
    while (i < nz.size()) {
        std::size_t j = i;
        while (j + 1 < nz.size() && nz[j + 1] == nz[i])
            ++j;
        double t = static_cast<double>(j - i + 1);
        variance -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    if (variance <= 0.0)
        return 1.0;
    double d = w_plus - mean;
    double cc = d > 0.0 ? -0.5 : (d < 0.0 ? 0.5 : 0.0); // continuity correction
    double z = (d + cc) / std::sqrt(variance);
    return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

} // namespace

WilcoxonResult wilcoxon_pratt_diffs(const std::vector<double>& diffs) {
    if (diffs.empty())
        throw UsageError("wilcoxon: no pairs");
    std::vector<double> ranks = rank_absolute(diffs);

    WilcoxonResult result;
    std::vector<double> nonzero_ranks;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i] == 0.0)
            continue;
        nonzero_ranks.push_back(ranks[i]);
        if (diffs[i] > 0.0)
            result.statistic += ranks[i];
    }
    if (nonzero_ranks.empty()) {
        result.p_value = 1.0;
        return result;
    }
    if (nonzero_ranks.size() <= kExactLimit)
        result.p_value = exact_two_sided_p(nonzero_ranks, result.statistic);
    else
        result.p_value = normal_two_sided_p(ranks, diffs, result.statistic);
    return result;
}

WilcoxonResult wilcoxon_pratt(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [x, y] : pairs)
        diffs.push_back(x - y);
    return wilcoxon_pratt_diffs(diffs);
}

std::vector<double> holm(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m, 0.0);
    double running = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double scaled = p_values[order[k]] * static_cast<double>(m - k);
        running = std::max(running, scaled);
        adjusted[order[k]] = std::min(1.0, running);
    }
    return adjusted;
}

double a12(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.empty() || ys.empty())
        throw UsageError("a12: empty sample");
    double wins = 0.0;
    for (double x : xs)
        for (double y : ys) {
            if (x > y)
                wins += 1.0;
            else if (x == y)
                wins += 0.5;
        }
    return wins / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

std::string a12_magnitude(double a12_value) {
    double effect = std::max(a12_value, 1.0 - a12_value);
    if (effect >= 0.71)
        return "large";
    if (effect >= 0.64)
        return "medium";
    if (effect >= 0.56)
        return "small";
    return "negligible";
}

} // namespace stats
} // namespace sbld
