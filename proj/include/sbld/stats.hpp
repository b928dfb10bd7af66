#ifndef SBLD_STATS_HPP
#define SBLD_STATS_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sbld {
namespace stats {

struct WilcoxonResult {
    double statistic = 0.0; // sum of positive-difference ranks (W+)
    double p_value = 1.0;   // two-sided
};

// Paired Wilcoxon signed-rank test with the Pratt treatment of zero
// differences: zeros take part in ranking |d| and their ranks are then
// discarded; tied absolute differences receive average ranks. The p-value is
// exact (distribution of W+ over all sign assignments) when at most 25
// differences are nonzero, and a normal approximation with zero/tie-corrected
// variance and continuity correction otherwise.
WilcoxonResult wilcoxon_pratt(const std::vector<std::pair<double, double>>& pairs);
WilcoxonResult wilcoxon_pratt_diffs(const std::vector<double>& diffs);

// Holm step-down adjustment; output is in the input's order, pointwise >=
// the input and capped at 1.
std::vector<double> holm(const std::vector<double>& p_values);

// Vargha-Delaney A12: probability that a draw from xs exceeds a draw from
// ys, ties counted half.
double a12(const std::vector<double>& xs, const std::vector<double>& ys);

// Conventional magnitude label from the larger of A12/A21:
// >= 0.71 large, >= 0.64 medium, >= 0.56 small, otherwise negligible.
std::string a12_magnitude(double a12_value);

} // namespace stats
} // namespace sbld

#endif
