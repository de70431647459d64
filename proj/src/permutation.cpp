#include "clusrank/permutation.hpp"

#include <string>

namespace clusrank {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return std::round(out);
}

double assignment_count(std::span<const StratumCount> strata) {
    double count = 1.0;
    for (const auto& s : strata) {
        count *= binomial(s.total, s.chosen);
    }
    return count;
}

double two_stage_count(std::span<const std::size_t> group1_counts, std::size_t cluster_size) {
    // N! / Π N_q! distinct placements, times Π_i C(g, Q_i)
    std::vector<std::size_t> multiplicity(cluster_size + 1, 0);
    double count = 1.0;
    std::size_t placed = 0;
    for (auto q : group1_counts) {
        ++placed;
        ++multiplicity[q];
        count *= static_cast<double>(placed) / static_cast<double>(multiplicity[q]);
        count *= binomial(cluster_size, q);
    }
    return std::round(count);
}

double PermutationTally::p_value(PermutationPlan::Mode mode) const {
    if (total_ == 0) {
        throw Error("empty permutation distribution");
    }
    if (mode == PermutationPlan::Mode::monte_carlo) {
        return static_cast<double>(extreme_ + 1) / static_cast<double>(total_ + 1);
    }
    return static_cast<double>(extreme_) / static_cast<double>(total_);
}

double permutation_pvalue(double observed, double center, std::span<const double> permuted, Alternative alternative,
                          PermutationPlan::Mode mode) {
    PermutationTally tally(observed, center, alternative);
    for (double t : permuted) {
        tally.add(t);
    }
    return tally.p_value(mode);
}

namespace detail {

void check_cap(double count, const PermutationPlan& plan) {
    if (count > plan.cap) {
        throw Error("exhaustive enumeration needs " + std::to_string(count) + " arrangements, above the cap of " +
                    std::to_string(plan.cap) + "; use Monte-Carlo draws (B > 0)");
    }
}

} // namespace detail

} // namespace clusrank
