#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "clusrank/distributions.hpp"
#include "clusrank/types.hpp"

namespace clusrank {

/// How a randomization distribution is visited.
struct PermutationPlan {
    enum class Mode { exhaustive, monte_carlo };

    static constexpr double default_cap = 1e7;
    // Monte-Carlo draws share one RNG substream per chunk.
    static constexpr std::size_t chunk = 1024;

    Mode mode = Mode::monte_carlo;
    std::size_t draws = 2000;
    std::uint64_t seed = 0;
    double cap = default_cap;

    /// B = 0 requests exhaustive enumeration, otherwise B Monte-Carlo draws.
    static PermutationPlan from_draws(std::size_t b, std::uint64_t seed, double cap = default_cap) {
        PermutationPlan p;
        p.mode = b == 0 ? Mode::exhaustive : Mode::monte_carlo;
        p.draws = b;
        p.seed = seed;
        p.cap = cap;
        return p;
    }

    bool exhaustive() const { return mode == Mode::exhaustive; }
};

/// Per-stratum label exchange: choose `chosen` of `total` clusters for group 1.
struct StratumCount {
    std::size_t total = 0;
    std::size_t chosen = 0;
};

double binomial(std::size_t n, std::size_t k);

/// Product of C(total, chosen) over strata.
double assignment_count(std::span<const StratumCount> strata);

/// Counts the randomization distribution against an observed statistic.
///
/// Two-sided extremeness is the distance from the null center; one-sided
/// counts use the raw statistic. A tolerance of 1e-9·max(1, |observed - center|)
/// lets permuted copies of half-integer rank statistics count as ties.
class PermutationTally {
public:
    PermutationTally(double observed, double center, Alternative alternative)
        : observed_(observed), center_(center), alternative_(alternative),
          eps_(1e-9 * std::max(1.0, std::fabs(observed - center))) {}

    void add(double t) {
        ++total_;
        switch (alternative_) {
        case Alternative::two_sided:
            extreme_ += std::fabs(t - center_) >= std::fabs(observed_ - center_) - eps_;
            break;
        case Alternative::greater:
            extreme_ += t >= observed_ - eps_;
            break;
        case Alternative::less:
            extreme_ += t <= observed_ + eps_;
            break;
        }
    }

    std::size_t total() const { return total_; }
    std::size_t extreme() const { return extreme_; }

    /// Exhaustive: extreme / total. Monte-Carlo: (extreme + 1) / (total + 1).
    double p_value(PermutationPlan::Mode mode) const;

private:
    double observed_;
    double center_;
    Alternative alternative_;
    double eps_;
    std::size_t total_ = 0;
    std::size_t extreme_ = 0;
};

double permutation_pvalue(double observed, double center, std::span<const double> permuted, Alternative alternative,
                          PermutationPlan::Mode mode);

namespace detail {

void check_cap(double count, const PermutationPlan& plan);

// Advance `idx` (strictly increasing, values < n) to the next k-combination.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t pos = k; pos-- > 0;) {
        if (idx[pos] < n - k + pos) {
            ++idx[pos];
            for (auto j = pos + 1; j < k; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

// First k entries of a partial Fisher-Yates shuffle of 0..n-1, sorted.
inline void random_subset(std::size_t n, std::vector<std::size_t>& scratch, std::vector<std::size_t>& out,
                          RngStream& rng) {
    const std::size_t k = out.size();
    scratch.resize(n);
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(scratch[i], scratch[j]);
        out[i] = scratch[i];
    }
    std::sort(out.begin(), out.end());
}

} // namespace detail

/// Visits group-1 index sets, one per stratum (`chosen[s]` holds positions
/// within stratum `s`). Exhaustive mode yields each of Π C(N_g, m_g)
/// assignments once and throws when that count exceeds the plan's cap;
/// Monte-Carlo mode yields `plan.draws` independent uniform assignments.
template <typename Visitor>
void enumerate_assignments(const PermutationPlan& plan, std::span<const StratumCount> strata, Visitor&& visit) {
    std::vector<std::vector<std::size_t>> chosen(strata.size());
    for (std::size_t s = 0; s < strata.size(); ++s) {
        if (strata[s].chosen > strata[s].total) {
            throw Error("stratum selects more clusters than it holds");
        }
        chosen[s].resize(strata[s].chosen);
        std::iota(chosen[s].begin(), chosen[s].end(), std::size_t{0});
    }
    const std::span<const std::vector<std::size_t>> view(chosen);

    if (plan.exhaustive()) {
        detail::check_cap(assignment_count(strata), plan);
        while (true) {
            visit(view);
            std::size_t s = 0;
            for (; s < strata.size(); ++s) {
                if (detail::next_combination(chosen[s], strata[s].total)) {
                    break;
                }
                std::iota(chosen[s].begin(), chosen[s].end(), std::size_t{0});
            }
            if (s == strata.size()) {
                return;
            }
        }
    }

    if (plan.draws == 0) {
        throw Error("Monte-Carlo mode needs at least one draw");
    }
    std::vector<std::size_t> scratch;
    for (std::size_t b = 0; b < plan.draws; b += PermutationPlan::chunk) {
        RngStream rng(plan.seed, b / PermutationPlan::chunk);
        const auto end = std::min(plan.draws, b + PermutationPlan::chunk);
        for (auto d = b; d < end; ++d) {
            for (std::size_t s = 0; s < strata.size(); ++s) {
                detail::random_subset(strata[s].total, scratch, chosen[s], rng);
            }
            visit(view);
        }
    }
}

/// Visits ±1 vectors of length n: all 2^n in exhaustive mode, otherwise
/// `plan.draws` iid uniform vectors.
template <typename Visitor>
void enumerate_sign_flips(std::size_t n, const PermutationPlan& plan, Visitor&& visit) {
    if (n == 0) {
        throw Error("sign-flip enumeration needs at least one cluster");
    }
    std::vector<int> signs(n, 1);
    const std::span<const int> view(signs);
    if (plan.exhaustive()) {
        detail::check_cap(std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 1000))), plan);
        const std::uint64_t total = std::uint64_t{1} << n;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            for (std::size_t i = 0; i < n; ++i) {
                signs[i] = ((mask >> i) & 1U) != 0 ? -1 : 1;
            }
            visit(view);
        }
        return;
    }
    if (plan.draws == 0) {
        throw Error("Monte-Carlo mode needs at least one draw");
    }
    for (std::size_t b = 0; b < plan.draws; b += PermutationPlan::chunk) {
        RngStream rng(plan.seed, b / PermutationPlan::chunk);
        const auto end = std::min(plan.draws, b + PermutationPlan::chunk);
        for (auto d = b; d < end; ++d) {
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i % 64 == 0) {
                    bits = rng.engine()();
                }
                signs[i] = (bits & 1U) != 0 ? -1 : 1;
                bits >>= 1;
            }
            visit(view);
        }
    }
}

/// Number of two-stage arrangements: distinct placements of the observed
/// group-1 counts over clusters times the within-cluster subunit choices.
double two_stage_count(std::span<const std::size_t> group1_counts, std::size_t cluster_size);

/// Two-stage randomization for equal-size clusters: the observed per-cluster
/// group-1 counts are permuted across clusters, then each cluster picks which
/// of its `cluster_size` subunits are in group 1. The visitor receives one
/// bitmask per cluster (bit j set = subunit j in group 1).
template <typename Visitor>
void enumerate_two_stage(std::span<const std::size_t> group1_counts, std::size_t cluster_size,
                         const PermutationPlan& plan, Visitor&& visit) {
    const std::size_t n = group1_counts.size();
    if (cluster_size == 0 || cluster_size > 31) {
        throw Error("two-stage randomization supports cluster sizes 1..31");
    }
    for (auto q : group1_counts) {
        if (q > cluster_size) {
            throw Error("group-1 count exceeds cluster size");
        }
    }
    std::vector<std::uint32_t> masks(n, 0);
    const std::span<const std::uint32_t> view(masks);
    const std::uint32_t full = (std::uint32_t{1} << cluster_size) - 1;

    if (plan.exhaustive()) {
        detail::check_cap(two_stage_count(group1_counts, cluster_size), plan);
        std::vector<std::size_t> remaining(cluster_size + 1, 0);
        for (auto q : group1_counts) {
            ++remaining[q];
        }
        // Depth-first over clusters; at each level pick a count with
        // remaining multiplicity, then every subunit mask with that popcount.
        auto recurse = [&](auto&& self, std::size_t i) -> void {
            if (i == n) {
                visit(view);
                return;
            }
            for (std::size_t q = 0; q <= cluster_size; ++q) {
                if (remaining[q] == 0) {
                    continue;
                }
                --remaining[q];
                for (std::uint32_t m = 0; m <= full; ++m) {
                    if (static_cast<std::size_t>(std::popcount(m)) == q) {
                        masks[i] = m;
                        self(self, i + 1);
                    }
                }
                ++remaining[q];
            }
        };
        recurse(recurse, 0);
        return;
    }

    if (plan.draws == 0) {
        throw Error("Monte-Carlo mode needs at least one draw");
    }
    std::vector<std::size_t> counts(group1_counts.begin(), group1_counts.end());
    std::vector<std::size_t> scratch, pick;
    for (std::size_t b = 0; b < plan.draws; b += PermutationPlan::chunk) {
        RngStream rng(plan.seed, b / PermutationPlan::chunk);
        const auto end = std::min(plan.draws, b + PermutationPlan::chunk);
        for (auto d = b; d < end; ++d) {
            for (std::size_t i = n; i > 1; --i) {
                std::swap(counts[i - 1], counts[static_cast<std::size_t>(rng.below(i))]);
            }
            for (std::size_t i = 0; i < n; ++i) {
                pick.resize(counts[i]);
                detail::random_subset(cluster_size, scratch, pick, rng);
                std::uint32_t m = 0;
                for (auto j : pick) {
                    m |= std::uint32_t{1} << j;
                }
                masks[i] = m;
            }
            visit(view);
        }
    }
}

} // namespace clusrank
