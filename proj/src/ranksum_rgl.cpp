#include "clusrank/ranksum_rgl.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "clusrank/distributions.hpp"
#include "common.hpp"

namespace clusrank {

namespace {

using internal::base_result;

// One (stratum, cluster size) cell of the cluster-level test.
struct Cell {
    std::vector<double> rank_sums;
    std::vector<std::size_t> group1; // positions into rank_sums
    double observed = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

struct CellSet {
    std::vector<Cell> cells;
    std::vector<std::string> warnings;
    double observed = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

void require_cluster_level(const ClusteredSample& sample) {
    internal::require_unpaired(sample);
    internal::require_two_groups(sample);
    if (!sample.cluster_level_grouping()) {
        throw Error("mixed groups within a cluster; cluster-level grouping required");
    }
}

// Cluster -> stratum code, rejecting clusters that span strata.
std::vector<int> cluster_strata(const ClusteredSample& sample) {
    std::vector<int> out(sample.cluster_count(), 0);
    if (!sample.has_strata()) {
        return out;
    }
    const auto strata = sample.stratum_codes();
    for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
        const int s = strata[sample.cluster_begin(i)];
        for (auto k = sample.cluster_begin(i); k < sample.cluster_end(i); ++k) {
            if (strata[k] != s) {
                throw Error("cluster '" + sample.cluster_labels()[i] + "' spans two strata");
            }
        }
        out[i] = s;
    }
    return out;
}

// Mid-ranks computed separately inside each stratum code.
std::vector<double> ranks_within(std::span<const double> values, std::span<const int> codes, int n_codes) {
    std::vector<double> ranks(values.size());
    for (int s = 0; s < n_codes; ++s) {
        std::vector<std::size_t> idx;
        std::vector<double> sub;
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (codes[k] == s) {
                idx.push_back(k);
                sub.push_back(values[k]);
            }
        }
        const auto r = midranks(sub);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            ranks[idx[j]] = r[j];
        }
    }
    return ranks;
}

CellSet build_cells(const ClusteredSample& sample, double mu, bool stratified) {
    const auto values = internal::shift_group1(sample, mu);
    const auto strata = stratified ? cluster_strata(sample) : std::vector<int>(sample.cluster_count(), 0);

    std::vector<double> ranks;
    if (stratified) {
        std::vector<int> record_strata(sample.size());
        for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
            for (auto k = sample.cluster_begin(i); k < sample.cluster_end(i); ++k) {
                record_strata[k] = strata[i];
            }
        }
        ranks = ranks_within(values, record_strata, static_cast<int>(sample.stratum_count()));
    } else {
        ranks = midranks(values);
    }

    std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
        members[{strata[i], sample.cluster_size(i)}].push_back(i);
    }

    CellSet out;
    for (const auto& [key, clusters] : members) {
        Cell cell;
        for (auto i : clusters) {
            double rs = 0.0;
            for (auto k = sample.cluster_begin(i); k < sample.cluster_end(i); ++k) {
                rs += ranks[k];
            }
            if (sample.cluster_group(i) == 0) {
                cell.group1.push_back(cell.rank_sums.size());
            }
            cell.rank_sums.push_back(rs);
        }
        const std::size_t n_total = cell.rank_sums.size();
        const std::size_t m = cell.group1.size();
        if (m == 0 || m == n_total) {
            std::string msg = "cluster size " + std::to_string(key.second);
            if (stratified) {
                msg += " in stratum '" + sample.stratum_labels()[static_cast<std::size_t>(key.first)] + "'";
            }
            msg += " has a single group; skipped clusters:";
            for (auto i : clusters) {
                msg += " " + sample.cluster_labels()[i];
            }
            out.warnings.push_back(std::move(msg));
            continue;
        }
        const auto nn = static_cast<double>(n_total);
        const auto mm = static_cast<double>(m);
        double total = 0.0;
        for (double r : cell.rank_sums) {
            total += r;
        }
        double ss = 0.0;
        for (double r : cell.rank_sums) {
            ss += (r - total / nn) * (r - total / nn);
        }
        for (auto p : cell.group1) {
            cell.observed += cell.rank_sums[p];
        }
        cell.mean = mm * total / nn;
        cell.variance = mm * (nn - mm) / (nn * (nn - 1.0)) * ss;
        out.observed += cell.observed;
        out.mean += cell.mean;
        out.variance += cell.variance;
        out.cells.push_back(std::move(cell));
    }
    if (out.cells.empty() || !(out.variance > 0.0)) {
        throw Error("no cluster-size stratum with both groups and nonzero variance; W has no null variance");
    }
    return out;
}

TestResult asymptotic(const ClusteredSample& sample, Alternative alternative, double mu, bool stratified) {
    require_cluster_level(sample);
    auto cells = build_cells(sample, mu, stratified);
    auto r = base_result(sample, internal::rgl_ranksum_name, alternative);
    r.statistic_name = "Z";
    r.observed = cells.observed;
    r.null_mean = cells.mean;
    r.variance = cells.variance;
    r.z = (cells.observed - cells.mean) / std::sqrt(cells.variance);
    r.statistic = r.z;
    r.p_value = p_value(r.z, alternative);
    r.warnings = std::move(cells.warnings);
    return r;
}

// Two-stage moments for a set of equal-size clusters, ranked among themselves.
struct BalancedMoments {
    double observed = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    std::size_t group1_obs = 0;
    std::size_t group2_obs = 0;
};

BalancedMoments balanced_moments(const ClusteredSample& sample, std::span<const double> values,
                                 std::span<const std::size_t> clusters, std::size_t g) {
    const std::size_t n = clusters.size();
    std::vector<double> sub;
    sub.reserve(n * g);
    for (auto i : clusters) {
        for (auto k = sample.cluster_begin(i); k < sample.cluster_end(i); ++k) {
            sub.push_back(values[k]);
        }
    }
    const auto ranks = midranks(sub);
    const auto groups = sample.group_codes();

    const auto nn = static_cast<double>(n);
    const auto gg = static_cast<double>(g);
    BalancedMoments out;
    double q_sum = 0.0, q_sq = 0.0, q_cross = 0.0, s_b = 0.0, s_w = 0.0;
    const double center = gg * (gg * nn + 1.0) / 2.0;
    for (std::size_t c = 0; c < n; ++c) {
        const auto begin = sample.cluster_begin(clusters[c]);
        double rs = 0.0;
        std::size_t q = 0;
        for (std::size_t j = 0; j < g; ++j) {
            const double r = ranks[c * g + j];
            rs += r;
            if (groups[begin + j] == 0) {
                ++q;
                out.observed += r;
            }
        }
        for (std::size_t j = 0; j < g; ++j) {
            const double d = ranks[c * g + j] - rs / gg;
            s_w += d * d;
        }
        const auto qd = static_cast<double>(q);
        q_sum += qd;
        q_sq += qd * qd;
        q_cross += qd * (gg - qd);
        s_b += (rs - center) * (rs - center);
        out.group1_obs += q;
        out.group2_obs += g - q;
    }
    s_b /= nn;
    const double q_mean = q_sum / nn;
    const double q_var = q_sq / nn - q_mean * q_mean;
    out.mean = (gg * nn + 1.0) / 2.0 * q_sum;
    out.variance = nn * nn / ((nn - 1.0) * gg * gg) * q_var * s_b;
    if (g > 1) {
        s_w /= nn * (gg - 1.0);
        out.variance += nn * (q_cross / nn) * s_w / gg;
    }
    return out;
}

} // namespace

TestResult rgl_ranksum(const ClusteredSample& sample, Alternative alternative, double mu) {
    return asymptotic(sample, alternative, mu, false);
}

TestResult rgl_ranksum_stratified(const ClusteredSample& sample, Alternative alternative, double mu) {
    if (!sample.has_strata()) {
        throw Error("stratified test needs a stratum label on every record");
    }
    return asymptotic(sample, alternative, mu, true);
}

TestResult rgl_ranksum_exact(const ClusteredSample& sample, Alternative alternative, double mu, std::size_t draws,
                             std::uint64_t seed, double cap) {
    require_cluster_level(sample);
    const auto cells = build_cells(sample, mu, sample.has_strata());
    const auto plan = PermutationPlan::from_draws(draws, seed, cap);

    std::vector<StratumCount> counts;
    for (const auto& c : cells.cells) {
        counts.push_back({c.rank_sums.size(), c.group1.size()});
    }
    PermutationTally tally(cells.observed, cells.mean, alternative);
    enumerate_assignments(plan, counts, [&](std::span<const std::vector<std::size_t>> chosen) {
        double w = 0.0;
        for (std::size_t s = 0; s < chosen.size(); ++s) {
            for (auto p : chosen[s]) {
                w += cells.cells[s].rank_sums[p];
            }
        }
        tally.add(w);
    });

    auto r = base_result(sample,
                         std::string(internal::rgl_ranksum_name) +
                             (plan.exhaustive() ? " (exact permutation)" : " (Monte-Carlo permutation)"),
                         alternative);
    r.statistic_name = "W";
    r.statistic = cells.observed;
    r.observed = cells.observed;
    r.null_mean = cells.mean;
    r.variance = cells.variance;
    r.z = (cells.observed - cells.mean) / std::sqrt(cells.variance);
    r.p_value = tally.p_value(plan.mode);
    r.permutations = tally.total();
    r.exhaustive = plan.exhaustive();
    r.warnings = cells.warnings;
    return r;
}

TestResult rgl_ranksum_subunit_balanced(const ClusteredSample& sample, Alternative alternative, double mu) {
    internal::require_unpaired(sample);
    internal::require_two_groups(sample);
    const std::size_t g = sample.cluster_size(0);
    for (std::size_t i = 1; i < sample.cluster_count(); ++i) {
        if (sample.cluster_size(i) != g) {
            throw Error("unequal cluster sizes; the balanced subunit test needs one cluster size");
        }
    }
    std::vector<std::size_t> clusters(sample.cluster_count());
    std::iota(clusters.begin(), clusters.end(), std::size_t{0});
    const auto values = internal::shift_group1(sample, mu);
    const auto m = balanced_moments(sample, values, clusters, g);
    if (m.group1_obs == 0 || m.group2_obs == 0 || !(m.variance > 0.0)) {
        throw Error("no group contrast: group-1 counts give no randomization variance");
    }
    auto r = base_result(sample, internal::rgl_ranksum_name, alternative);
    r.statistic_name = "Z";
    r.observed = m.observed;
    r.null_mean = m.mean;
    r.variance = m.variance;
    r.z = (m.observed - m.mean) / std::sqrt(m.variance);
    r.statistic = r.z;
    r.p_value = p_value(r.z, alternative);
    return r;
}

TestResult rgl_ranksum_subunit(const ClusteredSample& sample, Alternative alternative, double mu) {
    internal::require_unpaired(sample);
    internal::require_two_groups(sample);
    const auto values = internal::shift_group1(sample, mu);

    std::map<std::size_t, std::vector<std::size_t>> by_size;
    for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
        by_size[sample.cluster_size(i)].push_back(i);
    }

    auto r = base_result(sample, internal::rgl_ranksum_name, alternative);
    double weight_sum = 0.0, weighted = 0.0;
    for (const auto& [g, clusters] : by_size) {
        if (clusters.size() < 2) {
            r.warnings.push_back("cluster size " + std::to_string(g) + " has a single cluster; skipped");
            continue;
        }
        const auto m = balanced_moments(sample, values, clusters, g);
        if (m.group1_obs == 0 || m.group2_obs == 0) {
            r.warnings.push_back("cluster size " + std::to_string(g) + " has a single group; skipped");
            continue;
        }
        if (!(m.variance > 0.0)) {
            r.warnings.push_back("cluster size " + std::to_string(g) + " has zero variance; skipped");
            continue;
        }
        const auto a = static_cast<double>(m.group1_obs);
        const auto b = static_cast<double>(m.group2_obs);
        const double u = m.observed - a * (a + 1.0) / 2.0;
        const double theta = u / (a * b);
        const double w = (a * b) * (a * b) / m.variance;
        weighted += w * theta;
        weight_sum += w;
    }
    if (weight_sum == 0.0) {
        throw Error("no cluster-size stratum with both groups");
    }
    r.statistic_name = "Z";
    r.observed = weighted / weight_sum;
    r.null_mean = 0.5;
    r.variance = 1.0 / weight_sum;
    r.z = (r.observed - 0.5) / std::sqrt(r.variance);
    r.statistic = r.z;
    r.p_value = p_value(r.z, alternative);
    return r;
}

} // namespace clusrank
