#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "clusrank/sample.hpp"

namespace testing_helpers {

using clusrank::ClusteredSample;
using clusrank::Record;

inline ClusteredSample unpaired(const std::vector<double>& x, const std::vector<std::string>& cid,
                                const std::vector<std::string>& grp, const std::vector<std::string>& sid = {}) {
    std::vector<Record> rows;
    for (std::size_t k = 0; k < x.size(); ++k) {
        Record r{x[k], cid[k], grp[k], std::nullopt};
        if (!sid.empty()) {
            r.stratum = sid[k];
        }
        rows.push_back(r);
    }
    return ClusteredSample::ingest(rows, false);
}

inline ClusteredSample paired(const std::vector<double>& x, const std::vector<std::string>& cid) {
    std::vector<Record> rows;
    for (std::size_t k = 0; k < x.size(); ++k) {
        rows.push_back({x[k], cid[k], std::nullopt, std::nullopt});
    }
    return ClusteredSample::ingest(rows, true);
}

// Singleton clusters "c1".."cN".
inline std::vector<std::string> singleton_ids(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back("c" + std::to_string(i + 1));
    }
    return out;
}

// Records of `s` with a value transform and/or group relabeling applied.
inline ClusteredSample transformed(const ClusteredSample& s, const std::function<double(double)>& f) {
    auto rows = s.records();
    for (auto& r : rows) {
        r.value = f(r.value);
    }
    return ClusteredSample::ingest(rows, s.paired());
}

inline ClusteredSample swap_groups(const ClusteredSample& s) {
    auto rows = s.records();
    const auto& labels = s.group_labels();
    for (auto& r : rows) {
        r.group = *r.group == labels[0] ? labels[1] : labels[0];
    }
    return ClusteredSample::ingest(rows, false);
}

struct InstanceShape {
    std::size_t min_clusters = 2;
    std::size_t max_clusters = 8;
    std::size_t max_size = 3;
    bool cluster_level = true;
    bool integer_values = false; // produce ties
};

// Random unpaired instance with both groups present.
inline ClusteredSample random_unpaired(std::mt19937_64& rng, const InstanceShape& shape) {
    std::uniform_int_distribution<std::size_t> n_dist(shape.min_clusters, shape.max_clusters);
    std::uniform_int_distribution<std::size_t> size_dist(1, shape.max_size);
    std::normal_distribution<double> value;
    std::uniform_int_distribution<int> tie_value(0, 5);
    std::bernoulli_distribution coin(0.5);
    while (true) {
        const auto n = n_dist(rng);
        std::vector<Record> rows;
        bool g0 = false, g1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto size = size_dist(rng);
            const bool cluster_group = coin(rng);
            for (std::size_t j = 0; j < size; ++j) {
                const bool grp = shape.cluster_level ? cluster_group : coin(rng);
                (grp ? g1 : g0) = true;
                const double v = shape.integer_values ? tie_value(rng) : value(rng);
                rows.push_back({v, "k" + std::to_string(i), grp ? "B" : "A", std::nullopt});
            }
        }
        if (g0 && g1) {
            return ClusteredSample::ingest(rows, false);
        }
    }
}

inline ClusteredSample random_paired(std::mt19937_64& rng, std::size_t min_clusters, std::size_t max_clusters,
                                     std::size_t max_size, bool integer_values) {
    std::uniform_int_distribution<std::size_t> n_dist(min_clusters, max_clusters);
    std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
    std::normal_distribution<double> value(0.3, 1.0);
    std::uniform_int_distribution<int> tie_value(-3, 4);
    const auto n = n_dist(rng);
    std::vector<Record> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const auto size = size_dist(rng);
        for (std::size_t j = 0; j < size; ++j) {
            const double v = integer_values ? tie_value(rng) : value(rng);
            rows.push_back({v, "k" + std::to_string(i), std::nullopt, std::nullopt});
        }
    }
    return ClusteredSample::ingest(rows, true);
}

// Mid-rank of each entry by direct counting (O(n²)); independent of midranks().
inline std::vector<double> brute_midranks(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double w : v) {
            less += w < v[i];
            equal += w == v[i];
        }
        out[i] = less + (equal + 1.0) / 2.0;
    }
    return out;
}

// Visits every pseudo-sample (one record index per cluster).
inline void for_each_pseudo_sample(const ClusteredSample& s, const std::function<void(const std::vector<std::size_t>&)>& f) {
    const std::size_t n = s.cluster_count();
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) {
        pick[i] = s.cluster_begin(i);
    }
    while (true) {
        f(pick);
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++pick[i] < s.cluster_end(i)) {
                break;
            }
            pick[i] = s.cluster_begin(i);
        }
        if (i == n) {
            return;
        }
    }
}

inline double pseudo_sample_count(const ClusteredSample& s) {
    double c = 1;
    for (std::size_t i = 0; i < s.cluster_count(); ++i) {
        c *= static_cast<double>(s.cluster_size(i));
    }
    return c;
}

// Within-cluster resampling oracle for the DS signed-rank T: average of the
// classic mid-rank signed-rank statistic over all pseudo-samples.
inline double resampled_signed_rank(const ClusteredSample& s, double mu = 0.0) {
    double total = 0.0, count = 0.0;
    const auto values = s.values();
    for_each_pseudo_sample(s, [&](const std::vector<std::size_t>& pick) {
        std::vector<double> mags;
        for (auto k : pick) {
            mags.push_back(std::fabs(values[k] - mu));
        }
        const auto ranks = brute_midranks(mags);
        double stat = 0.0;
        for (std::size_t i = 0; i < pick.size(); ++i) {
            const double x = values[pick[i]] - mu;
            stat += (x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0)) * ranks[i];
        }
        total += stat;
        count += 1.0;
    });
    return total / count;
}

// Within-cluster resampling oracle for the DS rank-sum S: average of
// (group-1 mid-rank sum)/(N+1) over all pseudo-samples.
inline double resampled_rank_sum(const ClusteredSample& s) {
    double total = 0.0, count = 0.0;
    const auto values = s.values();
    const auto groups = s.group_codes();
    const double n = static_cast<double>(s.cluster_count());
    for_each_pseudo_sample(s, [&](const std::vector<std::size_t>& pick) {
        std::vector<double> x;
        for (auto k : pick) {
            x.push_back(values[k]);
        }
        const auto ranks = brute_midranks(x);
        double stat = 0.0;
        for (std::size_t i = 0; i < pick.size(); ++i) {
            if (groups[pick[i]] == 0) {
                stat += ranks[i];
            }
        }
        total += stat / (n + 1.0);
        count += 1.0;
    });
    return total / count;
}

inline bool rel_close(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace testing_helpers
