#pragma once

#include <string>
#include <vector>

#include "clusrank/sample.hpp"
#include "clusrank/types.hpp"

namespace clusrank::internal {

inline constexpr const char* rgl_ranksum_name = "Clustered Wilcoxon rank sum test using Rosner-Glynn-Lee method";
inline constexpr const char* ds_ranksum_name = "Clustered Wilcoxon rank sum test using Datta-Satten method";
inline constexpr const char* rgl_signedrank_name = "Clustered Wilcoxon signed rank test using Rosner-Glynn-Lee method";
inline constexpr const char* ds_signedrank_name = "Clustered Wilcoxon signed rank test using Datta-Satten method";

inline void require_unpaired(const ClusteredSample& sample) {
    if (sample.paired()) {
        throw Error("rank-sum tests need unpaired data with group labels");
    }
}

inline void require_paired(const ClusteredSample& sample) {
    if (!sample.paired()) {
        throw Error("signed-rank tests need paired differences");
    }
}

inline void require_two_groups(const ClusteredSample& sample) {
    if (sample.group_count() != 2) {
        throw Error("test compares exactly 2 groups, found " + std::to_string(sample.group_count()));
    }
}

/// Values with `mu` subtracted from group-1 records (group code 0).
inline std::vector<double> shift_group1(const ClusteredSample& sample, double mu) {
    std::vector<double> v(sample.values().begin(), sample.values().end());
    if (mu != 0.0) {
        const auto groups = sample.group_codes();
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (groups[k] == 0) {
                v[k] -= mu;
            }
        }
    }
    return v;
}

inline std::vector<double> shift_all(const ClusteredSample& sample, double mu) {
    std::vector<double> v(sample.values().begin(), sample.values().end());
    for (auto& x : v) {
        x -= mu;
    }
    return v;
}

inline TestResult base_result(const ClusteredSample& sample, std::string method, Alternative alternative) {
    TestResult r;
    r.method = std::move(method);
    r.alternative = alternative;
    r.n_obs = sample.size();
    r.n_clusters = sample.cluster_count();
    r.n_groups = sample.group_count();
    return r;
}

} // namespace clusrank::internal
