#include "clusrank/signedrank_ds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clusrank/distributions.hpp"
#include "common.hpp"

namespace clusrank {

TestResult ds_signedrank(const ClusteredSample& sample, Alternative alternative, double mu) {
    internal::require_paired(sample);
    const auto values = internal::shift_all(sample, mu);
    const std::size_t n = sample.cluster_count();
    const std::size_t n_obs = values.size();
    const auto nn = static_cast<double>(n);
    const auto codes = sample.cluster_codes();

    std::vector<double> magnitude(n_obs);
    std::transform(values.begin(), values.end(), magnitude.begin(), [](double v) { return std::fabs(v); });

    // Σ_j Ĥ_j(x) from a weighted sorted pass (weight 1/n_j), pooled Ĥ from
    // plain counts.
    std::vector<std::size_t> order(n_obs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return magnitude[a] < magnitude[b]; });
    std::vector<double> sorted(n_obs), prefix(n_obs + 1, 0.0);
    for (std::size_t p = 0; p < n_obs; ++p) {
        sorted[p] = magnitude[order[p]];
        prefix[p + 1] =
            prefix[p] + 1.0 / static_cast<double>(sample.cluster_size(static_cast<std::size_t>(codes[order[p]])));
    }
    std::vector<SortedEcdf> own;
    own.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        own.emplace_back(std::span<const double>(magnitude).subspan(sample.cluster_begin(i), sample.cluster_size(i)));
    }

    double t = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ni = static_cast<double>(sample.cluster_size(i));
        double balance = 0.0, cross = 0.0, pooled = 0.0;
        for (auto k = sample.cluster_begin(i); k < sample.cluster_end(i); ++k) {
            if (values[k] == 0.0) {
                continue;
            }
            const double v = values[k] > 0.0 ? 1.0 : -1.0;
            const double x = magnitude[k];
            const auto hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
            const auto lo = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
            balance += v;
            cross += v * (0.5 * (prefix[hi] + prefix[lo]) - own[i].mid(x));
            pooled += v * 0.5 * static_cast<double>(hi + lo) / static_cast<double>(n_obs);
        }
        t += balance / ni + cross / ni;
        const double s_i = balance / ni + (nn - 1.0) / ni * pooled;
        var += s_i * s_i;
    }
    if (!(var > 0.0)) {
        throw Error("estimated variance of T is zero");
    }

    auto r = internal::base_result(sample, internal::ds_signedrank_name, alternative);
    r.n_groups = 0;
    r.statistic_name = "Z";
    r.observed = t;
    r.null_mean = 0.0;
    r.variance = var;
    r.z = t / std::sqrt(var);
    r.statistic = r.z;
    r.p_value = p_value(r.z, alternative);
    return r;
}

} // namespace clusrank
