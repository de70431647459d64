#include "clusrank/ranksum_ds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "clusrank/distributions.hpp"
#include "common.hpp"

namespace clusrank {

namespace {

// Pooled quantities shared by every group-vs-rest contrast.
//
// For x, sum_j F_j(x) is a weighted count with weight 1/n_j per observation
// of cluster j; holding the sorted values with prefix sums of those weights
// turns each evaluation into two binary searches.
class DsContext {
public:
    DsContext(const ClusteredSample& sample, std::vector<double> values)
        : sample_(sample), values_(std::move(values)) {
        const std::size_t n_obs = values_.size();
        std::vector<std::size_t> order(n_obs);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values_[a] < values_[b]; });
        sorted_.resize(n_obs);
        prefix_.assign(n_obs + 1, 0.0);
        const auto codes = sample.cluster_codes();
        for (std::size_t p = 0; p < n_obs; ++p) {
            sorted_[p] = values_[order[p]];
            prefix_[p + 1] =
                prefix_[p] + 1.0 / static_cast<double>(sample.cluster_size(static_cast<std::size_t>(codes[order[p]])));
        }
        for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
            clusters_.emplace_back(std::span<const double>(values_).subspan(sample.cluster_begin(i),
                                                                            sample.cluster_size(i)));
        }
        // per record: sum_{j != i} (F_j(x) + F_j(x-)) and F̂(x) + F̂(x-)
        cross_.resize(n_obs);
        pooled_.resize(n_obs);
        const auto m = static_cast<double>(n_obs);
        for (std::size_t k = 0; k < n_obs; ++k) {
            const double x = values_[k];
            const auto hi = static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
            const auto lo = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
            const auto& own = clusters_[static_cast<std::size_t>(codes[k])];
            cross_[k] = prefix_[hi] + prefix_[lo] - own.at(x) - own.left_limit(x);
            pooled_[k] = static_cast<double>(hi + lo) / m;
        }
    }

    struct Contrast {
        double s = 0.0;
        double expected = 0.0;
        std::vector<double> residuals; // Ŵ_i - E(W_i)
    };

    // Group `code` against all other groups.
    Contrast contrast(int code) const {
        const std::size_t n = sample_.cluster_count();
        const auto nn = static_cast<double>(n);
        const auto groups = sample_.group_codes();

        std::vector<double> share(n, 0.0); // n_i1 / n_i
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t in = 0;
            for (auto k = sample_.cluster_begin(i); k < sample_.cluster_end(i); ++k) {
                in += groups[k] == code;
            }
            share[i] = static_cast<double>(in) / static_cast<double>(sample_.cluster_size(i));
        }
        const double share_total = std::accumulate(share.begin(), share.end(), 0.0);

        Contrast out;
        out.residuals.resize(n);
        out.expected = 0.5 * share_total;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ni = static_cast<double>(sample_.cluster_size(i));
            const double others = share_total - share[i];
            double s_i = 0.0, w_i = 0.0;
            for (auto k = sample_.cluster_begin(i); k < sample_.cluster_end(i); ++k) {
                const double delta = groups[k] == code ? 1.0 : 0.0;
                s_i += delta * (1.0 + 0.5 * cross_[k]);
                w_i += ((nn - 1.0) * delta - others) * pooled_[k];
            }
            out.s += s_i / ni;
            const double w_hat = w_i / (2.0 * ni * (nn + 1.0));
            const double w_mean = nn / (2.0 * (nn + 1.0)) * (share[i] - share_total / nn);
            out.residuals[i] = w_hat - w_mean;
        }
        out.s /= nn + 1.0;
        return out;
    }

private:
    const ClusteredSample& sample_;
    std::vector<double> values_;
    std::vector<double> sorted_;
    std::vector<double> prefix_;
    std::vector<SortedEcdf> clusters_;
    std::vector<double> cross_;
    std::vector<double> pooled_;
};

bool strictly_contralateral(const ClusteredSample& sample) {
    const auto groups = sample.group_codes();
    for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
        if (sample.cluster_size(i) != 2) {
            return false;
        }
        const auto b = sample.cluster_begin(i);
        if (groups[b] == groups[b + 1]) {
            return false;
        }
    }
    return true;
}

} // namespace

TestResult ds_ranksum(const ClusteredSample& sample, Alternative alternative, double mu) {
    internal::require_unpaired(sample);
    internal::require_two_groups(sample);
    if (strictly_contralateral(sample)) {
        throw Error("the DS rank-sum test cannot be applied to strictly contralateral data "
                    "(every cluster holds exactly one subunit per group)");
    }
    const DsContext ctx(sample, internal::shift_group1(sample, mu));
    const auto c = ctx.contrast(0);
    double var = 0.0;
    for (double e : c.residuals) {
        var += e * e;
    }
    if (!(var > 0.0)) {
        throw Error("estimated variance of S is zero");
    }
    auto r = internal::base_result(sample, internal::ds_ranksum_name, alternative);
    r.statistic_name = "Z";
    r.observed = c.s;
    r.null_mean = c.expected;
    r.variance = var;
    r.z = (c.s - c.expected) / std::sqrt(var);
    r.statistic = r.z;
    r.p_value = p_value(r.z, alternative);
    return r;
}

TestResult ds_ranksum_multigroup(const ClusteredSample& sample) {
    internal::require_unpaired(sample);
    const auto m = static_cast<int>(sample.group_count());
    if (m < 3) {
        throw Error("m < 3 effective groups; use the two-group test");
    }
    const DsContext ctx(sample, std::vector<double>(sample.values().begin(), sample.values().end()));
    const auto n = static_cast<Eigen::Index>(sample.cluster_count());
    Eigen::MatrixXd resid(n, m - 1);
    Eigen::VectorXd d(m - 1);
    for (int k = 0; k < m - 1; ++k) {
        const auto c = ctx.contrast(k);
        d(k) = c.s - c.expected;
        for (Eigen::Index i = 0; i < n; ++i) {
            resid(i, k) = c.residuals[static_cast<std::size_t>(i)];
        }
    }
    const Eigen::MatrixXd cov = resid.transpose() * resid;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov);
    const auto& sv = svd.singularValues();
    // near-zero spectrum is rounding noise
    const double cond = sv(sv.size() - 1) > 1e-20 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond < 1e12)) {
        throw Error("singular group covariance (condition number " + std::to_string(cond) + ")");
    }
    const double stat = d.dot(cov.ldlt().solve(d));

    auto r = internal::base_result(sample, std::string(internal::ds_ranksum_name) + " using Chi-square test",
                                   Alternative::two_sided);
    r.statistic_name = "chi-square";
    r.statistic = stat;
    r.observed = stat;
    r.df = m - 1;
    r.p_value = chi_square_sf(stat, m - 1);
    return r;
}

} // namespace clusrank
