#include "clusrank/signedrank_rgl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clusrank/distributions.hpp"
#include "common.hpp"

namespace clusrank {

namespace {

// Per-cluster contributions c_i, so that T = Σ c_i and the randomization
// variance is Σ c_i². Balanced: c_i = S_{i+}; weighted: c_i = ŵ_i S̄_i.
struct SignedRankTerms {
    std::vector<double> contributions;
    std::size_t nonzero = 0;
    bool weighted = false;
    std::vector<std::string> warnings;
};

SignedRankTerms signed_rank_terms(const ClusteredSample& sample, double mu, SignedRankWeighting weighting) {
    internal::require_paired(sample);
    const auto values = internal::shift_all(sample, mu);

    std::vector<double> magnitudes;
    std::vector<std::size_t> owner; // retained cluster of each nonzero value
    std::vector<int> sign;
    std::vector<std::size_t> sizes;
    SignedRankTerms out;
    std::string dropped;
    for (std::size_t i = 0; i < sample.cluster_count(); ++i) {
        std::size_t kept = 0;
        for (auto k = sample.cluster_begin(i); k < sample.cluster_end(i); ++k) {
            if (values[k] != 0.0) {
                magnitudes.push_back(std::fabs(values[k]));
                sign.push_back(values[k] > 0.0 ? 1 : -1);
                owner.push_back(sizes.size());
                ++kept;
            }
        }
        if (kept == 0) {
            dropped += " " + sample.cluster_labels()[i];
        } else {
            sizes.push_back(kept);
        }
    }
    if (magnitudes.empty()) {
        throw Error("all differences are zero");
    }
    if (!dropped.empty()) {
        out.warnings.push_back("clusters with only zero differences dropped:" + dropped);
    }
    if (sizes.size() < 2) {
        throw Error("fewer than 2 clusters with nonzero differences");
    }

    const auto ranks = midranks(magnitudes);
    const std::size_t n = sizes.size();
    std::vector<double> sums(n, 0.0), squares(n, 0.0);
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        const double s = sign[k] * ranks[k];
        sums[owner[k]] += s;
        squares[owner[k]] += s * s;
    }
    out.nonzero = ranks.size();

    const auto largest = *std::max_element(sizes.begin(), sizes.end());
    const bool balanced = std::all_of(sizes.begin(), sizes.end(), [&](auto s) { return s == sizes.front(); });
    out.weighted = weighting == SignedRankWeighting::weighted || !balanced;
    if (!out.weighted) {
        out.contributions = std::move(sums);
        return out;
    }

    // Shared-correlation moment estimates from the signed ranks.
    double total_sq = 0.0, cross = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total_sq += squares[i];
        cross += sums[i] * sums[i] - squares[i];
        const auto ni = static_cast<double>(sizes[i]);
        pairs += ni * (ni - 1.0);
    }
    const double sigma2 = total_sq / static_cast<double>(out.nonzero);
    double rho = pairs > 0.0 ? cross / pairs / sigma2 : 0.0;
    if (largest > 1) {
        rho = std::clamp(rho, -1.0 / static_cast<double>(largest - 1) + 1e-6, 1.0 - 1e-6);
    }
    out.contributions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ni = static_cast<double>(sizes[i]);
        const double var_mean = sigma2 * (1.0 + (ni - 1.0) * rho) / ni;
        out.contributions[i] = (sums[i] / ni) / var_mean;
    }
    return out;
}

TestResult fill(const ClusteredSample& sample, const SignedRankTerms& terms, Alternative alternative,
                std::string method) {
    double t = 0.0, var = 0.0;
    for (double c : terms.contributions) {
        t += c;
        var += c * c;
    }
    if (!(var > 0.0)) {
        throw Error("signed-rank statistic has zero variance");
    }
    auto r = internal::base_result(sample, std::move(method), alternative);
    r.n_groups = 0;
    r.observed = t;
    r.null_mean = 0.0;
    r.variance = var;
    r.z = t / std::sqrt(var);
    r.warnings = terms.warnings;
    return r;
}

} // namespace

TestResult rgl_signedrank(const ClusteredSample& sample, Alternative alternative, double mu,
                          SignedRankWeighting weighting) {
    const auto terms = signed_rank_terms(sample, mu, weighting);
    auto r = fill(sample, terms, alternative, internal::rgl_signedrank_name);
    r.statistic_name = "Z";
    r.statistic = r.z;
    r.p_value = p_value(r.z, alternative);
    return r;
}

TestResult rgl_signedrank_exact(const ClusteredSample& sample, Alternative alternative, double mu, std::size_t draws,
                                std::uint64_t seed, double cap) {
    const auto terms = signed_rank_terms(sample, mu, SignedRankWeighting::automatic);
    const auto plan = PermutationPlan::from_draws(draws, seed, cap);
    auto r = fill(sample, terms, alternative,
                  std::string(internal::rgl_signedrank_name) +
                      (plan.exhaustive() ? " (exact permutation)" : " (Monte-Carlo permutation)"));

    PermutationTally tally(r.observed, 0.0, alternative);
    const auto& c = terms.contributions;
    enumerate_sign_flips(c.size(), plan, [&](std::span<const int> signs) {
        double t = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            t += signs[i] * c[i];
        }
        tally.add(t);
    });
    r.statistic_name = "T";
    r.statistic = r.observed;
    r.p_value = tally.p_value(plan.mode);
    r.permutations = tally.total();
    r.exhaustive = plan.exhaustive();
    return r;
}

} // namespace clusrank
