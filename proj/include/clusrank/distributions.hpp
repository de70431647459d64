#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "clusrank/types.hpp"

namespace clusrank {

/// Standard normal CDF. Throws on NaN.
double std_normal_cdf(double z);

/// Upper tail P(X > x) of a chi-square variable with `df` degrees of freedom.
double chi_square_sf(double x, int df);

/// Asymptotic p-value of a standard normal statistic, no continuity correction.
/// `greater` means group 1 (or the paired location) exceeds the null.
double p_value(double z, Alternative alternative);

enum class CorrelationStructure { exchangeable, ar1 };

CorrelationStructure parse_structure(std::string_view text);
std::string_view to_string(CorrelationStructure s);

struct CorrelationSpec {
    CorrelationStructure structure = CorrelationStructure::exchangeable;
    double rho = 0.0;
    int dim = 1;
};

/// Correlation matrix for `spec`; rejects parameterizations that are not
/// positive definite (minimum eigenvalue below 1e-10).
Eigen::MatrixXd build_correlation(const CorrelationSpec& spec);

/// Deterministic 64-bit stream. Substreams are keyed by (seed, index) so
/// parallel consumers draw from independent sequences regardless of
/// scheduling.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    explicit RngStream(std::uint64_t seed, std::uint64_t index = 0);

    engine_type& engine() { return engine_; }
    double normal() { return normal_(engine_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_;
};

/// Precomputed lower-triangular factor for repeated MVN draws.
class MvnSampler {
public:
    explicit MvnSampler(const Eigen::MatrixXd& corr);

    int dim() const { return static_cast<int>(lower_.rows()); }
    /// One draw with common mean `mean`, appended to `out`.
    void draw(double mean, RngStream& rng, std::vector<double>& out) const;

private:
    Eigen::MatrixXd lower_;
};

/// `n` draws from MVN(mean·1, corr), one vector per row.
std::vector<std::vector<double>> mvn_sample(std::size_t n, double mean, const Eigen::MatrixXd& corr,
                                            RngStream& rng);

} // namespace clusrank
