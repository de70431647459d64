#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "clusrank/distributions.hpp"
#include "clusrank/types.hpp"

using namespace clusrank;

namespace {

// Maclaurin series of erf, summed in long double; accurate for |x| <= 4.
double series_phi(double z) {
    const long double x = z / std::numbers::sqrt2;
    long double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
    }
    const long double erf = 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
    return static_cast<double>(0.5L * (1.0L + erf));
}

} // namespace

TEST(Normal, AgreesWithSeriesOracle) {
    for (double z = -4.0; z <= 4.0; z += 0.125) {
        EXPECT_NEAR(std_normal_cdf(z), series_phi(z), 1e-14) << z;
    }
    EXPECT_NEAR(std_normal_cdf(1.959964), 0.975, 1e-6);
    EXPECT_EQ(std_normal_cdf(0.0), 0.5);
}

TEST(Normal, SymmetryAndTails) {
    for (double z = 0.0; z <= 8.0; z += 0.37) {
        EXPECT_NEAR(std_normal_cdf(z) + std_normal_cdf(-z), 1.0, 1e-15);
    }
    EXPECT_GT(std_normal_cdf(-30.0), 0.0);
    EXPECT_EQ(std_normal_cdf(-INFINITY), 0.0);
    EXPECT_EQ(std_normal_cdf(INFINITY), 1.0);
    EXPECT_THROW(std_normal_cdf(std::nan("")), Error);
}

TEST(ChiSquare, ClosedFormTwoDf) {
    for (double x = 0.0; x <= 40.0; x += 0.5) {
        EXPECT_NEAR(chi_square_sf(x, 2), std::exp(-x / 2), 1e-12);
    }
}

TEST(ChiSquare, OneDfIsTwoSidedNormal) {
    for (double z = 0.1; z <= 5.0; z += 0.3) {
        EXPECT_NEAR(chi_square_sf(z * z, 1), 2.0 * (1.0 - series_phi(z)), 1e-12);
    }
}

TEST(ChiSquare, ThreeDfReference) {
    EXPECT_NEAR(chi_square_sf(2.0471, 3), 0.5627, 5e-4);
    EXPECT_EQ(chi_square_sf(0.0, 3), 1.0);
}

TEST(ChiSquare, Errors) {
    EXPECT_THROW(chi_square_sf(1.0, 0), Error);
    EXPECT_THROW(chi_square_sf(-1.0, 2), Error);
}

TEST(PValue, References) {
    EXPECT_NEAR(p_value(-4.4823, Alternative::two_sided), 7.384e-6, 7.384e-6 * 0.02);
    EXPECT_NEAR(p_value(1.3967, Alternative::two_sided), 0.1625, 5e-4);
    EXPECT_NEAR(p_value(-1.5492, Alternative::two_sided), 0.1213, 5e-4);
}

TEST(PValue, Directions) {
    for (double z : {-2.5, -0.3, 0.0, 1.1, 3.0}) {
        const double lo = p_value(z, Alternative::less);
        const double hi = p_value(z, Alternative::greater);
        EXPECT_NEAR(lo + hi, 1.0, 1e-15);
        EXPECT_NEAR(p_value(z, Alternative::two_sided), std::min(1.0, 2.0 * std::min(lo, hi)), 1e-15);
    }
    EXPECT_LT(p_value(2.0, Alternative::greater), 0.05);
    EXPECT_GT(p_value(2.0, Alternative::less), 0.95);
}

TEST(Alternatives, Parse) {
    EXPECT_EQ(parse_alternative("two.sided"), Alternative::two_sided);
    EXPECT_EQ(parse_alternative("less"), Alternative::less);
    EXPECT_EQ(parse_alternative("greater"), Alternative::greater);
    EXPECT_THROW(parse_alternative("bigger"), Error);
    for (auto a : {Alternative::two_sided, Alternative::less, Alternative::greater}) {
        EXPECT_EQ(parse_alternative(to_string(a)), a);
    }
}

TEST(Correlation, Exchangeable) {
    const auto r = build_correlation({CorrelationStructure::exchangeable, 0.3, 3});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_DOUBLE_EQ(r(i, j), i == j ? 1.0 : 0.3);
        }
    }
}

TEST(Correlation, Ar1) {
    const auto r = build_correlation({CorrelationStructure::ar1, 0.5, 3});
    EXPECT_DOUBLE_EQ(r(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(r(0, 2), 0.25);
    EXPECT_DOUBLE_EQ(r(2, 0), 0.25);
    EXPECT_DOUBLE_EQ(r(1, 1), 1.0);
}

TEST(Correlation, RejectsIndefinite) {
    // exchangeable is positive definite only for rho > -1/(d-1)
    EXPECT_THROW(build_correlation({CorrelationStructure::exchangeable, -0.5, 3}), Error);
    EXPECT_NO_THROW(build_correlation({CorrelationStructure::exchangeable, -0.4, 3}));
    EXPECT_THROW(build_correlation({CorrelationStructure::ar1, 1.0, 2}), Error);
    EXPECT_EQ(build_correlation({CorrelationStructure::ar1, 0.7, 1}).rows(), 1);
}

TEST(Correlation, ParseStructure) {
    EXPECT_EQ(parse_structure("ex"), CorrelationStructure::exchangeable);
    EXPECT_EQ(parse_structure("exchangeable"), CorrelationStructure::exchangeable);
    EXPECT_EQ(parse_structure("ar1"), CorrelationStructure::ar1);
    EXPECT_THROW(parse_structure("toeplitz"), Error);
}

TEST(Rng, Deterministic) {
    RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    for (int k = 0; k < 100; ++k) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        EXPECT_NE(x, c.normal());
        EXPECT_NE(x, d.normal());
    }
}

TEST(Rng, BelowRange) {
    RngStream r(1);
    std::vector<int> hits(7, 0);
    for (int k = 0; k < 7000; ++k) {
        const auto v = r.below(7);
        ASSERT_LT(v, 7u);
        ++hits[v];
    }
    for (int h : hits) {
        EXPECT_GT(h, 800);
    }
}

namespace {

Eigen::MatrixXd sample_covariance(const std::vector<std::vector<double>>& draws) {
    const auto d = static_cast<Eigen::Index>(draws.front().size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(draws.size()), d);
    for (std::size_t r = 0; r < draws.size(); ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            x(static_cast<Eigen::Index>(r), c) = draws[r][static_cast<std::size_t>(c)];
        }
    }
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(draws.size() - 1);
}

} // namespace

TEST(Mvn, EmpiricalCovarianceAr1) {
    const auto corr = build_correlation({CorrelationStructure::ar1, 0.6, 4});
    RngStream rng(2024);
    const auto draws = mvn_sample(100000, 1.5, corr, rng);
    ASSERT_EQ(draws.size(), 100000u);
    const auto cov = sample_covariance(draws);
    EXPECT_LT((cov - corr).cwiseAbs().maxCoeff(), 0.02);
    double mean = 0;
    for (const auto& row : draws) {
        mean += row[0];
    }
    EXPECT_NEAR(mean / 1e5, 1.5, 0.02);
}

TEST(Mvn, HighExchangeableCorrelation) {
    const auto corr = build_correlation({CorrelationStructure::exchangeable, 0.9, 3});
    RngStream rng(7);
    const auto cov = sample_covariance(mvn_sample(100000, 0.0, corr, rng));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                EXPECT_NEAR(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), 0.9, 0.01);
            }
        }
    }
}

TEST(Mvn, SamplerMatchesDimension) {
    const MvnSampler s(build_correlation({CorrelationStructure::exchangeable, 0.2, 5}));
    EXPECT_EQ(s.dim(), 5);
    RngStream rng(9);
    std::vector<double> out{1.0};
    s.draw(0.0, rng, out);
    EXPECT_EQ(out.size(), 6u);
    EXPECT_EQ(out[0], 1.0);
}
