#include "clusrank/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace clusrank {

std::string_view to_string(Alternative alt) {
    switch (alt) {
    case Alternative::two_sided:
        return "two-sided";
    case Alternative::less:
        return "less";
    case Alternative::greater:
        return "greater";
    }
    return "two-sided";
}

Alternative parse_alternative(std::string_view text) {
    if (text == "two-sided" || text == "two_sided" || text == "two.sided") {
        return Alternative::two_sided;
    }
    if (text == "less") {
        return Alternative::less;
    }
    if (text == "greater") {
        return Alternative::greater;
    }
    throw Error("unknown alternative '" + std::string(text) + "'");
}

double std_normal_cdf(double z) {
    if (std::isnan(z)) {
        throw Error("normal cdf of NaN");
    }
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double chi_square_sf(double x, int df) {
    if (df <= 0) {
        throw Error("chi-square degrees of freedom must be positive");
    }
    if (std::isnan(x) || x < 0.0) {
        throw Error("chi-square argument must be non-negative");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double p_value(double z, Alternative alternative) {
    switch (alternative) {
    case Alternative::greater:
        return std_normal_cdf(-z);
    case Alternative::less:
        return std_normal_cdf(z);
    case Alternative::two_sided:
        break;
    }
    return std::min(1.0, 2.0 * std_normal_cdf(-std::fabs(z)));
}

CorrelationStructure parse_structure(std::string_view text) {
    if (text == "ex" || text == "exchangeable") {
        return CorrelationStructure::exchangeable;
    }
    if (text == "ar1") {
        return CorrelationStructure::ar1;
    }
    throw Error("unknown correlation structure '" + std::string(text) + "'");
}

std::string_view to_string(CorrelationStructure s) {
    return s == CorrelationStructure::ar1 ? "ar1" : "ex";
}

Eigen::MatrixXd build_correlation(const CorrelationSpec& spec) {
    if (spec.dim < 1) {
        throw Error("correlation dimension must be positive");
    }
    if (!std::isfinite(spec.rho)) {
        throw Error("correlation parameter must be finite");
    }
    const int d = spec.dim;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) {
                m(i, j) = 1.0;
            } else if (spec.structure == CorrelationStructure::exchangeable) {
                m(i, j) = spec.rho;
            } else {
                m(i, j) = std::pow(spec.rho, std::abs(i - j));
            }
        }
    }
    if (d > 1) {
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();
        if (min_eig < 1e-10) {
            throw Error("correlation matrix (" + std::string(to_string(spec.structure)) +
                        ", rho=" + std::to_string(spec.rho) + ", dim=" + std::to_string(d) +
                        ") is not positive definite");
        }
    }
    return m;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x636c7573u};
    engine_.seed(seq);
}

MvnSampler::MvnSampler(const Eigen::MatrixXd& corr) {
    if (corr.rows() != corr.cols() || corr.rows() == 0) {
        throw Error("correlation matrix must be square and non-empty");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success) {
        throw Error("correlation matrix factorization failed");
    }
    lower_ = llt.matrixL();
}

void MvnSampler::draw(double mean, RngStream& rng, std::vector<double>& out) const {
    const auto d = lower_.rows();
    Eigen::VectorXd e(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        e(k) = rng.normal();
    }
    const Eigen::VectorXd z = lower_.triangularView<Eigen::Lower>() * e;
    for (Eigen::Index k = 0; k < d; ++k) {
        out.push_back(mean + z(k));
    }
}

std::vector<std::vector<double>> mvn_sample(std::size_t n, double mean, const Eigen::MatrixXd& corr,
                                            RngStream& rng) {
    const MvnSampler sampler(corr);
    std::vector<std::vector<double>> out(n);
    for (auto& v : out) {
        v.reserve(static_cast<std::size_t>(sampler.dim()));
        sampler.draw(mean, rng, v);
    }
    return out;
}

} // namespace clusrank
