#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clusrank {

/// Raised for invalid input and for data on which a test is undefined.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Alternative { two_sided, less, greater };

std::string_view to_string(Alternative alt);
Alternative parse_alternative(std::string_view text);

/// Outcome of any of the clustered tests.
///
/// `statistic` holds the reported statistic (Z for the asymptotic tests,
/// the raw W or T for permutation tests, the quadratic form for the
/// multi-group test). `observed`, `null_mean` and `variance` always describe
/// the unstandardized statistic so callers can recompute Z themselves.
struct TestResult {
    std::string method;
    std::string statistic_name;
    double statistic = std::numeric_limits<double>::quiet_NaN();
    double observed = std::numeric_limits<double>::quiet_NaN();
    double null_mean = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double z = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    Alternative alternative = Alternative::two_sided;
    std::optional<int> df;
    std::size_t n_obs = 0;
    std::size_t n_clusters = 0;
    std::size_t n_groups = 0;
    // Arrangements scored by a permutation test (exhaustive count or B).
    std::optional<std::size_t> permutations;
    bool exhaustive = false;
    std::vector<std::string> warnings;
};

} // namespace clusrank
