#pragma once

#include <cstddef>
#include <cstdint>

#include "clusrank/permutation.hpp"
#include "clusrank/sample.hpp"
#include "clusrank/types.hpp"

namespace clusrank {

enum class SignedRankWeighting {
    automatic, // balanced statistic iff all retained clusters share one size
    weighted,  // always the weighted statistic
};

/// Clustered signed-rank test on paired differences. Zero differences are
/// dropped, as are clusters left empty (with a warning).
TestResult rgl_signedrank(const ClusteredSample& sample, Alternative alternative = Alternative::two_sided,
                          double mu = 0.0, SignedRankWeighting weighting = SignedRankWeighting::automatic);

/// Sign-flip permutation version; B = 0 enumerates all 2^N flips.
TestResult rgl_signedrank_exact(const ClusteredSample& sample, Alternative alternative, double mu, std::size_t draws,
                                std::uint64_t seed = 0, double cap = PermutationPlan::default_cap);

} // namespace clusrank
