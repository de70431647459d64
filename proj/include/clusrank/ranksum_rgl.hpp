#pragma once

#include <cstddef>
#include <cstdint>

#include "clusrank/permutation.hpp"
#include "clusrank/sample.hpp"
#include "clusrank/types.hpp"

namespace clusrank {

/// Asymptotic rank-sum test for cluster-level grouping. Clusters are
/// stratified by size; sizes carrying only one group are skipped with a
/// warning. `mu` is subtracted from group-1 values before ranking.
TestResult rgl_ranksum(const ClusteredSample& sample, Alternative alternative = Alternative::two_sided,
                       double mu = 0.0);

/// As rgl_ranksum, with ranks computed within each data stratum and moments
/// summed over (stratum, cluster size) cells.
TestResult rgl_ranksum_stratified(const ClusteredSample& sample, Alternative alternative = Alternative::two_sided,
                                  double mu = 0.0);

/// Permutation version: the observed W is referred to the label-exchange
/// distribution within each cell. B = 0 enumerates every arrangement.
/// Strata are honoured when the sample carries them.
TestResult rgl_ranksum_exact(const ClusteredSample& sample, Alternative alternative, double mu, std::size_t draws,
                             std::uint64_t seed = 0, double cap = PermutationPlan::default_cap);

/// Subunit-level grouping with equal cluster sizes, using the two-stage
/// randomization moments.
TestResult rgl_ranksum_subunit_balanced(const ClusteredSample& sample,
                                        Alternative alternative = Alternative::two_sided, double mu = 0.0);

/// Subunit-level grouping with arbitrary cluster sizes: per-size
/// Mann-Whitney estimates combined by inverse-variance weighting.
TestResult rgl_ranksum_subunit(const ClusteredSample& sample, Alternative alternative = Alternative::two_sided,
                               double mu = 0.0);

} // namespace clusrank
