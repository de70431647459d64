#pragma once

#include "clusrank/sample.hpp"
#include "clusrank/types.hpp"

namespace clusrank {

/// Within-cluster resampling rank-sum test for two groups. Group labels may
/// vary within clusters; strictly contralateral designs are rejected.
TestResult ds_ranksum(const ClusteredSample& sample, Alternative alternative = Alternative::two_sided,
                      double mu = 0.0);

/// Chi-square test (m - 1 df) for m >= 3 groups built from the group-vs-rest
/// statistics of the first m - 1 groups and their cluster-level residual
/// covariance.
TestResult ds_ranksum_multigroup(const ClusteredSample& sample);

} // namespace clusrank
