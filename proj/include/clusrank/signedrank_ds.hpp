#pragma once

#include "clusrank/sample.hpp"
#include "clusrank/types.hpp"

namespace clusrank {

/// Within-cluster resampling signed-rank test, valid under informative
/// cluster sizes. Zero differences keep their place in n_i but carry no sign.
TestResult ds_signedrank(const ClusteredSample& sample, Alternative alternative = Alternative::two_sided,
                         double mu = 0.0);

} // namespace clusrank
