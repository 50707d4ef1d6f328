#pragma once

#include "linkadapt/types.hpp"

namespace linkadapt {

// Ground truth for small N: enumerate every bit tuple over {0} u {2..b_max},
// powers from the active-BER relation, keep the feasible tuple with the
// smallest scalarized objective. Ties go to the lexicographically smallest
// tuple. Branches are pruned once a partial weighted power sum exceeds a cap.
Allocation exhaustive_search(const ChannelRealization& ch, const MoopWeights& w, const BerTargets& t,
                             int b_max, const std::vector<LinearConstraint>& constraints);

} // namespace linkadapt
