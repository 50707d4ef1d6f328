#pragma once

#include "linkadapt/types.hpp"

#include <limits>
#include <utility>

namespace linkadapt {

// M-QAM BER approximation: 0.2 exp(-1.6 p gamma / (2^b - 1)). Valid for b >= 1.
double ber_mqam(double power, double bits, double cnr);

// Power meeting the BER target exactly: p = (gap/gamma) (2^b - 1). b may be
// fractional (pre-rounding algebra); b = 0 gives p = 0.
double power_from_bits(double bits, double cnr, double gap);

// Nulling threshold for b >= 2 and the b_max cap threshold, at effective
// multiplier s_i = alpha/u_p + lambda_power + sum_l lambda_aci_l w_il.
double gamma_threshold(double s_eff, const MoopWeights& w, double gap, double bits_at_cap);

// Unconstrained (case 1/2) solution: b_i = min(log2(A gamma_i / gap_i), b_max)
// above the nulling threshold, zero below. b_max may be infinity.
ContinuousAllocation allocate_relaxed(const ChannelRealization& ch, const MoopWeights& w,
                                      const BerTargets& t, double b_max);

// Adds the total-power cap (case 3/4): closed-form lambda over the active set,
// iterating the set until stable; bisection fallback if the partition cycles.
ContinuousAllocation allocate_power_capped(const ChannelRealization& ch, const MoopWeights& w,
                                           const BerTargets& t, double b_max, double p_cap);

// Nearest-integer rounding with bits < 2 nulled and powers recomputed from
// the active-BER relation.
Allocation round_allocation(const ContinuousAllocation& cont, const ChannelRealization& ch,
                            const MoopWeights& w, const BerTargets& t);

// Greedy repair: while some cap is exceeded, decrement bits on the subcarrier
// with the largest weighted power drop delta_p(b) = p(b) - p(b-1) in the most
// violated constraint, per bit surrendered (a 2 -> 0 move costs two bits).
// Bits only ever decrease.
Allocation rounding_repair(Allocation a, const ChannelRealization& ch, const MoopWeights& w,
                           const BerTargets& t, const std::vector<LinearConstraint>& constraints);

// Ch2-style interactive weighting: if the allocation at alpha_init busts the
// power cap, bisect alpha upward until the continuous total power lands in
// [p_cap - tol, p_cap]. Returns (alpha_star, rounded + repaired allocation).
std::pair<double, Allocation> bisect_alpha(const ChannelRealization& ch, const BerTargets& t,
                                           double b_max, double p_cap, double alpha_init, double tol);

struct AnalyticAverages {
    double avg_throughput_bits = 0.0;
    double avg_power_w = 0.0;
};

// Closed-form averages of the unconstrained allocation over exponential CNR
// with rate nu (per-subcarrier mean 1/nu), summed over n subcarriers.
AnalyticAverages analytic_averages(double nu, const MoopWeights& w, const BerTargets& t, int n);

constexpr double kUnboundedBits = std::numeric_limits<double>::infinity();

} // namespace linkadapt
