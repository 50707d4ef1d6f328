#pragma once

#include "linkadapt/channel.hpp"
#include "linkadapt/types.hpp"

#include <functional>

namespace linkadapt {

// Generalized caps from sensing posteriors, path loss and fading margin:
//   power cap  = min(P_th, (1/beta_ov) 10^{0.1 PL(d_m)} 10^{0.1 FM} P_th_m)
//   ACI cap_l  = (1/beta_oo_l) 10^{0.1 PL(d_l)} 10^{0.1 FM} P_th_l
// with per-band, per-subcarrier leakage factors.
InterferenceCaps build_caps(double p_th, const std::vector<PuBand>& bands, const PuBand& co_channel,
                            const SensingModel& s_m, const std::vector<SensingModel>& s_l,
                            const PathLossModel& pl, const OfdmConfig& cfg);

struct MultiplierSolve {
    std::vector<double> lambdas;
    int iterations = 0;
};

// Finds lambdas >= 0 with violation_k(lambda) <= 0 for all k and
// |violation_k| <= 1e-8 * cap_scale_k whenever lambda_k > 0. Each violation
// component must be strictly decreasing in its own multiplier. Safeguarded
// Newton (secant) steps inside a doubling bracket, Gauss-Seidel across
// components. Throws InfeasibleError if a bracket cannot be closed.
MultiplierSolve solve_multipliers(
    const std::function<std::vector<double>(const std::vector<double>&)>& violation,
    std::vector<double> init, const std::vector<double>& cap_scale);

// Ch3 allocator: unconstrained closed form, then the closed-form power
// multiplier / numeric ACI multipliers / joint system depending on which caps
// the initial solution violates, then rounding and greedy repair.
Allocation allocate_cr(const ChannelRealization& ch, const MoopWeights& w, const BerTargets& t,
                       double b_max, const InterferenceCaps& caps);

// Continuous stage of allocate_cr (exposed for KKT residual checks).
ContinuousAllocation allocate_cr_continuous(const ChannelRealization& ch, const MoopWeights& w,
                                            const BerTargets& t, double b_max,
                                            const InterferenceCaps& caps);

// True-interference check against nominal thresholds: entry 0 is the CCI
// (weights all-one), entries 1..L the leakage-weighted bands. The fading
// margin is deliberately absent here: it only widened the allocator's caps.
// Boundary equality counts as non-violation.
std::vector<bool> measure_violation(const Allocation& a, const std::vector<double>& true_gains,
                                    const std::vector<double>& path_loss_linear,
                                    const std::vector<double>& thresholds,
                                    const std::vector<std::vector<double>>& leakage);

} // namespace linkadapt
