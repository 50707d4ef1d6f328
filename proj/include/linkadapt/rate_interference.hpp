#pragma once

#include "linkadapt/types.hpp"

namespace linkadapt {

// Weights of the rate / CCI / ACI tradeoff (nonnegative, summing to one) and
// their normalization factors.
struct TriWeights {
    double w_cci = 0.0;
    std::vector<double> w_aci;
    double w_rate = 1.0;
    double u_cci = 1.0;              // 1 / P_th_m
    std::vector<double> u_aci;       // 1 / P_th_l
    double u_rate = 1.0;             // 1 / max achievable rate

    void validate() const;
};

enum class CsiMode { PathLossOnly, PathLossPlusStatistics, FullCsi };

// Channel-knowledge coefficient toward one PU receiver.
//   Case 1 (path loss only):        X = 10^{0.1 PL}
//   Case 2 (+ fading statistics):   X = nu / ((-ln(1 - Psi)) 10^{-0.1 PL})
//   Full CSI (bound):               X = 1 / (gain 10^{-0.1 PL})
double knowledge_coeff(CsiMode mode, double pl_db, double nu, double psi_th, double sampled_gain = 1.0);

struct RateInterferenceResult {
    std::vector<double> power_w;
    MultiplierSet multipliers;
    int solver_iterations = 0;
};

// Water-filling style closed form under the effective caps
// cap_m = P_th_m X_m,  cap_l = P_th_l X_l:
//   p_i = [ (w_rate u_rate df / ln2) / (w_cci u_cci / X_m
//           + sum_l w_aci u_aci w_il / X_l + lambda_1 + sum_l lambda_2l w_il) - 1/gamma_i ]+
RateInterferenceResult allocate_rate_interference(const ChannelRealization& ch, const TriWeights& w,
                                                  double x_m, const std::vector<double>& x_bands,
                                                  double cap_m, const std::vector<double>& aci_caps,
                                                  double spacing_hz,
                                                  const std::vector<std::vector<double>>& leakage);

// Pure rate maximization under the same caps; sets u_rate. Returns +inf when
// every cap is infinite.
double max_achievable_rate(const ChannelRealization& ch, double cap_m, const std::vector<double>& aci_caps,
                           double spacing_hz, const std::vector<std::vector<double>>& leakage);

// df * sum log2(1 + gamma_i p_i)
double achievable_rate(const ChannelRealization& ch, const std::vector<double>& power, double spacing_hz);

} // namespace linkadapt
