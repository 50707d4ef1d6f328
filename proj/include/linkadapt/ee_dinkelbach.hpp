#pragma once

#include "linkadapt/types.hpp"

namespace linkadapt {

struct EeConfig {
    double kappa = 7.8;          // amplifier coefficient
    double circuit_power_w = 2.0;
    double rate_floor = 0.0;     // R_th, bits/s
    double tol = 1e-8;           // Dinkelbach delta
    double q_init = -1.0;        // < 0: derive from the equal-power-at-cap point

    void validate() const;
};

// Channel estimate plus estimation-error statistics for the SU link.
struct UncertainChannel {
    std::vector<double> est_gains;   // |H_hat(W^i)|^2
    double est_var = 0.0;            // sigma_dH^2
    double path_loss_lin = 1.0;      // G
    double noise_var = 0.0;          // sigma_n^2
    std::vector<double> interference; // J_i (empty means zero)
    double spacing_hz = 1.0;         // df

    int size() const { return static_cast<int>(est_gains.size()); }
    double interference_at(int i) const {
        return interference.empty() ? 0.0 : interference[static_cast<std::size_t>(i)];
    }
};

// c(p) = df sum log2(1 + |H|^2 G p / (sigma_dH^2 G p + sigma_n^2 + J))
double capacity_uncertain(const std::vector<double>& power, const UncertainChannel& ch);

// eta = (kappa sum p + p_c) / c(p); throws when c(p) = 0.
double ee_metric(const std::vector<double>& power, const UncertainChannel& ch, const EeConfig& cfg);

// Statistical interference caps (Ch5 form):
//   power cap = min(P_th, (1/beta_ov) nu_m / (G_m (-ln(1-Psi_m))) P_th_m)
//   ACI cap_l = (1/beta_oo_l) nu_l / (G_l (-ln(1-Psi_l))) P_th_l
// Path losses are linear-scale gains G; leakage is passed precomputed.
InterferenceCaps build_statistical_caps(double p_th, double beta_ov, const PuBand& co_channel,
                                        double co_path_loss_lin, const std::vector<PuBand>& bands,
                                        const std::vector<double>& beta_oo,
                                        const std::vector<double>& band_path_loss_lin,
                                        const std::vector<std::vector<double>>& leakage);

struct InnerSolution {
    std::vector<double> power;
    MultiplierSet multipliers;
    int solver_iterations = 0;
};

// Closed-form inner allocation of the parameterized problem
// min kappa sum p + p_c - q c(p) subject to the caps and c(p) >= R_th.
// The eight multiplier cases are resolved by activating violated constraints.
InnerSolution inner_allocate(double q, const UncertainChannel& ch, const InterferenceCaps& caps,
                             const EeConfig& cfg);

struct DinkelbachResult {
    double q_star = 0.0;
    std::vector<double> power;
    int iterations = 0;
    std::vector<double> q_trace;
    double phi_final = 0.0;
};

DinkelbachResult dinkelbach_solve(const UncertainChannel& ch, const InterferenceCaps& caps,
                                  const EeConfig& cfg);

} // namespace linkadapt
