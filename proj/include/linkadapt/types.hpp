#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace linkadapt {

struct OfdmConfig {
    int n_subcarriers = 1;
    double subcarrier_spacing_hz = 1.0;
    // 0 means "derive from spacing" (T_s = 1/spacing).
    double symbol_duration_s = 0.0;

    double symbol_duration() const {
        return symbol_duration_s > 0.0 ? symbol_duration_s : 1.0 / subcarrier_spacing_hz;
    }

    void validate() const {
        if (n_subcarriers < 1) throw std::invalid_argument("OfdmConfig: n_subcarriers < 1");
        if (!(subcarrier_spacing_hz > 0.0)) throw std::invalid_argument("OfdmConfig: spacing <= 0");
        if (symbol_duration_s < 0.0) throw std::invalid_argument("OfdmConfig: symbol duration < 0");
    }
};

struct PathLossModel {
    double reference_distance_m = 100.0;
    double exponent = 4.0;
    double wavelength_m = 0.33;
};

// Per-subcarrier channel state for one Monte Carlo trial. Immutable once
// built; safe to share across trial workers.
struct ChannelRealization {
    std::vector<double> cnr;            // gamma_i = gain_i / (noise + J_i)
    std::vector<double> gains;          // |H_i|^2, linear
    double noise_var_w = 0.0;           // sigma_n^2
    std::vector<double> interference_w; // J_i

    int size() const { return static_cast<int>(cnr.size()); }
};

struct SensingModel {
    double p_md = 0.0;     // mis-detection probability
    double p_fa = 0.0;     // false-alarm probability
    double p_active = 0.0; // PU activity probability
};

// Primary-user band descriptor. spectral_offsets_hz holds f_{i,l} for each
// SU subcarrier i (signed distance to the band center).
struct PuBand {
    double bandwidth_hz = 0.0;
    std::vector<double> spectral_offsets_hz;
    double distance_m = 0.0;
    double interference_threshold_w = 0.0;
    double fading_margin_db = 0.0;
    double exp_mean_inv = 1.0; // nu: inverse mean of |H_sp|^2
    double confidence = 0.9;   // Psi_th
};

struct EstimationConfig {
    int channel_order = 0;      // N_ch
    double tap_var = 1.0;       // sigma_h^2
    double pilot_power_w = 1.0; // P_pilots
    double path_loss_lin = 1.0; // G
};

// Scalarization weights: objective = (alpha/u_power)*sum(p) - ((1-alpha)/u_bits)*sum(b).
struct MoopWeights {
    double alpha = 0.5;
    double u_power = 1.0;
    double u_bits = 1.0;

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("MoopWeights: alpha outside [0,1]");
        if (!(u_power > 0.0) || !(u_bits > 0.0))
            throw std::invalid_argument("MoopWeights: normalizations must be positive");
    }
};

// Per-subcarrier BER thresholds with the derived M-QAM SNR gap.
struct BerTargets {
    std::vector<double> per_subcarrier;

    static BerTargets uniform(int n, double ber_th) {
        if (!(ber_th > 0.0 && ber_th < 0.2))
            throw std::invalid_argument("BerTargets: threshold must lie in (0, 0.2)");
        BerTargets t;
        t.per_subcarrier.assign(static_cast<std::size_t>(n), ber_th);
        return t;
    }

    // Gamma_i = -ln(5 BER_th,i) / 1.6
    double snr_gap(int i) const { return -std::log(5.0 * per_subcarrier[static_cast<std::size_t>(i)]) / 1.6; }

    int size() const { return static_cast<int>(per_subcarrier.size()); }
};

struct MultiplierSet {
    double lambda_power = 0.0;
    std::vector<double> lambda_aci;
    double lambda_rate = 0.0;
};

// Integer bit/power allocation plus diagnostics.
struct Allocation {
    std::vector<int> bits;
    std::vector<double> power_w;
    double objective = 0.0;
    std::vector<int> active_set;
    MultiplierSet multipliers;
    int solver_iterations = 0;

    double total_power() const {
        double s = 0.0;
        for (double p : power_w) s += p;
        return s;
    }
    int total_bits() const {
        int s = 0;
        for (int b : bits) s += b;
        return s;
    }
};

// Continuous (pre-rounding) allocation from the KKT closed forms.
struct ContinuousAllocation {
    std::vector<double> bits;
    std::vector<double> power_w;
    double objective = 0.0;
    MultiplierSet multipliers;
    int solver_iterations = 0;

    double total_power() const {
        double s = 0.0;
        for (double p : power_w) s += p;
        return s;
    }
    double total_bits() const {
        double s = 0.0;
        for (double b : bits) s += b;
        return s;
    }
};

// One linear cap: sum_i weights[i] * p_i <= cap. Empty weights mean all-ones
// (the total-power constraint).
struct LinearConstraint {
    std::vector<double> weights;
    double cap = 0.0;

    double weight(int i) const { return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)]; }
};

// Effective caps seen by the CR / EE allocators: a total-power cap plus one
// leakage-weighted cap per adjacent PU band.
struct InterferenceCaps {
    double power_cap_w = 0.0;
    std::vector<double> aci_caps_w;
    std::vector<std::vector<double>> leakage; // [band][subcarrier]

    int n_bands() const { return static_cast<int>(aci_caps_w.size()); }
};

// Thrown when a constraint system admits no nonnegative multiplier solution.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double moop_objective(double sum_power, double sum_bits, const MoopWeights& w) {
    return w.alpha / w.u_power * sum_power - (1.0 - w.alpha) / w.u_bits * sum_bits;
}

} // namespace linkadapt
