#pragma once

#include "linkadapt/channel.hpp"
#include "linkadapt/ee_dinkelbach.hpp"
#include "linkadapt/ga.hpp"
#include "linkadapt/rate_interference.hpp"
#include "linkadapt/types.hpp"

#include <optional>
#include <string>

namespace linkadapt {

enum class ExperimentKind {
    MoopSweep,
    CrSweep,
    RateInterferenceSweep,
    EeSweep,
    GaCompare,
    OracleCompare,
    ViolationRatio,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Adjacent PU band described by geometry instead of per-subcarrier offsets.
struct BandSpec {
    double bandwidth_hz = 0.0;
    double center_offset_hz = 0.0; // from the SU band center
    double distance_m = 0.0;
    double threshold_w = 0.0;
    double nu = 1.0;
    double psi_th = 0.9;
};

struct SensingSpec {
    double p_md = 0.03;
    double p_fa = 0.1;
    double p_active = 0.5;
    // Optional per-trial uniform draws replacing the fixed values.
    std::optional<std::pair<double, double>> p_md_range;
    std::optional<std::pair<double, double>> p_fa_range;
    std::optional<std::pair<double, double>> p_active_range;
    bool perfect = false;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::MoopSweep;
    int trials = 1;
    std::uint64_t seed = 1;

    std::string sweep_param = "alpha";
    std::vector<double> sweep_values{0.5};

    OfdmConfig ofdm{64, 1.25e6 / 64, 0.0};
    double noise_var = 1e-16;
    double avg_gain = 1.0;
    double interference_w = 0.0;    // uniform J_i
    double su_path_loss_db = 0.0;   // SU transmitter-receiver link loss G
    double ber_threshold = 1e-4;

    double alpha = 0.5;
    // 0 means "normalize to the objective maxima" (u_p = P_th, u_b = N b_max).
    double u_power = 1.0;
    double u_bits = 1.0;
    int b_max = 6;
    double p_cap = 1e-3;

    PathLossModel pathloss;
    double cci_distance_m = 1000.0;
    double cci_threshold_w = 1e-14;
    double fading_margin_db = 0.0;
    double cci_nu = 1.0;
    double cci_psi_th = 0.9;
    SensingSpec sensing;
    std::vector<BandSpec> bands;

    // Ch4 sweep knobs.
    double w_cci = 0.3;
    double w_aci = 0.2;
    double w_rate = 0.5;
    std::string csi_mode = "path_loss"; // path_loss | statistics | full
    // Ch5 knobs.
    EeConfig ee;
    double est_var = 0.0;
    // GA knobs.
    GaConfig ga;

    MoopWeights weights() const {
        MoopWeights w;
        w.alpha = alpha;
        w.u_power = u_power > 0.0 ? u_power : p_cap;
        w.u_bits = u_bits > 0.0 ? u_bits : static_cast<double>(ofdm.n_subcarriers) * b_max;
        return w;
    }
};

struct MetricRecord {
    double sweep_value = 0.0;
    std::optional<double> avg_throughput_bits;
    std::optional<double> avg_power_w;
    std::optional<double> avg_rate_bps;
    std::optional<double> ee_j_per_bit;
    std::optional<double> ee_bits_per_joule;
    std::optional<double> violation_ratio_cci;
    std::optional<double> violation_ratio_aci;
    std::optional<double> avg_iterations;
    std::optional<double> objective_gap_vs_oracle;
    std::optional<double> objective_gap_vs_closed_form;
    std::optional<double> mean_ber_ratio;
    std::optional<double> infeasible_fraction;
};

std::vector<MetricRecord> run_experiment(const ExperimentConfig& cfg, int workers = 1);

// CSV with the effective configuration echoed as leading comment lines;
// floats carry 12 significant digits.
std::string metrics_to_csv(const ExperimentConfig& cfg, const std::vector<MetricRecord>& records);

// Simplified stand-ins for the third-party comparison loaders.
Allocation baseline_uniform_power(const ChannelRealization& ch, double total_power, const BerTargets& t,
                                  int b_max);
Allocation baseline_uniform_bits(const ChannelRealization& ch, int bits_per_subcarrier, const BerTargets& t);

} // namespace linkadapt
