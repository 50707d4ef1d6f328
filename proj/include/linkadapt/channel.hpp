#pragma once

#include "linkadapt/rng.hpp"
#include "linkadapt/types.hpp"

namespace linkadapt {

// Log-distance path loss with free-space intercept at the reference distance:
// PL(d) = 20 log10(4 pi d0 / lambda) + 10 n log10(d / d0)   [dB]
double path_loss_db(double distance_m, const PathLossModel& model);

// Linear-scale attenuation 10^(-0.1 PL(d)).
double path_loss_lin(double distance_m, const PathLossModel& model);

// Per-subcarrier Rayleigh fading: gains i.i.d. exponential with the given
// mean, CNR derived against noise plus per-subcarrier interference.
// `interference` may be empty (treated as all-zero) or length N.
ChannelRealization sample_rayleigh_channel(const OfdmConfig& cfg, double avg_gain, double noise_var,
                                           const std::vector<double>& interference, Rng& rng);

struct SensingPosteriors {
    double beta_ov = 0.0; // P(occupied | declared vacant)
    double beta_oo = 1.0; // P(occupied | declared occupied)
};

SensingPosteriors sensing_posteriors(const SensingModel& s);

// Fraction of subcarrier i's power spectral density falling inside the band:
// T_s * integral of sinc^2(T_s f) over [f_il - B/2, f_il + B/2].
double leakage_factor(const OfdmConfig& cfg, const PuBand& band, int subcarrier);

// MMSE channel-estimate variance:
// sigma_dH^2 = (N_ch + 1) sigma_h^2 sigma_n^2 / (sigma_n^2 + sigma_h^2 G P_pilots)
double mmse_estimation_variance(const EstimationConfig& cfg, double noise_var);

// Signed spectral offsets f_{i,l} from each SU subcarrier to a band center
// placed `band_center_offset_hz` away from the SU band center.
std::vector<double> band_offsets(const OfdmConfig& cfg, double band_center_offset_hz);

} // namespace linkadapt
