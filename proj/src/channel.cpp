#include "linkadapt/channel.hpp"

#include "linkadapt/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace linkadapt {

double path_loss_db(double distance_m, const PathLossModel& model) {
    if (distance_m < model.reference_distance_m)
        throw std::domain_error("path_loss_db: distance below reference distance");
    const double intercept = 20.0 * std::log10(4.0 * M_PI * model.reference_distance_m / model.wavelength_m);
    return intercept + 10.0 * model.exponent * std::log10(distance_m / model.reference_distance_m);
}

double path_loss_lin(double distance_m, const PathLossModel& model) {
    return std::pow(10.0, -0.1 * path_loss_db(distance_m, model));
}

ChannelRealization sample_rayleigh_channel(const OfdmConfig& cfg, double avg_gain, double noise_var,
                                           const std::vector<double>& interference, Rng& rng) {
    cfg.validate();
    if (!(avg_gain > 0.0)) throw std::invalid_argument("sample_rayleigh_channel: avg_gain <= 0");
    if (!interference.empty() && static_cast<int>(interference.size()) != cfg.n_subcarriers)
        throw std::invalid_argument("sample_rayleigh_channel: interference size mismatch");

    const std::size_t n = static_cast<std::size_t>(cfg.n_subcarriers);
    ChannelRealization ch;
    ch.noise_var_w = noise_var;
    ch.gains.resize(n);
    ch.cnr.resize(n);
    ch.interference_w = interference.empty() ? std::vector<double>(n, 0.0) : interference;
    for (std::size_t i = 0; i < n; ++i) {
        ch.gains[i] = rng.exponential(avg_gain);
        ch.cnr[i] = ch.gains[i] / (noise_var + ch.interference_w[i]);
    }
    return ch;
}

SensingPosteriors sensing_posteriors(const SensingModel& s) {
    const double rho = s.p_active;
    const double den_ov = s.p_md * rho + (1.0 - s.p_fa) * (1.0 - rho);
    const double den_oo = (1.0 - s.p_md) * rho + s.p_fa * (1.0 - rho);
    if (!(den_ov > 0.0) || !(den_oo > 0.0))
        throw std::domain_error("sensing_posteriors: degenerate denominator");
    SensingPosteriors out;
    out.beta_ov = s.p_md * rho / den_ov;
    out.beta_oo = (1.0 - s.p_md) * rho / den_oo;
    return out;
}

double leakage_factor(const OfdmConfig& cfg, const PuBand& band, int subcarrier) {
    cfg.validate();
    if (subcarrier < 0 || subcarrier >= static_cast<int>(band.spectral_offsets_hz.size()))
        throw std::domain_error("leakage_factor: band offsets undefined for subcarrier");
    const double ts = cfg.symbol_duration();
    const double f_center = band.spectral_offsets_hz[static_cast<std::size_t>(subcarrier)];
    const double lo = f_center - 0.5 * band.bandwidth_hz;
    const double hi = f_center + 0.5 * band.bandwidth_hz;
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::domain_error("leakage_factor: non-finite integration bounds");
    if (lo == hi) return 0.0;

    // Substituting u = T_s f turns the weighted integral into
    // int sinc^2(u) du over the scaled interval.
    double v = sinc_sq_integral(ts * lo, ts * hi, 1e-8);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

double mmse_estimation_variance(const EstimationConfig& cfg, double noise_var) {
    if (cfg.channel_order < 0) throw std::invalid_argument("mmse_estimation_variance: N_ch < 0");
    if (!(cfg.tap_var > 0.0) || !(cfg.pilot_power_w > 0.0) || !(cfg.path_loss_lin > 0.0) || !(noise_var > 0.0))
        throw std::invalid_argument("mmse_estimation_variance: inputs must be positive");
    const double num = (cfg.channel_order + 1) * cfg.tap_var * noise_var;
    const double den = noise_var + cfg.tap_var * cfg.path_loss_lin * cfg.pilot_power_w;
    return num / den;
}

std::vector<double> band_offsets(const OfdmConfig& cfg, double band_center_offset_hz) {
    cfg.validate();
    std::vector<double> offsets(static_cast<std::size_t>(cfg.n_subcarriers));
    const double mid = 0.5 * (cfg.n_subcarriers - 1);
    for (int i = 0; i < cfg.n_subcarriers; ++i) {
        const double f_i = (static_cast<double>(i) - mid) * cfg.subcarrier_spacing_hz;
        offsets[static_cast<std::size_t>(i)] = band_center_offset_hz - f_i;
    }
    return offsets;
}

} // namespace linkadapt
