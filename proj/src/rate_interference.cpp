#include "linkadapt/rate_interference.hpp"

#include "linkadapt/cr_bitpower.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace linkadapt {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kHugePower = 1e30; // stands in for "unbounded" when denominators vanish

std::vector<double> water_fill(const ChannelRealization& ch, const std::vector<double>& base_denom,
                               double numerator, double lambda_pow, const std::vector<double>& lambda_aci,
                               const std::vector<std::vector<double>>& leakage) {
    const int n = ch.size();
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double g = ch.cnr[static_cast<std::size_t>(i)];
        if (!(g > 0.0)) continue;
        double d = base_denom[static_cast<std::size_t>(i)] + lambda_pow;
        for (std::size_t l = 0; l < lambda_aci.size(); ++l)
            d += lambda_aci[l] * leakage[l][static_cast<std::size_t>(i)];
        double v;
        if (d <= numerator / kHugePower) {
            v = kHugePower;
        } else {
            v = numerator / d - 1.0 / g;
        }
        p[static_cast<std::size_t>(i)] = std::max(0.0, v);
    }
    return p;
}

} // namespace

void TriWeights::validate() const {
    double sum = w_cci + w_rate;
    for (double a : w_aci) sum += a;
    if (w_cci < 0.0 || w_rate < 0.0) throw std::invalid_argument("TriWeights: negative weight");
    for (double a : w_aci)
        if (a < 0.0) throw std::invalid_argument("TriWeights: negative weight");
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("TriWeights: weights must sum to 1");
}

double knowledge_coeff(CsiMode mode, double pl_db, double nu, double psi_th, double sampled_gain) {
    const double attenuation = std::pow(10.0, -0.1 * pl_db);
    switch (mode) {
        case CsiMode::PathLossOnly:
            return 1.0 / attenuation;
        case CsiMode::PathLossPlusStatistics: {
            if (!(psi_th >= 0.0 && psi_th < 1.0))
                throw std::domain_error("knowledge_coeff: confidence must lie in [0,1)");
            return nu / (-std::log1p(-psi_th) * attenuation);
        }
        case CsiMode::FullCsi:
            if (!(sampled_gain > 0.0)) throw std::domain_error("knowledge_coeff: sampled gain <= 0");
            return 1.0 / (sampled_gain * attenuation);
    }
    throw std::logic_error("knowledge_coeff: unknown mode");
}

RateInterferenceResult allocate_rate_interference(const ChannelRealization& ch, const TriWeights& w,
                                                  double x_m, const std::vector<double>& x_bands,
                                                  double cap_m, const std::vector<double>& aci_caps,
                                                  double spacing_hz,
                                                  const std::vector<std::vector<double>>& leakage) {
    w.validate();
    const int n = ch.size();
    const std::size_t n_bands = aci_caps.size();
    if (leakage.size() != n_bands || x_bands.size() != n_bands || w.w_aci.size() != n_bands ||
        w.u_aci.size() != n_bands)
        throw std::invalid_argument("allocate_rate_interference: band array size mismatch");

    RateInterferenceResult out;
    out.power_w.assign(static_cast<std::size_t>(n), 0.0);
    out.multipliers.lambda_aci.assign(n_bands, 0.0);
    if (w.w_rate == 0.0) return out; // no rate credit: zero power is optimal

    std::vector<double> base(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double d = w.w_cci * w.u_cci / x_m;
        for (std::size_t l = 0; l < n_bands; ++l)
            d += w.w_aci[l] * w.u_aci[l] / x_bands[l] * leakage[l][static_cast<std::size_t>(i)];
        base[static_cast<std::size_t>(i)] = d;
    }
    const double numerator = w.w_rate * w.u_rate * spacing_hz / kLn2;

    auto violation = [&](const std::vector<double>& l) {
        std::vector<double> aci(l.begin() + 1, l.end());
        std::vector<double> p = water_fill(ch, base, numerator, l[0], aci, leakage);
        std::vector<double> v(l.size());
        double total = 0.0;
        for (double x : p) total += x;
        v[0] = total - cap_m;
        for (std::size_t b = 0; b < n_bands; ++b) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += leakage[b][static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
            v[b + 1] = s - aci_caps[b];
        }
        return v;
    };

    std::vector<double> scales(n_bands + 1);
    scales[0] = std::isinf(cap_m) ? 1.0 : cap_m;
    for (std::size_t l = 0; l < n_bands; ++l) scales[l + 1] = std::isinf(aci_caps[l]) ? 1.0 : aci_caps[l];
    MultiplierSolve sol =
        solve_multipliers(violation, std::vector<double>(n_bands + 1, 0.0), scales);

    std::vector<double> aci(sol.lambdas.begin() + 1, sol.lambdas.end());
    out.power_w = water_fill(ch, base, numerator, sol.lambdas[0], aci, leakage);
    out.multipliers.lambda_power = sol.lambdas[0];
    out.multipliers.lambda_aci = aci;
    out.solver_iterations = sol.iterations;
    return out;
}

double achievable_rate(const ChannelRealization& ch, const std::vector<double>& power, double spacing_hz) {
    double rate = 0.0;
    for (std::size_t i = 0; i < power.size(); ++i)
        rate += std::log2(1.0 + ch.cnr[i] * power[i]);
    return spacing_hz * rate;
}

double max_achievable_rate(const ChannelRealization& ch, double cap_m, const std::vector<double>& aci_caps,
                           double spacing_hz, const std::vector<std::vector<double>>& leakage) {
    bool any_finite = !std::isinf(cap_m);
    for (double c : aci_caps) any_finite = any_finite || !std::isinf(c);
    if (!any_finite) return std::numeric_limits<double>::infinity();
    if (cap_m <= 0.0) return 0.0;

    TriWeights w;
    w.w_rate = 1.0;
    w.w_aci.assign(aci_caps.size(), 0.0);
    w.u_aci.assign(aci_caps.size(), 1.0);
    std::vector<double> x_bands(aci_caps.size(), 1.0);
    RateInterferenceResult r =
        allocate_rate_interference(ch, w, 1.0, x_bands, cap_m, aci_caps, spacing_hz, leakage);
    return achievable_rate(ch, r.power_w, spacing_hz);
}

} // namespace linkadapt
