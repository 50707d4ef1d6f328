#include "linkadapt/ee_dinkelbach.hpp"

#include "linkadapt/cr_bitpower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace linkadapt {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kRateTol = 1e-9;
constexpr double kLambdaRateCeiling = 1e18;

// Closed-form stationary power at the given multipliers; the sqrt uses the
// -eps/(1+sqrt(1-eps)) form so the sigma_dH^2 -> 0 limit stays accurate.
std::vector<double> stationary_power(double q, const UncertainChannel& ch, const InterferenceCaps& caps,
                                     const EeConfig& cfg, double lambda_pow,
                                     const std::vector<double>& lambda_aci, double lambda_rate) {
    const int n = ch.size();
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    const double q_eff = q + lambda_rate;
    if (q_eff <= 0.0) return p;

    for (int i = 0; i < n; ++i) {
        const double h2 = ch.est_gains[static_cast<std::size_t>(i)];
        if (!(h2 > 0.0)) continue;
        const double aj = ch.noise_var + ch.interference_at(i);
        double denom = cfg.kappa + lambda_pow;
        for (std::size_t l = 0; l < lambda_aci.size(); ++l)
            denom += lambda_aci[l] * caps.leakage[l][static_cast<std::size_t>(i)];
        const double water = ch.spacing_hz / kLn2 * q_eff * h2 / denom;
        const double a_over_g = aj / ch.path_loss_lin;

        if (ch.est_var <= 0.0) {
            p[static_cast<std::size_t>(i)] = std::max(0.0, (water - a_over_g) / h2);
            continue;
        }
        const double s2 = ch.est_var;
        const double chi = aj * (2.0 * s2 + h2) / (2.0 * s2 * (s2 + h2) * ch.path_loss_lin);
        const double eps = (a_over_g - water) * 2.0 / (chi * (2.0 * s2 + h2));
        if (eps >= 1.0) continue; // deep negative water level
        const double root = std::sqrt(1.0 - eps);
        p[static_cast<std::size_t>(i)] = std::max(0.0, chi * (-eps) / (1.0 + root));
    }
    return p;
}

double weighted_sum(const std::vector<double>& p, const std::vector<double>* weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (weights ? (*weights)[i] : 1.0) * p[i];
    return s;
}

} // namespace

void EeConfig::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("EeConfig: kappa <= 0");
    if (circuit_power_w < 0.0) throw std::invalid_argument("EeConfig: circuit power < 0");
    if (!(tol > 0.0)) throw std::invalid_argument("EeConfig: tol <= 0");
    if (rate_floor < 0.0) throw std::invalid_argument("EeConfig: rate floor < 0");
}

double capacity_uncertain(const std::vector<double>& power, const UncertainChannel& ch) {
    if (static_cast<int>(power.size()) != ch.size())
        throw std::invalid_argument("capacity_uncertain: power size mismatch");
    double c = 0.0;
    for (int i = 0; i < ch.size(); ++i) {
        const double p = power[static_cast<std::size_t>(i)];
        if (p < 0.0) throw std::domain_error("capacity_uncertain: negative power");
        const double h2 = ch.est_gains[static_cast<std::size_t>(i)];
        const double den = ch.est_var * ch.path_loss_lin * p + ch.noise_var + ch.interference_at(i);
        c += std::log2(1.0 + h2 * ch.path_loss_lin * p / den);
    }
    return ch.spacing_hz * c;
}

double ee_metric(const std::vector<double>& power, const UncertainChannel& ch, const EeConfig& cfg) {
    const double c = capacity_uncertain(power, ch);
    if (!(c > 0.0)) throw std::domain_error("ee_metric: zero rate");
    return (cfg.kappa * weighted_sum(power, nullptr) + cfg.circuit_power_w) / c;
}

InterferenceCaps build_statistical_caps(double p_th, double beta_ov, const PuBand& co_channel,
                                        double co_path_loss_lin, const std::vector<PuBand>& bands,
                                        const std::vector<double>& beta_oo,
                                        const std::vector<double>& band_path_loss_lin,
                                        const std::vector<std::vector<double>>& leakage) {
    if (bands.size() != beta_oo.size() || bands.size() != band_path_loss_lin.size() ||
        bands.size() != leakage.size())
        throw std::invalid_argument("build_statistical_caps: band array size mismatch");

    InterferenceCaps caps;
    caps.power_cap_w = p_th;
    if (beta_ov > 0.0) {
        const double stat = 1.0 / beta_ov * co_channel.exp_mean_inv /
                            (co_path_loss_lin * -std::log1p(-co_channel.confidence)) *
                            co_channel.interference_threshold_w;
        caps.power_cap_w = std::min(p_th, stat);
    }
    for (std::size_t l = 0; l < bands.size(); ++l) {
        if (!(beta_oo[l] > 0.0)) throw std::domain_error("build_statistical_caps: beta_oo = 0");
        caps.aci_caps_w.push_back(1.0 / beta_oo[l] * bands[l].exp_mean_inv /
                                  (band_path_loss_lin[l] * -std::log1p(-bands[l].confidence)) *
                                  bands[l].interference_threshold_w);
    }
    caps.leakage = leakage;
    return caps;
}

InnerSolution inner_allocate(double q, const UncertainChannel& ch, const InterferenceCaps& caps,
                             const EeConfig& cfg) {
    cfg.validate();
    if (q < 0.0) throw std::invalid_argument("inner_allocate: q < 0");
    const std::size_t n_bands = caps.aci_caps_w.size();

    // Multiplier vector layout: [lambda_1, lambda_2 per band..., lambda_3].
    auto power_at = [&](const std::vector<double>& l) {
        std::vector<double> aci(l.begin() + 1, l.end() - 1);
        return stationary_power(q, ch, caps, cfg, l[0], aci, l.back());
    };
    auto violation = [&](const std::vector<double>& l) {
        std::vector<double> p = power_at(l);
        std::vector<double> v(l.size());
        v[0] = weighted_sum(p, nullptr) - caps.power_cap_w;
        for (std::size_t b = 0; b < n_bands; ++b)
            v[b + 1] = weighted_sum(p, &caps.leakage[b]) - caps.aci_caps_w[b];
        // Rate violation decreases as lambda_3 grows (more power credit).
        v.back() = cfg.rate_floor - capacity_uncertain(p, ch);
        return v;
    };

    std::vector<double> scales(n_bands + 2);
    scales[0] = std::isfinite(caps.power_cap_w) ? caps.power_cap_w : 1.0;
    for (std::size_t b = 0; b < n_bands; ++b)
        scales[b + 1] = std::isfinite(caps.aci_caps_w[b]) ? caps.aci_caps_w[b] : 1.0;
    scales.back() = 0.1 * std::max(cfg.rate_floor, 1.0); // 1e-8 * scale = 1e-9 * R_th

    if (cfg.rate_floor > 0.0) {
        // Feasibility: the rate ceiling under the caps is approached as
        // lambda_3 grows without bound.
        std::vector<double> cap_scales(scales.begin(), scales.end() - 1);
        MultiplierSolve ms = solve_multipliers(
            [&](const std::vector<double>& l) {
                std::vector<double> full = l;
                full.push_back(kLambdaRateCeiling);
                std::vector<double> v = violation(full);
                v.pop_back();
                return v;
            },
            std::vector<double>(n_bands + 1, 0.0), cap_scales);
        std::vector<double> full = ms.lambdas;
        full.push_back(kLambdaRateCeiling);
        const double c_max = capacity_uncertain(power_at(full), ch);
        if (c_max < cfg.rate_floor * (1.0 - kRateTol))
            throw InfeasibleError("inner_allocate: rate floor unreachable under the caps");
    }

    MultiplierSolve sol =
        solve_multipliers(violation, std::vector<double>(n_bands + 2, 0.0), scales);

    InnerSolution out;
    out.power = power_at(sol.lambdas);
    out.multipliers.lambda_power = sol.lambdas[0];
    out.multipliers.lambda_aci.assign(sol.lambdas.begin() + 1, sol.lambdas.end() - 1);
    out.multipliers.lambda_rate = sol.lambdas.back();
    out.solver_iterations = sol.iterations;
    return out;
}

DinkelbachResult dinkelbach_solve(const UncertainChannel& ch, const InterferenceCaps& caps,
                                  const EeConfig& cfg) {
    cfg.validate();
    const int n = ch.size();

    double q = cfg.q_init;
    if (q < 0.0) {
        // Uniform power scaled to meet every cap; EE of a feasible point
        // upper-bounds q*.
        double level = caps.power_cap_w / n;
        for (std::size_t b = 0; b < caps.aci_caps_w.size(); ++b) {
            double wsum = 0.0;
            for (int i = 0; i < n; ++i) wsum += caps.leakage[b][static_cast<std::size_t>(i)];
            if (wsum > 0.0) level = std::min(level, caps.aci_caps_w[b] / wsum);
        }
        if (!std::isfinite(level)) {
            // Uncapped instance: start from a rate-saturating uniform level.
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                const double h2 = ch.est_gains[static_cast<std::size_t>(i)];
                if (h2 > 0.0)
                    worst = std::max(worst, (ch.noise_var + ch.interference_at(i)) /
                                                (ch.path_loss_lin * h2));
            }
            level = 1e6 * worst;
        }
        std::vector<double> p_eq(static_cast<std::size_t>(n), level);
        const double c_eq = capacity_uncertain(p_eq, ch);
        if (c_eq > 0.0 && c_eq >= cfg.rate_floor) {
            q = (cfg.kappa * level * n + cfg.circuit_power_w) / c_eq;
        } else {
            // Equal power misses the rate floor: initialize from the
            // cap-constrained rate-max point instead.
            EeConfig probe_cfg = cfg;
            probe_cfg.rate_floor = cfg.rate_floor;
            InnerSolution rate_max = inner_allocate(1.0, ch, caps, probe_cfg);
            q = ee_metric(rate_max.power, ch, cfg);
        }
    }

    DinkelbachResult out;
    for (int it = 0; it < 200; ++it) {
        InnerSolution inner = inner_allocate(q, ch, caps, cfg);
        ++out.iterations;
        out.q_trace.push_back(q);
        const double c = capacity_uncertain(inner.power, ch);
        const double cost = cfg.kappa * weighted_sum(inner.power, nullptr) + cfg.circuit_power_w;
        const double phi = cost - q * c;
        out.power = std::move(inner.power);
        out.phi_final = phi;
        if (phi >= -cfg.tol) {
            if (!(c > 0.0)) throw std::domain_error("dinkelbach_solve: zero-rate terminal solution");
            out.q_star = cost / c;
            return out;
        }
        q = cost / c;
    }
    throw std::runtime_error("dinkelbach_solve: failed to converge");
}

} // namespace linkadapt
