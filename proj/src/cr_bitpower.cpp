#include "linkadapt/cr_bitpower.hpp"

#include "linkadapt/bitpower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace linkadapt {

namespace {

constexpr double kLn2 = 0.6931471805599453;
// Multiplier roots are driven an order below the 1e-8 slackness the
// consumers assert, leaving headroom for Gauss-Seidel drift.
constexpr double kSlackTol = 1e-9;

} // namespace

InterferenceCaps build_caps(double p_th, const std::vector<PuBand>& bands, const PuBand& co_channel,
                            const SensingModel& s_m, const std::vector<SensingModel>& s_l,
                            const PathLossModel& pl, const OfdmConfig& cfg) {
    if (bands.size() != s_l.size()) throw std::invalid_argument("build_caps: bands/sensing size mismatch");

    InterferenceCaps caps;
    const SensingPosteriors post_m = sensing_posteriors(s_m);
    // The fading margin backs the caps off: the link toward the PU is
    // budgeted as FM dB stronger than its path-loss mean.
    const double fm_m = std::pow(10.0, -0.1 * co_channel.fading_margin_db);
    if (post_m.beta_ov > 0.0) {
        const double cci_cap = 1.0 / post_m.beta_ov *
                               std::pow(10.0, 0.1 * path_loss_db(co_channel.distance_m, pl)) * fm_m *
                               co_channel.interference_threshold_w;
        caps.power_cap_w = std::min(p_th, cci_cap);
    } else {
        caps.power_cap_w = p_th; // perfect sensing: min(P_th, inf)
    }

    caps.aci_caps_w.reserve(bands.size());
    caps.leakage.reserve(bands.size());
    for (std::size_t l = 0; l < bands.size(); ++l) {
        const SensingPosteriors post_l = sensing_posteriors(s_l[l]);
        if (!(post_l.beta_oo > 0.0)) throw std::domain_error("build_caps: beta_oo = 0 for an occupied band");
        const double fm_l = std::pow(10.0, -0.1 * bands[l].fading_margin_db);
        caps.aci_caps_w.push_back(1.0 / post_l.beta_oo *
                                  std::pow(10.0, 0.1 * path_loss_db(bands[l].distance_m, pl)) * fm_l *
                                  bands[l].interference_threshold_w);
        std::vector<double> lf(static_cast<std::size_t>(cfg.n_subcarriers));
        for (int i = 0; i < cfg.n_subcarriers; ++i)
            lf[static_cast<std::size_t>(i)] = leakage_factor(cfg, bands[l], i);
        caps.leakage.push_back(std::move(lf));
    }
    return caps;
}

MultiplierSolve solve_multipliers(
    const std::function<std::vector<double>(const std::vector<double>&)>& violation,
    std::vector<double> init, const std::vector<double>& cap_scale) {
    const std::size_t m = init.size();
    if (cap_scale.size() != m) throw std::invalid_argument("solve_multipliers: cap_scale size mismatch");

    MultiplierSolve out;
    out.lambdas = std::move(init);
    int evals = 0;
    auto eval = [&](const std::vector<double>& l) {
        ++evals;
        return violation(l);
    };

    // Coupled caps relax each other one coordinate at a time; the linear
    // convergence rate can be slow, so the sweep budget is generous.
    for (int sweep = 0; sweep < 400; ++sweep) {
        bool dirty = false;
        for (std::size_t k = 0; k < m; ++k) {
            const double tol = kSlackTol * std::max(cap_scale[k], 1e-300);

            // Inactive if the constraint already holds at lambda_k = 0.
            std::vector<double> probe = out.lambdas;
            probe[k] = 0.0;
            double v0 = eval(probe)[k];
            if (v0 <= tol) {
                if (out.lambdas[k] != 0.0) dirty = true;
                out.lambdas[k] = 0.0;
                continue;
            }

            // Bracket [0, hi] with violation(hi) <= 0.
            double lo = 0.0;
            double v_lo = v0;
            double hi = std::max(out.lambdas[k], 1.0);
            double v_hi;
            for (int grow = 0;; ++grow) {
                probe[k] = hi;
                v_hi = eval(probe)[k];
                if (v_hi <= 0.0) break;
                if (grow >= 120) throw InfeasibleError("solve_multipliers: no sign change on bracket");
                hi *= 2.0;
            }

            // Secant step when it lands well inside the bracket, bisection
            // otherwise; the violation magnitudes can differ by many orders,
            // so guaranteed interval halving matters.
            double x = hi;
            for (int it = 0; it < 300; ++it) {
                double cand = hi - v_hi * (hi - lo) / (v_hi - v_lo);
                const double margin = 0.02 * (hi - lo);
                if (!(cand > lo + margin && cand < hi - margin)) cand = 0.5 * (lo + hi);
                probe[k] = cand;
                const double v = eval(probe)[k];
                if (std::abs(v) <= tol) {
                    x = cand;
                    break;
                }
                if (v > 0.0) {
                    lo = cand;
                    v_lo = v;
                } else {
                    hi = cand;
                    v_hi = v;
                }
                x = hi; // feasible side
                if (hi - lo < 1e-18 * std::max(1.0, hi)) break;
            }
            if (std::abs(x - out.lambdas[k]) > 1e-12 * std::max(1.0, x)) dirty = true;
            out.lambdas[k] = x;
        }
        if (!dirty) break;
    }
    out.iterations = evals;
    return out;
}

namespace {

// Continuous bits at effective multiplier s_i = alpha/u_p + lambda_pow +
// sum_l lambda_aci_l * leakage_il. Only subcarriers that clear the
// unconstrained b >= 2 threshold (the case-1 entry condition) participate;
// on those, bits relax to [0, b_max] so every weighted power sum varies
// continuously in the multipliers.
ContinuousAllocation evaluate_cr(const ChannelRealization& ch, const MoopWeights& w, const BerTargets& t,
                                 double b_max, const InterferenceCaps& caps,
                                 const std::vector<bool>& eligible, double lambda_pow,
                                 const std::vector<double>& lambda_aci) {
    const int n = ch.size();
    const double wb = (1.0 - w.alpha) / w.u_bits;
    ContinuousAllocation out;
    out.bits.assign(static_cast<std::size_t>(n), 0.0);
    out.power_w.assign(static_cast<std::size_t>(n), 0.0);
    out.multipliers.lambda_power = lambda_pow;
    out.multipliers.lambda_aci = lambda_aci;
    if (wb <= 0.0) {
        out.objective = 0.0;
        return out;
    }
    for (int i = 0; i < n; ++i) {
        if (!eligible[static_cast<std::size_t>(i)]) continue;
        double s = w.alpha / w.u_power + lambda_pow;
        for (std::size_t l = 0; l < lambda_aci.size(); ++l)
            s += lambda_aci[l] * caps.leakage[l][static_cast<std::size_t>(i)];
        const double gap = t.snr_gap(i);
        const double g = ch.cnr[static_cast<std::size_t>(i)];
        double b;
        if (s <= 0.0) {
            b = b_max; // alpha = 0 and no active multiplier
            if (std::isinf(b)) throw std::domain_error("allocate_cr: alpha = 0 with unbounded bits");
        } else {
            const double x = wb / (s * kLn2) * g / gap;
            if (x <= 1.0) continue;
            b = std::min(std::log2(x), b_max);
        }
        out.bits[static_cast<std::size_t>(i)] = b;
        out.power_w[static_cast<std::size_t>(i)] = power_from_bits(b, g, gap);
    }
    out.objective = moop_objective(out.total_power(), out.total_bits(), w);
    return out;
}

// Case-1 entry: gamma must clear the unconstrained b >= 2 threshold.
std::vector<bool> cr_eligibility(const ChannelRealization& ch, const MoopWeights& w, const BerTargets& t) {
    const int n = ch.size();
    const double wb = (1.0 - w.alpha) / w.u_bits;
    const double s0 = w.alpha / w.u_power;
    std::vector<bool> eligible(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        const double g = ch.cnr[static_cast<std::size_t>(i)];
        if (!(g > 0.0) || wb <= 0.0) continue;
        if (s0 <= 0.0) {
            eligible[static_cast<std::size_t>(i)] = true; // alpha = 0
        } else {
            eligible[static_cast<std::size_t>(i)] = wb / (s0 * kLn2) * g / t.snr_gap(i) >= 4.0;
        }
    }
    return eligible;
}

double weighted_power(const ContinuousAllocation& a, const std::vector<double>* weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.power_w.size(); ++i) s += (weights ? (*weights)[i] : 1.0) * a.power_w[i];
    return s;
}

} // namespace

ContinuousAllocation allocate_cr_continuous(const ChannelRealization& ch, const MoopWeights& w,
                                            const BerTargets& t, double b_max,
                                            const InterferenceCaps& caps) {
    w.validate();
    const int n_bands = caps.n_bands();
    std::vector<double> zero_aci(static_cast<std::size_t>(n_bands), 0.0);
    const std::vector<bool> eligible = cr_eligibility(ch, w, t);

    // Cases 1/2: assume every cap inactive.
    ContinuousAllocation cont = evaluate_cr(ch, w, t, b_max, caps, eligible, 0.0, zero_aci);
    const bool pow_violated = cont.total_power() > caps.power_cap_w;
    std::vector<bool> aci_violated(static_cast<std::size_t>(n_bands), false);
    bool any_aci = false;
    for (int l = 0; l < n_bands; ++l) {
        aci_violated[static_cast<std::size_t>(l)] =
            weighted_power(cont, &caps.leakage[static_cast<std::size_t>(l)]) >
            caps.aci_caps_w[static_cast<std::size_t>(l)];
        any_aci = any_aci || aci_violated[static_cast<std::size_t>(l)];
    }
    if (!pow_violated && !any_aci) return cont;

    if (pow_violated && !any_aci) {
        // Cases 3/4: closed-form lambda over the active set, then confirm the
        // ACI caps stayed inactive; fall through to the joint system if not.
        ContinuousAllocation capped = allocate_power_capped(ch, w, t, b_max, caps.power_cap_w);
        bool aci_ok = true;
        for (int l = 0; l < n_bands; ++l)
            aci_ok = aci_ok && weighted_power(capped, &caps.leakage[static_cast<std::size_t>(l)]) <=
                                   caps.aci_caps_w[static_cast<std::size_t>(l)] * (1.0 + kSlackTol);
        if (aci_ok) {
            capped.multipliers.lambda_aci = zero_aci;
            return capped;
        }
    }

    // Cases 5-8: numeric multipliers for every cap at once. Inactive
    // constraints settle at lambda = 0 inside the solver.
    auto violation = [&](const std::vector<double>& l) {
        std::vector<double> aci(l.begin() + 1, l.end());
        ContinuousAllocation a = evaluate_cr(ch, w, t, b_max, caps, eligible, l[0], aci);
        std::vector<double> v(l.size());
        v[0] = a.total_power() - caps.power_cap_w;
        for (int b = 0; b < n_bands; ++b)
            v[static_cast<std::size_t>(b) + 1] =
                weighted_power(a, &caps.leakage[static_cast<std::size_t>(b)]) -
                caps.aci_caps_w[static_cast<std::size_t>(b)];
        return v;
    };
    std::vector<double> scales(static_cast<std::size_t>(n_bands) + 1);
    scales[0] = caps.power_cap_w;
    for (int l = 0; l < n_bands; ++l)
        scales[static_cast<std::size_t>(l) + 1] = caps.aci_caps_w[static_cast<std::size_t>(l)];
    MultiplierSolve sol =
        solve_multipliers(violation, std::vector<double>(static_cast<std::size_t>(n_bands) + 1, 0.0), scales);

    std::vector<double> aci(sol.lambdas.begin() + 1, sol.lambdas.end());
    ContinuousAllocation joint = evaluate_cr(ch, w, t, b_max, caps, eligible, sol.lambdas[0], aci);
    joint.solver_iterations = sol.iterations;
    return joint;
}

Allocation allocate_cr(const ChannelRealization& ch, const MoopWeights& w, const BerTargets& t,
                       double b_max, const InterferenceCaps& caps) {
    ContinuousAllocation cont = allocate_cr_continuous(ch, w, t, b_max, caps);
    Allocation rounded = round_allocation(cont, ch, w, t);
    std::vector<LinearConstraint> constraints;
    constraints.push_back(LinearConstraint{{}, caps.power_cap_w});
    for (int l = 0; l < caps.n_bands(); ++l)
        constraints.push_back(LinearConstraint{caps.leakage[static_cast<std::size_t>(l)],
                                               caps.aci_caps_w[static_cast<std::size_t>(l)]});
    Allocation repaired = rounding_repair(std::move(rounded), ch, w, t, constraints);
    repaired.multipliers = cont.multipliers;
    repaired.solver_iterations = cont.solver_iterations;
    return repaired;
}

std::vector<bool> measure_violation(const Allocation& a, const std::vector<double>& true_gains,
                                    const std::vector<double>& path_loss_linear,
                                    const std::vector<double>& thresholds,
                                    const std::vector<std::vector<double>>& leakage) {
    if (true_gains.size() != thresholds.size() || path_loss_linear.size() != thresholds.size())
        throw std::invalid_argument("measure_violation: size mismatch");
    if (leakage.size() + 1 != thresholds.size())
        throw std::invalid_argument("measure_violation: expected one leakage vector per ACI entry");

    std::vector<bool> flags(thresholds.size(), false);
    const double total = a.total_power();
    flags[0] = true_gains[0] * path_loss_linear[0] * total > thresholds[0];
    for (std::size_t l = 0; l < leakage.size(); ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.power_w.size(); ++i) s += leakage[l][i] * a.power_w[i];
        flags[l + 1] = true_gains[l + 1] * path_loss_linear[l + 1] * s > thresholds[l + 1];
    }
    return flags;
}

} // namespace linkadapt
