#include "linkadapt/bitpower.hpp"

#include "linkadapt/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linkadapt {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// A_i in 2^{b_i} = A gamma_i / gap_i for effective multiplier s.
double bits_scale(double s_eff, const MoopWeights& w) {
    const double wb = (1.0 - w.alpha) / w.u_bits;
    if (wb <= 0.0) return 0.0;               // alpha = 1: everything nulled
    if (s_eff <= 0.0) return kUnboundedBits; // alpha = 0, no multipliers
    return wb / (s_eff * kLn2);
}

double continuous_bits(double scale, double cnr, double gap, double b_max) {
    if (scale == 0.0 || cnr <= 0.0) return 0.0;
    if (std::isinf(scale)) return cnr > 0.0 ? b_max : 0.0;
    const double x = scale * cnr / gap;
    if (x < 4.0) return 0.0; // below the b >= 2 threshold
    return std::min(std::log2(x), b_max);
}

} // namespace

double ber_mqam(double power, double bits, double cnr) {
    if (bits < 1.0) throw std::domain_error("ber_mqam: bits must be >= 1 (nulled subcarriers excluded)");
    if (power < 0.0 || cnr < 0.0) throw std::domain_error("ber_mqam: negative power or CNR");
    return 0.2 * std::exp(-1.6 * power * cnr / (std::exp2(bits) - 1.0));
}

double power_from_bits(double bits, double cnr, double gap) {
    if (bits < 0.0) throw std::domain_error("power_from_bits: negative bits");
    if (bits == 0.0) return 0.0;
    if (!(cnr > 0.0)) throw InfeasibleError("power_from_bits: zero CNR on a loaded subcarrier");
    return gap / cnr * (std::exp2(bits) - 1.0);
}

double gamma_threshold(double s_eff, const MoopWeights& w, double gap, double bits_at_cap) {
    const double wb = (1.0 - w.alpha) / w.u_bits;
    if (wb <= 0.0) return std::numeric_limits<double>::infinity();
    return s_eff * kLn2 / wb * gap * std::exp2(bits_at_cap);
}

ContinuousAllocation allocate_relaxed(const ChannelRealization& ch, const MoopWeights& w,
                                      const BerTargets& t, double b_max) {
    w.validate();
    const int n = ch.size();
    if (t.size() != n) throw std::invalid_argument("allocate_relaxed: BER targets size mismatch");
    if (w.alpha == 0.0 && std::isinf(b_max))
        throw std::domain_error("allocate_relaxed: alpha = 0 with unbounded bits");

    const double scale = bits_scale(w.alpha / w.u_power, w);
    ContinuousAllocation out;
    out.bits.resize(static_cast<std::size_t>(n));
    out.power_w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double gap = t.snr_gap(i);
        const double b = continuous_bits(scale, ch.cnr[static_cast<std::size_t>(i)], gap, b_max);
        out.bits[static_cast<std::size_t>(i)] = b;
        out.power_w[static_cast<std::size_t>(i)] =
            b > 0.0 ? power_from_bits(b, ch.cnr[static_cast<std::size_t>(i)], gap) : 0.0;
    }
    out.objective = moop_objective(out.total_power(), out.total_bits(), w);
    return out;
}

ContinuousAllocation allocate_power_capped(const ChannelRealization& ch, const MoopWeights& w,
                                           const BerTargets& t, double b_max, double p_cap) {
    if (!(p_cap > 0.0)) throw std::domain_error("allocate_power_capped: p_cap <= 0");
    ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, b_max);
    if (relaxed.total_power() <= p_cap) return relaxed;

    const int n = ch.size();
    const double wb = (1.0 - w.alpha) / w.u_bits;

    // Only subcarriers loaded in the unconstrained solution compete for the
    // budget; the rest stay nulled. On the survivors the bits relax to the
    // convex domain [0, b_max], so the budget-balancing lambda is exact and
    // total power varies continuously in lambda. Rounding restores the
    // {0} u {2..b_max} domain afterwards.
    std::vector<bool> eligible(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        eligible[static_cast<std::size_t>(i)] = relaxed.bits[static_cast<std::size_t>(i)] > 0.0;

    auto assemble = [&](double lambda) {
        const double scale = bits_scale(w.alpha / w.u_power + lambda, w);
        ContinuousAllocation out;
        out.bits.assign(static_cast<std::size_t>(n), 0.0);
        out.power_w.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            if (!eligible[static_cast<std::size_t>(i)]) continue;
            const double gap = t.snr_gap(i);
            const double g = ch.cnr[static_cast<std::size_t>(i)];
            const double x = scale * g / gap;
            if (x <= 1.0) continue;
            const double b = std::min(std::log2(x), b_max);
            out.bits[static_cast<std::size_t>(i)] = b;
            out.power_w[static_cast<std::size_t>(i)] = power_from_bits(b, g, gap);
        }
        out.multipliers.lambda_power = lambda;
        out.objective = moop_objective(out.total_power(), out.total_bits(), w);
        return out;
    };

    // Fixed point over the (zeroed | interior | pinned-at-b_max) partition:
    // the closed form gives lambda for the current interior set, the new
    // lambda redraws the partition.
    double lambda = 0.0;
    bool converged = false;
    for (int pass = 0; pass < 2 * n + 8 && !converged; ++pass) {
        const double scale = bits_scale(w.alpha / w.u_power + lambda, w);
        double p_maxed = 0.0;
        double gap_over_gamma = 0.0;
        int n_interior = 0;
        for (int i = 0; i < n; ++i) {
            if (!eligible[static_cast<std::size_t>(i)]) continue;
            const double gap = t.snr_gap(i);
            const double g = ch.cnr[static_cast<std::size_t>(i)];
            const double x = scale * g / gap;
            if (x <= 1.0) continue;
            if (!std::isinf(b_max) && x >= std::exp2(b_max)) {
                p_maxed += power_from_bits(b_max, g, gap);
            } else {
                gap_over_gamma += gap / g;
                ++n_interior;
            }
        }
        const double budget = p_cap - p_maxed;
        double next;
        if (n_interior == 0 || budget <= 0.0) {
            // No interior subcarrier to balance: grow lambda until the
            // pinned set fits (handled by the bisection fallback below).
            break;
        }
        next = std::max(0.0, n_interior * wb / kLn2 / (budget + gap_over_gamma) - w.alpha / w.u_power);
        if (std::abs(next - lambda) <= 1e-14 * std::max(1.0, next)) {
            lambda = next;
            converged = true;
        } else {
            lambda = next;
        }
    }

    if (converged) {
        ContinuousAllocation out = assemble(lambda);
        out.solver_iterations = 1;
        if (out.total_power() <= p_cap * (1.0 + 1e-9)) return out;
    }

    // Fallback: monotone bisection on lambda (total power is continuous and
    // nonincreasing on the relaxed domain).
    double lo = 0.0;
    double hi = std::max(1.0, lambda);
    int iters = 0;
    while (assemble(hi).total_power() > p_cap && iters < 200) {
        hi *= 2.0;
        ++iters;
    }
    for (int k = 0; k < 300; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double p = assemble(mid).total_power();
        if (p > p_cap)
            lo = mid;
        else
            hi = mid;
        ++iters;
        if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
    }
    ContinuousAllocation out = assemble(hi);
    out.solver_iterations = iters;
    return out;
}

Allocation round_allocation(const ContinuousAllocation& cont, const ChannelRealization& ch,
                            const MoopWeights& w, const BerTargets& t) {
    const int n = static_cast<int>(cont.bits.size());
    Allocation a;
    a.bits.resize(static_cast<std::size_t>(n));
    a.power_w.resize(static_cast<std::size_t>(n));
    a.multipliers = cont.multipliers;
    a.solver_iterations = cont.solver_iterations;
    for (int i = 0; i < n; ++i) {
        long rounded = std::lround(cont.bits[static_cast<std::size_t>(i)]);
        if (rounded < 2) rounded = 0; // M-QAM needs b >= 2
        a.bits[static_cast<std::size_t>(i)] = static_cast<int>(rounded);
        a.power_w[static_cast<std::size_t>(i)] =
            rounded == 0 ? 0.0
                         : power_from_bits(static_cast<double>(rounded), ch.cnr[static_cast<std::size_t>(i)],
                                           t.snr_gap(i));
        if (rounded > 0) a.active_set.push_back(i);
    }
    a.objective = moop_objective(a.total_power(), a.total_bits(), w);
    return a;
}

Allocation rounding_repair(Allocation a, const ChannelRealization& ch, const MoopWeights& w,
                           const BerTargets& t, const std::vector<LinearConstraint>& constraints) {
    const int n = static_cast<int>(a.bits.size());

    for (;;) {
        // Most violated constraint by relative excess.
        int worst_c = -1;
        double worst_excess = 0.0;
        for (std::size_t c = 0; c < constraints.size(); ++c) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += constraints[c].weight(i) * a.power_w[static_cast<std::size_t>(i)];
            const double excess = (s - constraints[c].cap) / std::max(constraints[c].cap, 1e-300);
            if (excess > 0.0 && excess > worst_excess) {
                worst_excess = excess;
                worst_c = static_cast<int>(c);
            }
        }
        if (worst_c < 0) break;

        // Largest drop in the violated sum per bit given up:
        // delta_p(b) = p(b) - p(b-1); a 2 -> 0 move surrenders two bits.
        const LinearConstraint& cw = constraints[static_cast<std::size_t>(worst_c)];
        int pick = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            const int b = a.bits[static_cast<std::size_t>(i)];
            if (b < 2) continue;
            const double gap = t.snr_gap(i);
            const double g = ch.cnr[static_cast<std::size_t>(i)];
            const double delta = cw.weight(i) * gap / g * std::exp2(static_cast<double>(b - 1));
            const double score = b == 2 ? delta * 1.5 / 2.0 : delta; // 2 -> 0 drops 3 units, costs 2 bits
            if (score > best) {
                best = score;
                pick = i;
            }
        }
        if (pick < 0) throw InfeasibleError("rounding_repair: constraints unsatisfiable at all-zero");

        int& b = a.bits[static_cast<std::size_t>(pick)];
        b = (b == 2) ? 0 : b - 1;
        a.power_w[static_cast<std::size_t>(pick)] =
            b == 0 ? 0.0
                   : power_from_bits(static_cast<double>(b), ch.cnr[static_cast<std::size_t>(pick)],
                                     t.snr_gap(pick));
    }

    a.active_set.clear();
    for (int i = 0; i < n; ++i)
        if (a.bits[static_cast<std::size_t>(i)] > 0) a.active_set.push_back(i);
    a.objective = moop_objective(a.total_power(), a.total_bits(), w);
    return a;
}

std::pair<double, Allocation> bisect_alpha(const ChannelRealization& ch, const BerTargets& t,
                                           double b_max, double p_cap, double alpha_init, double tol) {
    if (!(alpha_init > 0.0 && alpha_init < 1.0)) throw std::invalid_argument("bisect_alpha: alpha_init outside (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("bisect_alpha: tol <= 0");

    auto continuous_power = [&](double alpha) {
        MoopWeights w{alpha, 1.0, 1.0};
        return allocate_relaxed(ch, w, t, b_max).total_power();
    };
    auto finish = [&](double alpha) {
        MoopWeights w{alpha, 1.0, 1.0};
        ContinuousAllocation cont = allocate_relaxed(ch, w, t, b_max);
        Allocation rounded = round_allocation(cont, ch, w, t);
        return rounding_repair(std::move(rounded), ch, w, t, {LinearConstraint{{}, p_cap}});
    };

    double p0 = continuous_power(alpha_init);
    if (p0 <= p_cap) return {alpha_init, finish(alpha_init)};

    // Total continuous power is decreasing in alpha: each accepted iterate has
    // a smaller alpha than the previous one, so its power must not drop.
    double lo = alpha_init; // infeasible side
    double hi = 1.0;        // feasible side (alpha -> 1 nulls everything)
    double prev_accepted_power = 0.0;
    bool have_accepted = false;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double p = continuous_power(mid);
        if (p <= p_cap) {
            if (have_accepted && p < prev_accepted_power * (1.0 - 1e-12))
                throw std::logic_error("bisect_alpha: power not monotone in alpha");
            prev_accepted_power = p;
            have_accepted = true;
            hi = mid;
            if (p_cap - p <= tol) break;
        } else {
            lo = mid;
        }
        if (hi - lo < 1e-12) break;
    }
    return {hi, finish(hi)};
}

AnalyticAverages analytic_averages(double nu, const MoopWeights& w, const BerTargets& t, int n) {
    w.validate();
    if (!(nu > 0.0)) throw std::invalid_argument("analytic_averages: nu <= 0");
    AnalyticAverages out;
    const double wb = (1.0 - w.alpha) / w.u_bits;
    const double wp = w.alpha / w.u_power;
    if (wb <= 0.0) return out; // alpha = 1: nothing transmitted
    const double prefactor = wb / (wp * kLn2); // A in 2^b = A gamma / gap
    for (int i = 0; i < n; ++i) {
        const double gap = t.snr_gap(std::min(i, t.size() - 1));
        const double gmin = 4.0 * gap / prefactor;
        const double x = nu * gmin;
        const double ei = exp_integral_ei(-x);
        out.avg_throughput_bits += 2.0 * std::exp(-x) - ei / kLn2;
        out.avg_power_w += prefactor * (std::exp(-x) + x / 4.0 * ei);
    }
    return out;
}

} // namespace linkadapt
