#include "linkadapt/oracle.hpp"

#include "linkadapt/bitpower.hpp"

#include <cmath>
#include <stdexcept>

namespace linkadapt {

namespace {

struct SearchState {
    const ChannelRealization* ch = nullptr;
    const MoopWeights* w = nullptr;
    const BerTargets* t = nullptr;
    const std::vector<LinearConstraint>* constraints = nullptr;
    int n = 0;
    int b_max = 0;

    std::vector<int> bits;
    std::vector<double> power;
    std::vector<double> weighted_sums;
    double sum_power = 0.0;
    double sum_bits = 0.0;

    std::vector<int> best_bits;
    double best_objective = 0.0;
    bool have_best = false;

    void visit_leaf() {
        const double obj = moop_objective(sum_power, sum_bits, *w);
        // Strict improvement keeps the first (lexicographically smallest) tuple
        // among exact ties, since candidates are enumerated in lex order.
        if (!have_best || obj < best_objective) {
            have_best = true;
            best_objective = obj;
            best_bits = bits;
        }
    }

    void recurse(int i) {
        if (i == n) {
            visit_leaf();
            return;
        }
        const double g = ch->cnr[static_cast<std::size_t>(i)];
        const double gap = t->snr_gap(i);
        for (int b = 0; b <= b_max; ++b) {
            if (b == 1) continue; // M-QAM requires b >= 2
            double p = 0.0;
            if (b > 0) {
                if (!(g > 0.0)) break; // dead subcarrier can only stay null
                p = power_from_bits(static_cast<double>(b), g, gap);
            }
            bool feasible = true;
            const auto& cs = *constraints;
            for (std::size_t c = 0; c < cs.size(); ++c) {
                if (weighted_sums[c] + cs[c].weight(i) * p > cs[c].cap) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) break; // powers grow with bits: deeper b only worse

            bits[static_cast<std::size_t>(i)] = b;
            power[static_cast<std::size_t>(i)] = p;
            for (std::size_t c = 0; c < cs.size(); ++c) weighted_sums[c] += cs[c].weight(i) * p;
            sum_power += p;
            sum_bits += b;

            recurse(i + 1);

            for (std::size_t c = 0; c < cs.size(); ++c) weighted_sums[c] -= cs[c].weight(i) * p;
            sum_power -= p;
            sum_bits -= b;
        }
        bits[static_cast<std::size_t>(i)] = 0;
        power[static_cast<std::size_t>(i)] = 0.0;
    }
};

} // namespace

Allocation exhaustive_search(const ChannelRealization& ch, const MoopWeights& w, const BerTargets& t,
                             int b_max, const std::vector<LinearConstraint>& constraints) {
    w.validate();
    const int n = ch.size();
    if (t.size() != n) throw std::invalid_argument("exhaustive_search: BER targets size mismatch");
    if (b_max < 2) throw std::invalid_argument("exhaustive_search: b_max < 2");

    const double tuples = std::pow(static_cast<double>(b_max), n);
    if (tuples > 1e8) throw std::domain_error("exhaustive_search: search space exceeds 1e8 tuples");

    SearchState s;
    s.ch = &ch;
    s.w = &w;
    s.t = &t;
    s.constraints = &constraints;
    s.n = n;
    s.b_max = b_max;
    s.bits.assign(static_cast<std::size_t>(n), 0);
    s.power.assign(static_cast<std::size_t>(n), 0.0);
    s.weighted_sums.assign(constraints.size(), 0.0);
    s.recurse(0);

    Allocation out;
    out.bits = s.best_bits;
    out.power_w.resize(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const int b = out.bits[static_cast<std::size_t>(i)];
        out.power_w[static_cast<std::size_t>(i)] =
            b > 0 ? power_from_bits(static_cast<double>(b), ch.cnr[static_cast<std::size_t>(i)], t.snr_gap(i))
                  : 0.0;
        if (b > 0) out.active_set.push_back(i);
    }
    out.objective = s.best_objective;
    return out;
}

} // namespace linkadapt
