#include "linkadapt/ga.hpp"

#include "linkadapt/bitpower.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linkadapt {

void GaConfig::validate() const {
    if (population <= elite_count) throw std::invalid_argument("GaConfig: population <= elite_count");
    if (crossover_fraction < 0.0 || crossover_fraction > 1.0)
        throw std::invalid_argument("GaConfig: crossover_fraction outside [0,1]");
    if (tournament_size < 2) throw std::invalid_argument("GaConfig: tournament size < 2");
    if (max_generations < 1) throw std::invalid_argument("GaConfig: max_generations < 1");
}

double average_ber(const Individual& ind, const ChannelRealization& ch) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ind.bits.size(); ++i) {
        const int b = ind.bits[i];
        if (b < 1) continue;
        num += b * ber_mqam(ind.power[i], static_cast<double>(b), ch.cnr[i]);
        den += b;
    }
    if (den == 0.0) throw std::domain_error("average_ber: no loaded subcarriers");
    return num / den;
}

namespace {

double constraint_violation(const Individual& ind, const ChannelRealization& ch, const GaProblem& prob) {
    double v = 0.0;
    double total_bits = 0.0;
    for (int b : ind.bits) total_bits += b;
    if (total_bits > 0.0) {
        const double avg = average_ber(ind, ch);
        v += std::max(0.0, avg - prob.ber_threshold);
    }
    double total_power = 0.0;
    for (double p : ind.power) total_power += p;
    v += std::max(0.0, total_power - prob.p_cap);
    for (int b : ind.bits) v += std::max(0.0, static_cast<double>(b - prob.b_max));
    return v;
}

void evaluate(Individual& ind, const ChannelRealization& ch, const GaProblem& prob) {
    double total_power = 0.0;
    double total_bits = 0.0;
    for (double p : ind.power) total_power += p;
    for (int b : ind.bits) total_bits += b;
    ind.objective = moop_objective(total_power, total_bits, prob.weights);
    ind.violation = constraint_violation(ind, ch, prob);
    ind.feasible = ind.violation == 0.0;
}

// Deb-rule comparison; index breaks ties deterministically.
bool better(const Individual& a, const Individual& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible) return a.objective < b.objective;
    return a.violation < b.violation;
}

} // namespace

double fitness(const Individual& ind, const ChannelRealization& ch, const GaProblem& prob, double f_worst) {
    Individual tmp = ind;
    evaluate(tmp, ch, prob);
    if (tmp.feasible) return tmp.objective;
    return f_worst + tmp.violation;
}

const Individual& tournament_select(const std::vector<Individual>& pop, int k, Rng& rng) {
    if (k < 2) throw std::invalid_argument("tournament_select: k < 2");
    if (static_cast<std::size_t>(k) > pop.size()) k = static_cast<int>(pop.size());
    if (k > 64) k = 64;
    // Distinct entrants: rejection sampling is cheap for the small k in use.
    std::size_t picked[64];
    int n_picked = 0;
    std::size_t winner = pop.size();
    while (n_picked < k) {
        const std::size_t c = static_cast<std::size_t>(rng.uniform_int(pop.size()));
        bool dup = false;
        for (int j = 0; j < n_picked; ++j) dup = dup || picked[j] == c;
        if (dup) continue;
        picked[n_picked++] = c;
        if (winner == pop.size() || better(pop[c], pop[winner]) ||
            (c < winner && !better(pop[winner], pop[c])))
            winner = c;
    }
    return pop[winner];
}

std::pair<std::vector<double>, std::vector<double>> laplace_crossover(const std::vector<double>& parent1,
                                                                      const std::vector<double>& parent2,
                                                                      double a, double xi, Rng& rng,
                                                                      const std::vector<double>& lower,
                                                                      const std::vector<double>& upper) {
    if (!(xi > 0.0)) throw std::invalid_argument("laplace_crossover: scale must be positive");
    const std::size_t k = parent1.size();
    std::vector<double> c1(k), c2(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double nu = std::max(rng.uniform01(), 1e-300);
        const double r = rng.uniform01();
        const double beta = r <= 0.5 ? a - xi * std::log(nu) : a + xi * std::log(nu);
        const double spread = std::abs(parent1[i] - parent2[i]);
        c1[i] = std::clamp(parent1[i] + beta * spread, lower[i], upper[i]);
        c2[i] = std::clamp(parent2[i] + beta * spread, lower[i], upper[i]);
    }
    return {std::move(c1), std::move(c2)};
}

double power_mutation(double z, double lower, double upper, double index, Rng& rng) {
    if (z < lower || z > upper) throw std::invalid_argument("power_mutation: gene outside bounds");
    if (upper == lower) return z;
    const double s = std::pow(rng.uniform01(), 1.0 / index);
    const double r = rng.uniform01();
    // t undefined at z = upper; mutate downward by convention.
    if (z >= upper) return z - s * (z - lower);
    const double t = (z - lower) / (upper - z);
    return t < r ? z - s * (z - lower) : z + s * (upper - z);
}

int integer_truncate(double x, Rng& rng) {
    const double fl = std::floor(x);
    if (x == fl) return static_cast<int>(fl);
    return static_cast<int>(fl) + (rng.uniform01() < 0.5 ? 0 : 1);
}

namespace {

struct Genome {
    std::vector<double> genes; // [0, n): bits, [n, 2n): power
};

Individual materialize(const Genome& g, int n, const GaProblem& prob, Rng& rng) {
    Individual ind;
    ind.bits.resize(static_cast<std::size_t>(n));
    ind.power.assign(g.genes.begin() + n, g.genes.end());
    for (int i = 0; i < n; ++i) {
        int b = integer_truncate(g.genes[static_cast<std::size_t>(i)], rng);
        b = std::clamp(b, 0, prob.b_max);
        ind.bits[static_cast<std::size_t>(i)] = b;
    }
    return ind;
}

Genome genome_of(const Individual& ind) {
    Genome g;
    g.genes.reserve(ind.bits.size() * 2);
    for (int b : ind.bits) g.genes.push_back(static_cast<double>(b));
    for (double p : ind.power) g.genes.push_back(p);
    return g;
}

} // namespace

GaResult evolve(const GaProblem& prob, const GaConfig& cfg, Rng& rng) {
    cfg.validate();
    const ChannelRealization& ch = *prob.ch;
    const int n = ch.size();
    const std::size_t pop_size = static_cast<std::size_t>(cfg.population);

    std::vector<double> lower(static_cast<std::size_t>(2 * n), 0.0);
    std::vector<double> upper(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) upper[static_cast<std::size_t>(i)] = static_cast<double>(prob.b_max);
    for (int i = 0; i < n; ++i)
        upper[static_cast<std::size_t>(n + i)] =
            prob.power_upper.empty() ? prob.p_cap : prob.power_upper[static_cast<std::size_t>(i)];

    std::vector<Individual> pop;
    pop.reserve(pop_size);
    for (std::size_t m = 0; m < pop_size; ++m) {
        Genome g;
        g.genes.resize(static_cast<std::size_t>(2 * n));
        for (std::size_t j = 0; j < g.genes.size(); ++j) g.genes[j] = rng.uniform(lower[j], upper[j]);
        pop.push_back(materialize(g, n, prob, rng));
    }
    if (cfg.seed_closed_form) {
        BerTargets t = BerTargets::uniform(n, prob.ber_threshold);
        ContinuousAllocation cont = allocate_power_capped(ch, prob.weights, t,
                                                          static_cast<double>(prob.b_max), prob.p_cap);
        Allocation seed = round_allocation(cont, ch, prob.weights, t);
        seed = rounding_repair(std::move(seed), ch, prob.weights, t, {LinearConstraint{{}, prob.p_cap}});
        Individual ind;
        ind.bits = seed.bits;
        ind.power = seed.power_w;
        pop.back() = std::move(ind);
    }

    auto score = [&](std::vector<Individual>& group) {
        double f_worst = 0.0;
        bool any_feasible = false;
        for (auto& ind : group) {
            evaluate(ind, ch, prob);
            if (ind.feasible) {
                f_worst = any_feasible ? std::max(f_worst, ind.objective) : ind.objective;
                any_feasible = true;
            }
        }
        if (!any_feasible) f_worst = 0.0;
        for (auto& ind : group) ind.fitness = ind.feasible ? ind.objective : f_worst + ind.violation;
    };

    GaResult result;
    Individual best_ever;
    bool have_best = false;
    std::vector<double> best_history;

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        score(pop);

        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });

        const Individual& gen_best = pop[order[0]];
        if (!have_best || better(gen_best, best_ever)) {
            best_ever = gen_best;
            have_best = true;
        }

        double mean = 0.0;
        double feas = 0.0;
        for (const auto& ind : pop) {
            mean += ind.fitness;
            feas += ind.feasible ? 1.0 : 0.0;
        }
        result.log.push_back({gen, gen_best.fitness, mean / static_cast<double>(pop.size()),
                              feas / static_cast<double>(pop.size())});
        result.generations_run = gen + 1;

        best_history.push_back(best_ever.feasible ? best_ever.objective : best_ever.violation);
        if (static_cast<int>(best_history.size()) > cfg.stall_window) {
            const double then = best_history[best_history.size() - 1 - cfg.stall_window];
            const double now = best_history.back();
            if (std::abs(then - now) < cfg.objective_tol) break;
        }
        if (gen + 1 == cfg.max_generations) break;

        // Next generation: elites, then crossover and mutation children.
        std::vector<Individual> next;
        next.reserve(pop.size());
        for (int e = 0; e < cfg.elite_count; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);

        const int remaining = cfg.population - cfg.elite_count;
        int n_cross = static_cast<int>(std::lround(cfg.crossover_fraction * remaining));
        if (n_cross % 2 != 0) --n_cross;

        for (int c = 0; c < n_cross; c += 2) {
            const Genome p1 = genome_of(tournament_select(pop, cfg.tournament_size, rng));
            const Genome p2 = genome_of(tournament_select(pop, cfg.tournament_size, rng));
            double xi = cfg.laplace_scale;
            if (xi <= 0.0) {
                // Spread the children with the parents: mean normalized gene gap.
                double acc = 0.0;
                int counted = 0;
                for (std::size_t j = 0; j < p1.genes.size(); ++j) {
                    const double range = upper[j] - lower[j];
                    if (range > 0.0) {
                        acc += std::abs(p1.genes[j] - p2.genes[j]) / range;
                        ++counted;
                    }
                }
                xi = std::clamp(0.5 * acc / std::max(counted, 1), 0.01, 0.5);
            }
            auto [c1, c2] = laplace_crossover(p1.genes, p2.genes, cfg.laplace_location, xi, rng, lower, upper);
            next.push_back(materialize(Genome{std::move(c1)}, n, prob, rng));
            next.push_back(materialize(Genome{std::move(c2)}, n, prob, rng));
        }

        while (static_cast<int>(next.size()) < cfg.population) {
            Genome g = genome_of(tournament_select(pop, cfg.tournament_size, rng));
            const std::size_t forced = static_cast<std::size_t>(rng.uniform_int(g.genes.size()));
            for (std::size_t j = 0; j < g.genes.size(); ++j) {
                if (j != forced && rng.uniform01() >= cfg.mutation_probability) continue;
                const double index = j < static_cast<std::size_t>(n) ? cfg.mutation_index_int
                                                                     : cfg.mutation_index_real;
                g.genes[j] = power_mutation(g.genes[j], lower[j], upper[j], index, rng);
            }
            next.push_back(materialize(g, n, prob, rng));
        }
        pop = std::move(next);
    }

    result.best = best_ever;
    return result;
}

} // namespace linkadapt
