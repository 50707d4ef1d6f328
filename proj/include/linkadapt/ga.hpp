#pragma once

#include "linkadapt/rng.hpp"
#include "linkadapt/types.hpp"

namespace linkadapt {

struct GaConfig {
    int population = 100;
    int max_generations = 1500;
    double objective_tol = 1e-12;
    int stall_window = 50;
    int elite_count = 5;
    double crossover_fraction = 0.8;
    int tournament_size = 2;
    double laplace_location = 0.0;
    double laplace_scale = 0.0; // 0: adapt to the parents' spread
    double mutation_index_real = 0.25;
    double mutation_index_int = 4.0;
    // Per-gene perturbation chance for a mutation child; at least one gene
    // always moves so no child is a clone.
    double mutation_probability = 0.02;
    bool seed_closed_form = false;

    void validate() const;
};

// One candidate: integer bit genes plus real power genes.
struct Individual {
    std::vector<int> bits;
    std::vector<double> power;
    double fitness = 0.0;
    double objective = 0.0;
    double violation = 0.0;
    bool feasible = false;
};

// The average-BER problem instance (OP1): minimize the scalarized objective
// subject to BER_av <= ber_threshold, sum p <= p_cap, b_i <= b_max.
struct GaProblem {
    const ChannelRealization* ch = nullptr;
    MoopWeights weights;
    double ber_threshold = 1e-4;
    double p_cap = 0.0;
    int b_max = 6;
    std::vector<double> power_upper; // per-gene bound; empty: p_cap each
};

// Bit-weighted average BER over loaded subcarriers; throws when no bits are
// loaded (callers treat that as a vacuously satisfied constraint).
double average_ber(const Individual& ind, const ChannelRealization& ch);

// Deb-style penalty fitness: feasible individuals score their objective,
// infeasible ones f_worst plus the summed constraint violations.
double fitness(const Individual& ind, const ChannelRealization& ch, const GaProblem& prob, double f_worst);

// Feasibility-dominance tournament: k draws with replacement, lowest index
// wins ties.
const Individual& tournament_select(const std::vector<Individual>& pop, int k, Rng& rng);

// Laplace crossover on raw gene vectors; children are clamped to bounds.
std::pair<std::vector<double>, std::vector<double>> laplace_crossover(const std::vector<double>& parent1,
                                                                      const std::vector<double>& parent2,
                                                                      double a, double xi, Rng& rng,
                                                                      const std::vector<double>& lower,
                                                                      const std::vector<double>& upper);

// Power mutation toward one of the bounds; z = upper mutates downward.
double power_mutation(double z, double lower, double upper, double index, Rng& rng);

// Integers pass through; reals become floor(x) or floor(x)+1 with equal
// probability.
int integer_truncate(double x, Rng& rng);

struct GenerationLog {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double feasible_fraction = 0.0;
};

struct GaResult {
    Individual best;
    std::vector<GenerationLog> log;
    int generations_run = 0;
};

GaResult evolve(const GaProblem& prob, const GaConfig& cfg, Rng& rng);

} // namespace linkadapt
