#pragma once

#include <cstdint>
#include <vector>

#include "irsa/capture.hpp"
#include "irsa/de.hpp"
#include "irsa/degree.hpp"

namespace irsa {

struct OptConstraints {
    int min_degree = 2;
    int d_max = 16;
    double target_avg_degree = 4.0;  // equality constraint on the mean
    bool mean_is_upper_bound = false;  // treat the mean as <= instead
    double plr_target = 1e-2;
};

struct OptConfig {
    int population_size = 40;
    int max_generations = 500;
    double mutation_factor = 0.5;  // F
    double crossover_rate = 0.9;   // CR
    std::uint64_t seed = 1;
    // coarse settings for fitness evaluation; the winner is re-evaluated on
    // the default full-quality path at final_resolution
    DeConfig de{.max_iterations = 2000};
    ThresholdSearch search{.g_lo = 0.2, .g_hi = 2.5, .resolution = 0.01};
    double final_resolution = 1e-3;
    double target_fitness = 0.0;  // stop early once reached (0 = run all generations)
    int workers = 1;
};

struct OptResult {
    DegreeDistribution best;
    double threshold = 0.0;               // fine re-evaluation of the winner
    std::vector<double> best_history;     // per-generation best fitness (coarse)
    int generations_run = 0;
    long fitness_evaluations = 0;
};

// Candidate vectors index degrees min_degree..d_max. Repair projects a raw
// vector onto the feasible set: nonnegative, sum 1, mean equal to (or below)
// the target.
std::vector<double> repair_candidate(std::vector<double> probs, const OptConstraints& cons);

DegreeDistribution candidate_to_distribution(const std::vector<double>& probs,
                                             const OptConstraints& cons);

// Fitness of one candidate: its decoding threshold for the constraint's PLR
// target, or 0 when the target is missed at the bottom of the search window.
double evaluate_candidate(const DegreeDistribution& dist, const ChannelModel& ch,
                          const OptConstraints& cons, const DeConfig& de_cfg,
                          const ThresholdSearch& search);

// DE/rand/1/bin over repaired candidates, maximizing the decoding threshold.
OptResult optimize_distribution(const OptConstraints& cons, const ChannelModel& ch,
                                const OptConfig& cfg);

}  // namespace irsa
