#include "irsa/opt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "irsa/errors.hpp"
#include "irsa/parallel.hpp"
#include "irsa/rng.hpp"

namespace irsa {

namespace {

void validate(const OptConstraints& cons) {
    if (cons.min_degree < 2)
        throw std::invalid_argument("OptConstraints: min_degree must be >= 2");
    if (cons.d_max < cons.min_degree)
        throw std::invalid_argument("OptConstraints: d_max must be >= min_degree");
    if (!(cons.target_avg_degree >= cons.min_degree && cons.target_avg_degree <= cons.d_max))
        throw std::invalid_argument(
            "OptConstraints: target_avg_degree must lie in [min_degree, d_max]");
    if (!(cons.plr_target > 0.0 && cons.plr_target < 1.0))
        throw std::invalid_argument("OptConstraints: plr_target must lie in (0,1)");
}

double mean_of(const std::vector<double>& probs, int min_degree) {
    double mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) mean += (min_degree + static_cast<int>(i)) * probs[i];
    return mean;
}

// quantized key for the fitness cache (1e-4 grid)
std::vector<int> cache_key(const std::vector<double>& probs) {
    std::vector<int> key(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        key[i] = static_cast<int>(std::lround(probs[i] * 1e4));
    return key;
}

}  // namespace

std::vector<double> repair_candidate(std::vector<double> probs, const OptConstraints& cons) {
    validate(cons);
    const std::size_t len = static_cast<std::size_t>(cons.d_max - cons.min_degree) + 1;
    if (probs.size() != len)
        throw std::invalid_argument("repair_candidate: wrong candidate length");
    for (int pass = 0; pass < 4 * static_cast<int>(len) + 8; ++pass) {
        double sum = 0.0;
        for (auto& p : probs) {
            if (!(p > 0.0)) p = 0.0;
            sum += p;
        }
        if (sum == 0.0) {
            std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(len));
            sum = 1.0;
        }
        for (auto& p : probs) p /= sum;
        if (len == 1) break;
        const double mean = mean_of(probs, cons.min_degree);
        const double err = cons.target_avg_degree - mean;
        if (std::abs(err) < 1e-12) break;
        if (cons.mean_is_upper_bound && err > 0.0) break;  // mean already under the cap
        // shift mass between the current lowest and highest support points;
        // capping at the donor's mass keeps everything nonnegative, so every
        // pass either hits the mean exactly or drains one support point
        if (err < 0.0) {
            std::size_t hi = len - 1;
            while (hi > 0 && probs[hi] == 0.0) --hi;
            const double amount = std::min(-err / static_cast<double>(hi), probs[hi]);
            probs[hi] -= amount;
            probs.front() += amount;
        } else {
            std::size_t lo = 0;
            while (lo + 1 < len && probs[lo] == 0.0) ++lo;
            const double amount =
                std::min(err / static_cast<double>(len - 1 - lo), probs[lo]);
            probs[lo] -= amount;
            probs.back() += amount;
        }
    }
    const double mean = mean_of(probs, cons.min_degree);
    const bool mean_ok = cons.mean_is_upper_bound
                             ? mean <= cons.target_avg_degree + 1e-6
                             : std::abs(mean - cons.target_avg_degree) < 1e-6;
    double sum = 0.0;
    bool nonneg = true;
    for (const auto& p : probs) {
        sum += p;
        nonneg = nonneg && p >= 0.0;
    }
    if (!mean_ok || !nonneg || std::abs(sum - 1.0) > 1e-9)
        throw NumericalError("repair_candidate: projection did not converge");
    return probs;
}

DegreeDistribution candidate_to_distribution(const std::vector<double>& probs,
                                             const OptConstraints& cons) {
    std::map<int, double> dist;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (probs[i] > 0.0) dist[cons.min_degree + static_cast<int>(i)] = probs[i];
    return DegreeDistribution(std::move(dist));
}

double evaluate_candidate(const DegreeDistribution& dist, const ChannelModel& ch,
                          const OptConstraints& cons, const DeConfig& de_cfg,
                          const ThresholdSearch& search) {
    try {
        const ThresholdResult res = decoding_threshold(dist, ch, cons.plr_target, de_cfg, search);
        return res.feasible ? res.threshold : 0.0;
    } catch (const NumericalError&) {
        return 0.0;  // a candidate the search cannot rank is simply unfit
    }
}

OptResult optimize_distribution(const OptConstraints& cons, const ChannelModel& ch,
                                const OptConfig& cfg) {
    validate(cons);
    if (cfg.population_size < 8)
        throw std::invalid_argument("OptConfig: population_size must be >= 8");
    if (!(cfg.mutation_factor > 0.0 && cfg.mutation_factor <= 2.0))
        throw std::invalid_argument("OptConfig: mutation_factor must lie in (0, 2]");
    if (!(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0))
        throw std::invalid_argument("OptConfig: crossover_rate must lie in [0, 1]");

    const std::size_t len = static_cast<std::size_t>(cons.d_max - cons.min_degree) + 1;
    std::map<std::vector<int>, double> cache;
    long evaluations = 0;

    // resolve candidates through the cache; misses run in parallel, inserts
    // stay sequential so results do not depend on the worker count
    const auto evaluate_batch = [&](const std::vector<std::vector<double>>& candidates,
                                    std::vector<double>& fitness) {
        std::vector<std::size_t> miss;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const auto key = cache_key(candidates[i]);
            const auto it = cache.find(key);
            if (it != cache.end())
                fitness[i] = it->second;
            else
                miss.push_back(i);
        }
        std::vector<double> miss_fitness(miss.size(), 0.0);
        parallel_for(miss.size(), cfg.workers, [&](std::size_t k) {
            const auto dist = candidate_to_distribution(candidates[miss[k]], cons);
            miss_fitness[k] = evaluate_candidate(dist, ch, cons, cfg.de, cfg.search);
        });
        for (std::size_t k = 0; k < miss.size(); ++k) {
            fitness[miss[k]] = miss_fitness[k];
            cache.emplace(cache_key(candidates[miss[k]]), miss_fitness[k]);
            ++evaluations;
        }
    };

    Rng rng(splitmix64(cfg.seed));
    const int pop = cfg.population_size;
    std::vector<std::vector<double>> population(pop, std::vector<double>(len));
    for (auto& candidate : population) {
        for (auto& p : candidate) p = rng.uniform();
        candidate = repair_candidate(std::move(candidate), cons);
    }
    std::vector<double> fitness(pop, 0.0);
    evaluate_batch(population, fitness);

    OptResult result{candidate_to_distribution(population[0], cons)};
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i)
        if (fitness[i] > fitness[best]) best = i;
    result.best_history.push_back(fitness[best]);

    std::vector<std::vector<double>> trials(pop, std::vector<double>(len));
    std::vector<double> trial_fitness(pop, 0.0);
    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        if (cfg.target_fitness > 0.0 && fitness[best] >= cfg.target_fitness) break;
        // DE/rand/1/bin, sequential RNG phase
        for (int i = 0; i < pop; ++i) {
            int r1 = i, r2 = i, r3 = i;
            while (r1 == i) r1 = static_cast<int>(rng.uniform_int(pop));
            while (r2 == i || r2 == r1) r2 = static_cast<int>(rng.uniform_int(pop));
            while (r3 == i || r3 == r1 || r3 == r2) r3 = static_cast<int>(rng.uniform_int(pop));
            const std::size_t j_rand = rng.uniform_int(len);
            auto& trial = trials[i];
            for (std::size_t j = 0; j < len; ++j) {
                if (j == j_rand || rng.uniform() < cfg.crossover_rate)
                    trial[j] = population[r1][j] +
                               cfg.mutation_factor * (population[r2][j] - population[r3][j]);
                else
                    trial[j] = population[i][j];
            }
            trial = repair_candidate(std::move(trial), cons);
        }
        evaluate_batch(trials, trial_fitness);
        for (int i = 0; i < pop; ++i) {
            if (trial_fitness[i] >= fitness[i]) {
                population[i] = trials[i];
                fitness[i] = trial_fitness[i];
            }
        }
        best = 0;
        for (std::size_t i = 1; i < population.size(); ++i)
            if (fitness[i] > fitness[best]) best = i;
        result.best_history.push_back(fitness[best]);
        result.generations_run = gen;
    }

    result.best = candidate_to_distribution(population[best], cons);
    result.fitness_evaluations = evaluations;
    // fine re-evaluation of the winner on the standard evaluation path
    ThresholdSearch fine;
    fine.resolution = cfg.final_resolution;
    result.threshold = evaluate_candidate(result.best, ch, cons, DeConfig{}, fine);
    return result;
}

}  // namespace irsa
