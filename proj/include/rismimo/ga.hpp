// SPDX-License-Identifier: Apache-2.0
//
// ris-mimo-sim: uplink RIS-aided massive MIMO rate analysis and phase optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISMIMO_GA_HPP
#define RISMIMO_GA_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rismimo/moments.hpp"
#include "rismimo/rng.hpp"
#include "rismimo/types.hpp"

namespace rismimo {

/// Genetic-algorithm knobs. Zeros select the documented defaults where noted.
struct GaConfig {
    std::size_t elites = 4;        // S_e, copied unchanged each generation
    std::size_t mutants = 8;       // S_m, uniform per-gene mutation offspring
    std::size_t crossed = 8;       // S_p, two-point crossover offspring
    std::size_t max_iters = 0;     // generation budget; 0 -> N * 100
    double mutation_rate = 0.0;    // per-gene probability; 0 -> 1 / N
    std::size_t phase_grid = 0;    // 0 continuous, else genes on {2*pi*j/L}
    std::uint64_t seed = 0;

    std::size_t population() const { return elites + mutants + crossed; }

    void validate() const {
        if (elites < 1 || mutants < 1 || crossed < 1)
            throw std::invalid_argument("each GA partition needs at least one individual");
        if (mutation_rate < 0.0 || mutation_rate > 1.0)
            throw std::invalid_argument("mutation_rate must lie in [0,1]");
    }
};

struct GaGeneration {
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
};

/// Per-generation fitness statistics; best_fitness is nondecreasing because
/// elites survive and fitness is deterministic.
struct GaTrace {
    std::vector<GaGeneration> generations;
};

struct GaResult {
    PhaseVector best;
    double best_fitness = -std::numeric_limits<double>::infinity();
    GaTrace trace;
};

enum class GaObjective { sum_rate, min_rate };

inline double fitness_sum_rate(const PhaseVector& phases, const ScenarioGeometry& geom,
                               const SystemConfig& cfg) {
    return RateEvaluator(geom, cfg).sum_rate(phases);
}

inline double fitness_min_rate(const PhaseVector& phases, const ScenarioGeometry& geom,
                               const SystemConfig& cfg) {
    return RateEvaluator(geom, cfg).min_rate(phases);
}

namespace detail {

inline double draw_gene(Rng& rng, std::size_t grid) {
    if (grid == 0) return rng.uniform(0.0, two_pi);
    return two_pi * static_cast<double>(rng.integer(grid)) / static_cast<double>(grid);
}

}  // namespace detail

/// Run the elitism / mutation / SUS + two-point-crossover loop over a generic
/// fitness callable `double(const PhaseVector&)`. Higher fitness wins.
template <typename Fitness>
GaResult ga_optimize_with(Fitness&& fitness, std::size_t n_phases, const GaConfig& ga) {
    ga.validate();
    if (n_phases < 2)
        throw std::invalid_argument("ga_optimize: need at least two phase genes");
    const std::size_t S = ga.population(), Se = ga.elites, Sm = ga.mutants, Sp = ga.crossed;
    const std::size_t iters = ga.max_iters != 0 ? ga.max_iters : n_phases * 100;
    const double mut_rate =
        ga.mutation_rate != 0.0 ? ga.mutation_rate : 1.0 / static_cast<double>(n_phases);

    Rng rng(ga.seed);
    std::vector<std::vector<double>> pop(S, std::vector<double>(n_phases));
    for (auto& ind : pop)
        for (double& g : ind) g = detail::draw_gene(rng, ga.phase_grid);

    GaResult result;
    std::vector<double> fit(S);
    std::vector<std::size_t> order(S);

    for (std::size_t q = 0;; ++q) {
        double sum = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            fit[s] = fitness(PhaseVector(pop[s]));
            sum += fit[s];
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
        result.trace.generations.push_back({fit[order[0]], sum / static_cast<double>(S)});
        if (fit[order[0]] > result.best_fitness) {
            result.best_fitness = fit[order[0]];
            result.best = PhaseVector(pop[order[0]]);
        }
        if (q == iters) break;

        std::vector<std::vector<double>> next;
        next.reserve(S);
        for (std::size_t s = 0; s < Se; ++s) next.push_back(pop[order[s]]);

        // bottom S_m, uniform mutation
        for (std::size_t s = 0; s < Sm; ++s) {
            std::vector<double> child = pop[order[S - Sm + s]];
            for (double& g : child)
                if (rng.uniform() < mut_rate) g = detail::draw_gene(rng, ga.phase_grid);
            next.push_back(std::move(child));
        }

        // middle S_p feed SUS; floor-shift fitness so weights are positive
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < Sp; ++s) lo = std::min(lo, fit[order[Se + s]]);
        std::vector<double> weight(Sp);
        double total = 0.0;
        for (std::size_t s = 0; s < Sp; ++s) {
            weight[s] = fit[order[Se + s]] - lo + 1e-12;
            total += weight[s];
        }
        const std::size_t n_parents = 2 * Sp;
        double step = total / static_cast<double>(n_parents);
        double pointer = rng.uniform() * step;
        std::vector<std::size_t> parents;
        parents.reserve(n_parents);
        {
            double cum = weight[0];
            std::size_t idx = 0;
            for (std::size_t p = 0; p < n_parents; ++p) {
                double target = pointer + step * static_cast<double>(p);
                while (cum < target && idx + 1 < Sp) cum += weight[++idx];
                parents.push_back(order[Se + idx]);
            }
        }
        for (std::size_t s = 0; s < Sp; ++s) {
            const std::vector<double>& pa = pop[parents[2 * s]];
            const std::vector<double>& pb = pop[parents[2 * s + 1]];
            std::size_t c1, c2;
            if (n_phases == 2) {
                c1 = 1;
                c2 = 2;  // only one interior cut exists; swap the tail gene
            } else {
                c1 = 1 + rng.integer(n_phases - 1);
                do {
                    c2 = 1 + rng.integer(n_phases - 1);
                } while (c2 == c1);
                if (c2 < c1) std::swap(c1, c2);
            }
            std::vector<double> child = pa;
            for (std::size_t g = c1; g < c2; ++g) child[g] = pb[g];
            next.push_back(std::move(child));
        }
        pop = std::move(next);
    }
    for (double& t : result.best.theta) t = PhaseVector::wrap(t);
    return result;
}

/// Algorithm front door: optimize sum rate or minimum user rate over the RIS
/// phase vector, using only statistical CSI baked into the evaluator.
inline GaResult ga_optimize(GaObjective objective, const ScenarioGeometry& geom,
                            const SystemConfig& cfg, const GaConfig& ga) {
    RateEvaluator eval(geom, cfg);
    auto fitness = [&](const PhaseVector& p) {
        return objective == GaObjective::sum_rate ? eval.sum_rate(p) : eval.min_rate(p);
    };
    return ga_optimize_with(fitness, cfg.ris_elements, ga);
}

}  // namespace rismimo

#endif
