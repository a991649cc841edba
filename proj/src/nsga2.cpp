// Copyright 2026 The quarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quarl/nsga2.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "quarl/random.hpp"

namespace quarl::nsga2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kEvalStream = 0x5000;

}  // namespace

double SearchConfig::effective_mutation_prob() const {
    return mutation_prob < 0.0 ? 1.0 / static_cast<double>(genome_length) : mutation_prob;
}

void SearchConfig::validate() const {
    if (population < 2 || population % 2 != 0) {
        throw std::invalid_argument("population must be even and >= 2");
    }
    if (genome_length == 0) {
        throw std::invalid_argument("genome_length must be >= 1");
    }
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
        throw std::invalid_argument("crossover_prob must lie in [0, 1]");
    }
    if (effective_mutation_prob() > 1.0) {
        throw std::invalid_argument("mutation_prob must lie in [0, 1]");
    }
    if (eval_seeds == 0) {
        throw std::invalid_argument("eval_seeds must be >= 1");
    }
}

bool dominates(const Objectives& a, const Objectives& b) {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) {
            return false;
        }
        strictly = strictly || a[k] < b[k];
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    if (n == 0) {
        return fronts;
    }
    fronts.emplace_back();
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) {
                continue;
            }
            if (dominates(objectives[p], objectives[q])) {
                dominated_by_me[p].push_back(q);
            } else if (dominates(objectives[q], objectives[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    for (std::size_t f = 0; !fronts[f].empty(); ++f) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[f]) {
            for (std::size_t q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        if (next.empty()) {
            break;
        }
        fronts.push_back(std::move(next));
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), kInf);
        return distance;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < std::tuple_size_v<Objectives>; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
        const double lo = front[order.front()][k];
        const double hi = front[order.back()][k];
        distance[order.front()] = kInf;
        distance[order.back()] = kInf;
        if (hi == lo) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            distance[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / (hi - lo);
        }
    }
    return distance;
}

bool is_trainable(const Genome& genome) {
    bool var = false;
    bool enc = false;
    for (Gene g : genome.genes) {
        if (g == Gene::Measure) {
            break;
        }
        var = var || g == Gene::Var;
        enc = enc || g == Gene::Enc;
    }
    return var && enc;
}

Objectives evaluate(const Genome& genome, const SearchConfig& config) {
    return reward_evaluator(config)(genome, config.seed);
}

Evaluator reward_evaluator(const SearchConfig& config) {
    return [config](const Genome& genome, std::uint64_t seed) -> Objectives {
        const double f2 = static_cast<double>(genome.entangler_count());
        if (!is_trainable(genome) || config.eval_episodes == 0) {
            return {0.0, f2};
        }
        double total = 0.0;
        for (std::size_t s = 0; s < config.eval_seeds; ++s) {
            TrainConfig tc = config.train;
            tc.genome = genome;
            tc.backend.kind = BackendKind::Exact;
            tc.episodes = config.eval_episodes;
            tc.stop_moving_average = 0.0;
            tc.seed = derive_seed(seed, s);
            const TrainResult r = train(tc);
            double sum = 0.0;
            for (const EpisodeMetrics& m : r.metrics) {
                sum += m.reward;
            }
            total += sum / static_cast<double>(r.metrics.size());
        }
        return {-total / static_cast<double>(config.eval_seeds), f2};
    };
}

namespace {

Genome random_genome(std::size_t length, Rng& rng) {
    Genome g;
    g.genes.resize(length);
    for (Gene& gene : g.genes) {
        gene = static_cast<Gene>(uniform_index(rng, 4));
    }
    return g;
}

// Evaluates every genome not yet in `cache`, then fills in objectives.
void evaluate_all(std::vector<Individual>& individuals, const SearchConfig& config, const Evaluator& evaluator,
                  std::map<std::string, Objectives>& cache, std::vector<Individual>& evaluated) {
    std::vector<std::string> pending;
    for (const Individual& ind : individuals) {
        const std::string key = format_genome(ind.genome);
        if (!cache.contains(key) && std::find(pending.begin(), pending.end(), key) == pending.end()) {
            pending.push_back(key);
        }
    }
    std::vector<Objectives> results(pending.size());
    auto run = [&](std::size_t i) {
        const Genome genome = parse_genome(pending[i]);
        std::uint64_t seed = derive_seed(config.seed, kEvalStream);
        for (Gene g : genome.genes) {
            seed = derive_seed(seed, static_cast<std::uint64_t>(g));
        }
        results[i] = evaluator(genome, seed);
    };
    if (config.workers <= 1 || pending.size() <= 1) {
        for (std::size_t i = 0; i < pending.size(); ++i) {
            run(i);
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        for (std::size_t w = 0; w < std::min(config.workers, pending.size()); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < pending.size();) {
                    try {
                        run(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        for (std::thread& t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
        cache.emplace(pending[i], results[i]);
        evaluated.push_back({parse_genome(pending[i]), results[i], 0, 0.0});
    }
    for (Individual& ind : individuals) {
        ind.objectives = cache.at(format_genome(ind.genome));
    }
}

// Assigns rank and crowding to every individual in place.
void rank_population(std::vector<Individual>& pop) {
    std::vector<Objectives> objs(pop.size());
    std::transform(pop.begin(), pop.end(), objs.begin(), [](const Individual& i) { return i.objectives; });
    const auto fronts = non_dominated_sort(objs);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<Objectives> front_objs;
        for (std::size_t idx : fronts[f]) {
            front_objs.push_back(objs[idx]);
        }
        const std::vector<double> crowd = crowding_distance(front_objs);
        for (std::size_t j = 0; j < fronts[f].size(); ++j) {
            pop[fronts[f][j]].rank = f;
            pop[fronts[f][j]].crowding = crowd[j];
        }
    }
}

bool crowded_less(const Individual& a, const Individual& b) {
    if (a.rank != b.rank) {
        return a.rank < b.rank;
    }
    return a.crowding > b.crowding;
}

const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
    const Individual& a = pop[uniform_index(rng, pop.size())];
    const Individual& b = pop[uniform_index(rng, pop.size())];
    return crowded_less(b, a) ? b : a;
}

std::vector<Individual> pareto_archive(const std::vector<Individual>& evaluated) {
    std::vector<Objectives> objs(evaluated.size());
    std::transform(evaluated.begin(), evaluated.end(), objs.begin(), [](const Individual& i) { return i.objectives; });
    std::vector<Individual> archive;
    if (evaluated.empty()) {
        return archive;
    }
    const auto fronts = non_dominated_sort(objs);
    for (std::size_t idx : fronts[0]) {
        archive.push_back(evaluated[idx]);
    }
    rank_population(archive);
    std::stable_sort(archive.begin(), archive.end(), [](const Individual& a, const Individual& b) {
        if (a.objectives[0] != b.objectives[0]) {
            return a.objectives[0] < b.objectives[0];
        }
        return a.objectives[1] < b.objectives[1];
    });
    return archive;
}

}  // namespace

SearchResult evolve(const SearchConfig& config, const Evaluator& evaluator) {
    config.validate();
    Rng rng(config.seed);
    const double p_mut = config.effective_mutation_prob();
    std::map<std::string, Objectives> cache;
    SearchResult result;

    std::vector<Individual> pop(config.population);
    for (Individual& ind : pop) {
        ind.genome = random_genome(config.genome_length, rng);
    }
    evaluate_all(pop, config, evaluator, cache, result.evaluated);
    rank_population(pop);
    result.snapshots.push_back(pop);

    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        std::vector<Individual> offspring;
        offspring.reserve(config.population);
        while (offspring.size() < config.population) {
            Genome a = tournament(pop, rng).genome;
            Genome b = tournament(pop, rng).genome;
            if (config.genome_length > 1 && uniform01(rng) < config.crossover_prob) {
                const std::size_t cut = 1 + uniform_index(rng, config.genome_length - 1);
                for (std::size_t k = cut; k < config.genome_length; ++k) {
                    std::swap(a.genes[k], b.genes[k]);
                }
            }
            for (Genome* child : {&a, &b}) {
                for (Gene& gene : child->genes) {
                    if (uniform01(rng) < p_mut) {
                        gene = static_cast<Gene>(uniform_index(rng, 4));
                    }
                }
                offspring.push_back({std::move(*child), {0.0, 0.0}, 0, 0.0});
            }
        }
        evaluate_all(offspring, config, evaluator, cache, result.evaluated);

        std::vector<Individual> combined = pop;
        combined.insert(combined.end(), offspring.begin(), offspring.end());
        rank_population(combined);
        std::stable_sort(combined.begin(), combined.end(), crowded_less);
        combined.resize(config.population);
        pop = std::move(combined);
        rank_population(pop);
        result.snapshots.push_back(pop);
    }

    result.archive = pareto_archive(result.evaluated);
    return result;
}

SearchResult evolve(const SearchConfig& config) {
    return evolve(config, reward_evaluator(config));
}

}  // namespace quarl::nsga2
