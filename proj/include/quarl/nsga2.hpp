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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quarl/circuit.hpp"
#include "quarl/reinforce.hpp"

namespace quarl::nsga2 {

/// (f1, f2), both minimized. For architecture search f1 is the negated mean
/// training reward and f2 the number of entangling blocks.
using Objectives = std::array<double, 2>;

struct Individual {
    Genome genome;
    Objectives objectives{0.0, 0.0};
    std::size_t rank = 0;
    double crowding = 0.0;
};

struct SearchConfig {
    std::size_t population = 20;
    std::size_t generations = 10;
    std::size_t genome_length = kDefaultGenomeLength;
    double crossover_prob = 0.9;
    /// Per-gene resample probability; a negative value means 1 / genome_length.
    double mutation_prob = -1.0;
    std::size_t eval_episodes = 150;
    std::size_t eval_seeds = 2;
    std::uint64_t seed = 0;
    /// Parallel genome evaluations; 1 runs inline.
    std::size_t workers = 1;
    /// Hyperparameters and backend used by the reward evaluator. Its genome,
    /// episodes and seed fields are overwritten per evaluation.
    TrainConfig train;

    double effective_mutation_prob() const;
    /// Throws std::invalid_argument.
    void validate() const;
};

/// Maps a genome and an evaluation seed to objectives.
using Evaluator = std::function<Objectives(const Genome&, std::uint64_t seed)>;

/// a is no worse in every objective and strictly better in at least one.
bool dominates(const Objectives& a, const Objectives& b);

/// Fronts of indices into `objectives`; front 0 is the non-dominated set.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> objectives);

/// Boundary members get +inf; interior members the range-normalized sum of neighbour gaps.
std::vector<double> crowding_distance(std::span<const Objectives> front);

/// True when the genome has at least one Var and one Enc block before the terminator.
bool is_trainable(const Genome& genome);

/// RL fitness: f1 = -(mean reward over eval_episodes noiseless training episodes,
/// averaged over eval_seeds), f2 = entangler count. Untrainable genomes score f1 = 0.
Objectives evaluate(const Genome& genome, const SearchConfig& config);

Evaluator reward_evaluator(const SearchConfig& config);

struct SearchResult {
    /// Non-dominated genomes over everything evaluated, sorted by f1 then f2.
    std::vector<Individual> archive;
    /// Population after each generation; entry 0 is the initial population.
    std::vector<std::vector<Individual>> snapshots;
    std::vector<Individual> evaluated;
};

SearchResult evolve(const SearchConfig& config, const Evaluator& evaluator);
SearchResult evolve(const SearchConfig& config);

}  // namespace quarl::nsga2
