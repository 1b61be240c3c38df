#include <algorithm>
#include <cmath>
#include <numeric>

#include "devsel/errors.h"
#include "solver_common.h"

namespace devsel {
namespace {

struct Individual {
  std::vector<int> genes;
  double score = 0.0;
};

// Best first; equal scores ordered lexicographically so ranks are total.
bool Fitter(const Individual& a, const Individual& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.genes < b.genes;
}

}  // namespace

SolverResult SolveGenetic(const CandidateSets& candidates,
                          const PreferenceModel& model,
                          const SolverConfig& config) {
  internal::Stopwatch clock;
  const size_t n = candidates.functions.size();
  config.Validate(n);
  const GaConfig& ga = config.ga;
  internal::Objective objective(model, candidates, config.score_space);
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int pop_size = ga.PopulationFor(n);
  const int elites = std::min(
      pop_size, static_cast<int>(std::ceil(ga.elitism_rate * pop_size - 1e-12)));

  auto resample = [&](std::vector<int>& genes, size_t pos) {
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(candidates.per_function[pos].size()) - 1);
    genes[pos] = pick(rng);
  };
  auto mutate = [&](std::vector<int>& genes) {
    if (ga.mutation == MutationMode::kPerOffspring) {
      if (unit(rng) < ga.mutation_rate) {
        std::uniform_int_distribution<size_t> pick_pos(0, n - 1);
        resample(genes, pick_pos(rng));
      }
    } else {
      const double per_gene = ga.mutation_rate / static_cast<double>(n);
      for (size_t pos = 0; pos < n; ++pos) {
        if (unit(rng) < per_gene) resample(genes, pos);
      }
    }
  };

  std::vector<Individual> population;
  population.reserve(pop_size);
  for (const auto& seeded : ga.seed_population) {
    if (static_cast<int>(population.size()) == pop_size) break;
    if (seeded.size() != n) throw InputError("seed individual has the wrong length");
    for (size_t pos = 0; pos < n; ++pos) {
      if (seeded[pos] < 0 ||
          seeded[pos] >= static_cast<int>(candidates.per_function[pos].size())) {
        throw InputError("seed individual gene out of range");
      }
    }
    population.push_back({seeded, 0.0});
  }
  while (static_cast<int>(population.size()) < pop_size) {
    population.push_back({internal::RandomGenes(candidates, rng), 0.0});
  }

  std::vector<int> best_genes;
  double best = 0.0;
  std::vector<TracePoint> trace;
  auto consider = [&](const Individual& ind) {
    if (best_genes.empty() || internal::Better(ind.score, ind.genes, best, best_genes)) {
      const bool improved = best_genes.empty() || ind.score > best;
      best = ind.score;
      best_genes = ind.genes;
      if (improved) {
        trace.push_back({objective.evaluations(),
                         internal::ToProbability(config.score_space, best)});
      }
    }
  };

  for (auto& ind : population) {
    ind.score = objective(ind.genes);
    consider(ind);
  }
  std::sort(population.begin(), population.end(), Fitter);

  // Tournament over ranks of the sorted population: the lowest rank drawn wins.
  std::uniform_int_distribution<int> pick_rank(0, pop_size - 1);
  auto tournament = [&]() -> const Individual& {
    int winner = pick_rank(rng);
    for (int t = 1; t < ga.tournament_size; ++t) winner = std::min(winner, pick_rank(rng));
    return population[winner];
  };

  std::vector<Individual> next;
  next.reserve(pop_size);
  int stale = 0;
  for (int generation = 0; generation < ga.generations; ++generation) {
    const double best_before = best;
    next.assign(population.begin(), population.begin() + elites);
    while (static_cast<int>(next.size()) < pop_size) {
      Individual a{tournament().genes, 0.0};
      Individual b{tournament().genes, 0.0};
      if (n >= 2 && unit(rng) < ga.crossover_rate) {
        std::uniform_int_distribution<size_t> pick_cut(1, n - 1);
        const size_t cut = pick_cut(rng);
        std::swap_ranges(a.genes.begin() + cut, a.genes.end(), b.genes.begin() + cut);
      }
      for (Individual* child : {&a, &b}) {
        if (static_cast<int>(next.size()) == pop_size) break;
        mutate(child->genes);
        child->score = objective(child->genes);
        consider(*child);
        next.push_back(std::move(*child));
      }
    }
    population.swap(next);
    std::sort(population.begin(), population.end(), Fitter);
    if (ga.on_generation) ga.on_generation(generation, population.front().score);

    stale = best > best_before ? 0 : stale + 1;
    if (ga.early_stop_generations > 0 && stale >= ga.early_stop_generations) break;
  }

  return internal::MakeResult(SolverKind::kGeneticAlgorithm, candidates, model,
                              config, std::move(best_genes), best,
                              objective.evaluations(), std::move(trace), clock);
}

}  // namespace devsel
