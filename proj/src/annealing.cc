#include <cmath>

#include "solver_common.h"

namespace devsel {

SolverResult SolveSimulatedAnnealing(const CandidateSets& candidates,
                                     const PreferenceModel& model,
                                     const SolverConfig& config) {
  internal::Stopwatch clock;
  config.Validate(candidates.functions.size());
  const SaConfig& sa = config.sa;
  internal::Objective objective(model, candidates, config.score_space);
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Only positions with an alternative can move.
  std::vector<int> movable;
  for (size_t i = 0; i < candidates.per_function.size(); ++i) {
    if (candidates.per_function[i].size() > 1) movable.push_back(static_cast<int>(i));
  }

  std::vector<int> current = internal::RandomGenes(candidates, rng);
  double current_score = objective(current);
  std::vector<int> best_genes = current;
  double best = current_score;
  std::vector<TracePoint> trace{
      {objective.evaluations(), internal::ToProbability(config.score_space, best)}};

  const double cooling =
      sa.steps > 1 ? std::pow(sa.min_temperature / sa.max_temperature,
                              1.0 / static_cast<double>(sa.steps - 1))
                   : 1.0;
  double temperature = sa.max_temperature;
  std::vector<int> proposal = current;

  for (int64_t step = 0; step < sa.steps; ++step) {
    proposal = current;
    if (!movable.empty()) {
      std::uniform_int_distribution<size_t> pick_pos(0, movable.size() - 1);
      const int pos = movable[pick_pos(rng)];
      const int k = static_cast<int>(candidates.per_function[pos].size());
      std::uniform_int_distribution<int> pick_val(0, k - 2);
      int v = pick_val(rng);
      if (v >= current[pos]) ++v;  // skip the current value
      proposal[pos] = v;
    }
    const double s = objective(proposal);
    const double delta = s - current_score;
    if (delta >= 0.0 || unit(rng) < std::exp(delta / temperature)) {
      current.swap(proposal);
      current_score = s;
      if (internal::Better(current_score, current, best, best_genes)) {
        best = current_score;
        best_genes = current;
        trace.push_back({objective.evaluations(),
                         internal::ToProbability(config.score_space, best)});
      }
    }
    temperature *= cooling;
  }
  return internal::MakeResult(SolverKind::kSimulatedAnnealing, candidates, model,
                              config, std::move(best_genes), best,
                              objective.evaluations(), std::move(trace), clock);
}

}  // namespace devsel
