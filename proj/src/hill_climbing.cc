#include "solver_common.h"

namespace devsel {

SolverResult SolveHillClimbing(const CandidateSets& candidates,
                               const PreferenceModel& model,
                               const SolverConfig& config) {
  internal::Stopwatch clock;
  config.Validate(candidates.functions.size());
  internal::Objective objective(model, candidates, config.score_space);
  std::mt19937_64 rng(config.rng_seed);

  std::vector<int> best_genes;
  double best = 0.0;
  std::vector<TracePoint> trace;

  for (int restart = 0; restart < config.hc.max_restarts; ++restart) {
    std::vector<int> current = internal::RandomGenes(candidates, rng);
    double current_score = objective(current);
    if (best_genes.empty() || internal::Better(current_score, current, best, best_genes)) {
      best = current_score;
      best_genes = current;
      trace.push_back({objective.evaluations(),
                       internal::ToProbability(config.score_space, best)});
    }
    for (;;) {
      // Scan the whole neighbourhood; the first strictly best neighbour in
      // (position, candidate) order wins.
      int move_pos = -1, move_val = -1;
      double move_score = current_score;
      std::vector<int> probe = current;
      for (size_t pos = 0; pos < current.size(); ++pos) {
        for (int v = 0; v < static_cast<int>(candidates.per_function[pos].size()); ++v) {
          if (v == current[pos]) continue;
          probe[pos] = v;
          const double s = objective(probe);
          if (s > move_score) {
            move_score = s;
            move_pos = static_cast<int>(pos);
            move_val = v;
          }
        }
        probe[pos] = current[pos];
      }
      if (move_pos < 0) break;
      current[move_pos] = move_val;
      current_score = move_score;
      if (internal::Better(current_score, current, best, best_genes)) {
        best = current_score;
        best_genes = current;
        trace.push_back({objective.evaluations(),
                         internal::ToProbability(config.score_space, best)});
      }
    }
  }
  return internal::MakeResult(SolverKind::kHillClimbing, candidates, model, config,
                              std::move(best_genes), best, objective.evaluations(),
                              std::move(trace), clock);
}

}  // namespace devsel
