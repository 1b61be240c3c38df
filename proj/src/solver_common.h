#ifndef DEVSEL_SRC_SOLVER_COMMON_H_
#define DEVSEL_SRC_SOLVER_COMMON_H_

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "devsel/scoring_kernel.h"
#include "devsel/solvers.h"

namespace devsel::internal {

// Kernel plus evaluation counter, in the configured score space.
class Objective {
 public:
  Objective(const PreferenceModel& model, const CandidateSets& candidates,
            ScoreSpace space)
      : kernel_(model, candidates), space_(space) {}

  double operator()(std::span<const int> genes) {
    ++evaluations_;
    return space_ == ScoreSpace::kRaw ? kernel_.Raw(genes) : kernel_.Log(genes);
  }

  uint64_t evaluations() const { return evaluations_; }
  const ScoringKernel& kernel() const { return kernel_; }

 private:
  ScoringKernel kernel_;
  ScoreSpace space_;
  uint64_t evaluations_ = 0;
};

// Strictly better score, or equal score with lexicographically smaller genes.
inline bool Better(double score, const std::vector<int>& genes, double best,
                   const std::vector<int>& best_genes) {
  if (score != best) return score > best;
  return genes < best_genes;
}

inline std::vector<int> RandomGenes(const CandidateSets& candidates,
                                    std::mt19937_64& rng) {
  std::vector<int> genes(candidates.per_function.size());
  for (size_t i = 0; i < genes.size(); ++i) {
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(candidates.per_function[i].size()) - 1);
    genes[i] = pick(rng);
  }
  return genes;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Decodes the genes and re-scores the assignment with the reference Score();
// in raw mode the kernel's value must match it exactly.
SolverResult MakeResult(SolverKind kind, const CandidateSets& candidates,
                        const PreferenceModel& model, const SolverConfig& config,
                        std::vector<int> genes, double kernel_score,
                        uint64_t evaluations, std::vector<TracePoint> trace,
                        const Stopwatch& clock);

// Trace entries are reported as probabilities even in log space.
inline double ToProbability(ScoreSpace space, double value) {
  return space == ScoreSpace::kRaw ? value : std::exp(value);
}

}  // namespace devsel::internal

#endif  // DEVSEL_SRC_SOLVER_COMMON_H_
