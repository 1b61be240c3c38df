#include <cmath>
#include <limits>

#include "devsel/errors.h"
#include "solver_common.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace devsel {
namespace {

// Mixed-radix decode; position 0 is the most significant digit so that
// enumeration order is lexicographic in the gene vector.
void Decode(uint64_t index, const ScoringKernel& kernel, std::vector<int>& genes) {
  for (size_t i = kernel.positions(); i-- > 0;) {
    genes[i] = static_cast<int>(index % kernel.radix(i));
    index /= kernel.radix(i);
  }
}

void Increment(const ScoringKernel& kernel, std::vector<int>& genes) {
  for (size_t i = kernel.positions(); i-- > 0;) {
    if (++genes[i] < kernel.radix(i)) return;
    genes[i] = 0;
  }
}

struct RangeBest {
  double score = -std::numeric_limits<double>::infinity();
  uint64_t index = 0;
  bool found = false;
};

// Scans [begin, end) in order; keeps the first maximum, so ties resolve to
// the smallest index.
RangeBest ScanRange(const ScoringKernel& kernel, ScoreSpace space, uint64_t begin,
                    uint64_t end) {
  RangeBest best;
  if (begin >= end) return best;
  std::vector<int> genes(kernel.positions());
  Decode(begin, kernel, genes);
  for (uint64_t index = begin; index < end; ++index) {
    const double s = space == ScoreSpace::kRaw ? kernel.Raw(genes) : kernel.Log(genes);
    if (!best.found || s > best.score) {
      best = {s, index, true};
    }
    Increment(kernel, genes);
  }
  return best;
}

uint64_t CheckedSpace(const CandidateSets& candidates, const SolverConfig& config) {
  const double size = candidates.SearchSpaceSize();
  if (size > config.brute_force_cap) throw SearchSpaceError(size, config.brute_force_cap);
  return static_cast<uint64_t>(size);
}

SolverResult Finish(const CandidateSets& candidates, const PreferenceModel& model,
                    const SolverConfig& config, const ScoringKernel& kernel,
                    const RangeBest& best, uint64_t total,
                    const internal::Stopwatch& clock) {
  std::vector<int> genes(kernel.positions());
  Decode(best.index, kernel, genes);
  std::vector<TracePoint> trace{
      {total, internal::ToProbability(config.score_space, best.score)}};
  return internal::MakeResult(SolverKind::kBruteForce, candidates, model, config,
                              std::move(genes), best.score, total,
                              std::move(trace), clock);
}

}  // namespace

SolverResult SolveBruteForce(const CandidateSets& candidates,
                             const PreferenceModel& model,
                             const SolverConfig& config) {
  internal::Stopwatch clock;
  const uint64_t total = CheckedSpace(candidates, config);
  ScoringKernel kernel(model, candidates);
  RangeBest best = ScanRange(kernel, config.score_space, 0, total);
  return Finish(candidates, model, config, kernel, best, total, clock);
}

SolverResult SolveBruteForceParallel(const CandidateSets& candidates,
                                     const PreferenceModel& model,
                                     const SolverConfig& config, int threads) {
  internal::Stopwatch clock;
  const uint64_t total = CheckedSpace(candidates, config);
  ScoringKernel kernel(model, candidates);

  int team = 1;
#ifdef _OPENMP
  team = threads > 0 ? threads : omp_get_max_threads();
#endif
  std::vector<RangeBest> partial(team);
  // Static contiguous blocks: the partition depends only on the team size,
  // and the reduction below is order-independent.
#pragma omp parallel num_threads(team)
  {
    int tid = 0, nthreads = 1;
#ifdef _OPENMP
    tid = omp_get_thread_num();
    nthreads = omp_get_num_threads();
#endif
    const uint64_t chunk = (total + nthreads - 1) / nthreads;
    const uint64_t begin = std::min<uint64_t>(total, chunk * tid);
    const uint64_t end = std::min<uint64_t>(total, begin + chunk);
    partial[tid] = ScanRange(kernel, config.score_space, begin, end);
  }

  RangeBest best;
  for (const RangeBest& p : partial) {
    if (!p.found) continue;
    if (!best.found || p.score > best.score ||
        (p.score == best.score && p.index < best.index)) {
      best = p;
    }
  }
  return Finish(candidates, model, config, kernel, best, total, clock);
}

}  // namespace devsel
