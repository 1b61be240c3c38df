#ifndef DEVSEL_SOLVERS_H_
#define DEVSEL_SOLVERS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devsel/device_model.h"
#include "devsel/preference.h"
#include "devsel/workflow.h"

namespace devsel {

// Capable devices per workflow function, aligned with the workflow's
// function order. Every list is non-empty.
struct CandidateSets {
  std::vector<FunctionName> functions;
  std::vector<std::vector<DeviceId>> per_function;

  // Product of the list lengths, as a double so large spaces do not overflow.
  double SearchSpaceSize() const;
  Assignment Decode(std::span<const int> genes) const;
  std::map<FunctionName, std::vector<DeviceId>> AsMap() const;

  friend bool operator==(const CandidateSets&, const CandidateSets&) = default;
};

// Throws InfeasibleError listing every function with no capable device.
CandidateSets FilterCandidates(const Network& network, const Workflow& workflow);

enum class SolverKind {
  kBruteForce,
  kHillClimbing,
  kSimulatedAnnealing,
  kGeneticAlgorithm,
};

std::string_view ToString(SolverKind kind);
// Accepts the display name ("GeneticAlgorithm") or a short alias ("ga").
std::optional<SolverKind> ParseSolverKind(std::string_view text);
inline constexpr SolverKind kAllSolvers[] = {
    SolverKind::kBruteForce, SolverKind::kHillClimbing,
    SolverKind::kSimulatedAnnealing, SolverKind::kGeneticAlgorithm};

enum class ScoreSpace { kRaw, kLog };

enum class MutationMode {
  // With probability mutation_rate an offspring has one uniformly chosen gene
  // resampled.
  kPerOffspring,
  // Every gene is resampled independently with probability
  // mutation_rate / |F|.
  kPerGene,
};

struct GaConfig {
  int generations = 1000;
  // 0 selects population_per_function * |F|.
  int population_size = 0;
  int population_per_function = 200;
  double crossover_rate = 0.7;
  double mutation_rate = 0.2;
  double elitism_rate = 0.1;
  int tournament_size = 3;
  MutationMode mutation = MutationMode::kPerOffspring;
  // Stop after this many generations without improvement; 0 disables.
  int early_stop_generations = 0;
  // Gene vectors placed at the front of the initial population.
  std::vector<std::vector<int>> seed_population;
  // Called after each generation with the best score in that population.
  std::function<void(int generation, double population_best)> on_generation;

  int PopulationFor(size_t function_count) const {
    return population_size > 0
               ? population_size
               : population_per_function * static_cast<int>(function_count);
  }
};

struct SaConfig {
  int64_t steps = 200000;
  double max_temperature = 0.2;
  double min_temperature = 0.0001;
};

struct HcConfig {
  // Number of independent random starts; the best local optimum wins.
  int max_restarts = 1;
};

struct SolverConfig {
  GaConfig ga;
  SaConfig sa;
  HcConfig hc;
  uint64_t rng_seed = 0;
  double brute_force_cap = 1e8;
  ScoreSpace score_space = ScoreSpace::kRaw;

  // Throws InputError naming the first out-of-range field.
  void Validate(size_t function_count = 1) const;
};

// Reads a solver configuration document. Keys mirror the struct fields:
// {"seed", "brute_force_cap", "score_space": "raw"|"log",
//  "ga": {"generations", "population_size", "population_per_function",
//         "crossover_rate", "mutation_rate", "elitism_rate", "tournament_size",
//         "mutation": "per_offspring"|"per_gene", "early_stop_generations"},
//  "sa": {"steps", "max_temperature", "min_temperature"},
//  "hc": {"max_restarts"}}
// Absent keys keep the value from `base`.
SolverConfig LoadSolverConfig(std::string_view document, SolverConfig base = {});
std::optional<MutationMode> ParseMutationMode(std::string_view text);
std::optional<ScoreSpace> ParseScoreSpace(std::string_view text);

// Best-so-far score after `evaluations` score calls.
struct TracePoint {
  uint64_t evaluations = 0;
  double best = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct SolverResult {
  Assignment assignment;
  std::vector<int> genes;
  double score = 0.0;
  uint64_t evaluations = 0;
  double wall_time_s = 0.0;
  SolverKind solver = SolverKind::kBruteForce;
  uint64_t seed = 0;
  std::vector<TracePoint> trace;

  // Equality on everything except wall time.
  bool SameOutcome(const SolverResult& other) const;
};

// Exhaustive search. Ties go to the lexicographically smallest gene vector.
// Throws SearchSpaceError above config.brute_force_cap.
SolverResult SolveBruteForce(const CandidateSets& candidates,
                             const PreferenceModel& model,
                             const SolverConfig& config = {});

// Same result as SolveBruteForce, with the enumeration split across OpenMP
// threads. `threads` <= 0 uses the OpenMP default.
SolverResult SolveBruteForceParallel(const CandidateSets& candidates,
                                     const PreferenceModel& model,
                                     const SolverConfig& config = {},
                                     int threads = 0);

// Steepest-ascent over single-position changes from a seeded random start.
SolverResult SolveHillClimbing(const CandidateSets& candidates,
                               const PreferenceModel& model,
                               const SolverConfig& config = {});

// Single-position proposals, Metropolis acceptance exp(delta / T) and
// exponential cooling from max to min temperature. Returns the best state
// ever visited; evaluations = steps + 1.
SolverResult SolveSimulatedAnnealing(const CandidateSets& candidates,
                                     const PreferenceModel& model,
                                     const SolverConfig& config = {});

// Generational GA with elitism, tournament selection, single-point crossover.
SolverResult SolveGenetic(const CandidateSets& candidates,
                          const PreferenceModel& model,
                          const SolverConfig& config = {});

SolverResult Solve(SolverKind kind, const CandidateSets& candidates,
                   const PreferenceModel& model, const SolverConfig& config = {});

// Filter candidates, check the model covers the workflow, dispatch.
SolverResult RunSelection(const Network& network, const Workflow& workflow,
                          const PreferenceModel& model, SolverKind kind,
                          const SolverConfig& config = {});

}  // namespace devsel

#endif  // DEVSEL_SOLVERS_H_
