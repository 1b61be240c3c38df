#include "devsel/solvers.h"

#include <cmath>
#include <stdexcept>

#include "devsel/errors.h"
#include "solver_common.h"

namespace devsel {

double CandidateSets::SearchSpaceSize() const {
  double size = 1.0;
  for (const auto& per : per_function) size *= static_cast<double>(per.size());
  return size;
}

Assignment CandidateSets::Decode(std::span<const int> genes) const {
  Assignment a;
  for (size_t i = 0; i < functions.size(); ++i) {
    a.bindings[functions[i]] = per_function[i][genes[i]];
  }
  return a;
}

std::map<FunctionName, std::vector<DeviceId>> CandidateSets::AsMap() const {
  std::map<FunctionName, std::vector<DeviceId>> out;
  for (size_t i = 0; i < functions.size(); ++i) out[functions[i]] = per_function[i];
  return out;
}

CandidateSets FilterCandidates(const Network& network, const Workflow& workflow) {
  auto report = CheckFeasible(workflow, network);
  if (!report.feasible) throw InfeasibleError(report.uncovered);
  CandidateSets sets;
  for (const auto& f : workflow.functions()) {
    sets.functions.push_back(f);
    auto& list = sets.per_function.emplace_back();
    for (const Device* d : CapableDevices(network, f)) list.push_back(d->id);
  }
  return sets;
}

std::string_view ToString(SolverKind kind) {
  switch (kind) {
    case SolverKind::kBruteForce: return "BruteForce";
    case SolverKind::kHillClimbing: return "HillClimbing";
    case SolverKind::kSimulatedAnnealing: return "SimulatedAnnealing";
    case SolverKind::kGeneticAlgorithm: return "GeneticAlgorithm";
  }
  return "?";
}

std::optional<SolverKind> ParseSolverKind(std::string_view text) {
  for (SolverKind k : kAllSolvers) {
    if (text == ToString(k)) return k;
  }
  if (text == "bf" || text == "brute_force") return SolverKind::kBruteForce;
  if (text == "hc" || text == "hill_climbing") return SolverKind::kHillClimbing;
  if (text == "sa" || text == "simulated_annealing") return SolverKind::kSimulatedAnnealing;
  if (text == "ga" || text == "genetic") return SolverKind::kGeneticAlgorithm;
  return std::nullopt;
}

void SolverConfig::Validate(size_t function_count) const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError(std::string(name) + " must lie in [0, 1]");
    }
  };
  rate(ga.crossover_rate, "ga.crossover_rate");
  rate(ga.mutation_rate, "ga.mutation_rate");
  rate(ga.elitism_rate, "ga.elitism_rate");
  if (ga.generations < 0) throw InputError("ga.generations must be >= 0");
  if (ga.PopulationFor(function_count) < 2) {
    throw InputError("ga population size must be >= 2");
  }
  if (ga.tournament_size < 1) throw InputError("ga.tournament_size must be >= 1");
  if (ga.early_stop_generations < 0) {
    throw InputError("ga.early_stop_generations must be >= 0");
  }
  if (sa.steps < 1) throw InputError("sa.steps must be >= 1");
  // Equal temperatures are allowed: that is the zero-temperature limit.
  if (!(sa.min_temperature > 0.0 && sa.max_temperature >= sa.min_temperature)) {
    throw InputError("sa temperatures need max_temperature >= min_temperature > 0");
  }
  if (hc.max_restarts < 1) throw InputError("hc.max_restarts must be >= 1");
  if (!(brute_force_cap >= 1.0)) throw InputError("brute_force_cap must be >= 1");
}

bool SolverResult::SameOutcome(const SolverResult& other) const {
  return assignment == other.assignment && genes == other.genes &&
         score == other.score && evaluations == other.evaluations &&
         solver == other.solver && seed == other.seed && trace == other.trace;
}

namespace internal {

SolverResult MakeResult(SolverKind kind, const CandidateSets& candidates,
                        const PreferenceModel& model, const SolverConfig& config,
                        std::vector<int> genes, double kernel_score,
                        uint64_t evaluations, std::vector<TracePoint> trace,
                        const Stopwatch& clock) {
  SolverResult result;
  result.wall_time_s = clock.Seconds();
  result.assignment = candidates.Decode(genes);
  result.score = Score(model, result.assignment);
  if (config.score_space == ScoreSpace::kRaw && result.score != kernel_score) {
    throw std::logic_error("scoring kernel disagrees with reference score");
  }
  result.genes = std::move(genes);
  result.evaluations = evaluations;
  result.solver = kind;
  result.seed = config.rng_seed;
  result.trace = std::move(trace);
  return result;
}

}  // namespace internal

SolverResult Solve(SolverKind kind, const CandidateSets& candidates,
                   const PreferenceModel& model, const SolverConfig& config) {
  switch (kind) {
    case SolverKind::kBruteForce: return SolveBruteForce(candidates, model, config);
    case SolverKind::kHillClimbing: return SolveHillClimbing(candidates, model, config);
    case SolverKind::kSimulatedAnnealing:
      return SolveSimulatedAnnealing(candidates, model, config);
    case SolverKind::kGeneticAlgorithm: return SolveGenetic(candidates, model, config);
  }
  throw std::logic_error("unknown solver");
}

SolverResult RunSelection(const Network& network, const Workflow& workflow,
                          const PreferenceModel& model, SolverKind kind,
                          const SolverConfig& config) {
  CandidateSets candidates = FilterCandidates(network, workflow);
  config.Validate(workflow.functions().size());
  for (const auto& f : workflow.functions()) {
    if (!model.Find(f)) {
      throw InputError("preference model has no node for function \"" + f + "\"");
    }
  }
  return Solve(kind, candidates, model, config);
}

}  // namespace devsel
