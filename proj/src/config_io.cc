#include "devsel/errors.h"
#include "devsel/solvers.h"
#include "json_util.h"

namespace devsel {

using internal::Fail;
using internal::Json;

std::optional<MutationMode> ParseMutationMode(std::string_view text) {
  if (text == "per_offspring") return MutationMode::kPerOffspring;
  if (text == "per_gene") return MutationMode::kPerGene;
  return std::nullopt;
}

std::optional<ScoreSpace> ParseScoreSpace(std::string_view text) {
  if (text == "raw") return ScoreSpace::kRaw;
  if (text == "log") return ScoreSpace::kLog;
  return std::nullopt;
}

namespace {

template <typename T>
void ReadInt(const Json& obj, const char* key, const std::string& path, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    out = static_cast<T>(internal::GetInteger(*it, path + "." + key));
  }
}

void ReadDouble(const Json& obj, const char* key, const std::string& path, double& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    out = internal::GetNumber(*it, path + "." + key);
  }
}

}  // namespace

SolverConfig LoadSolverConfig(std::string_view document, SolverConfig base) {
  Json doc = internal::ParseDocument(document, "solver config");
  internal::ExpectObject(doc, "$");
  internal::RejectUnknownKeys(doc, {"seed", "brute_force_cap", "score_space", "ga", "sa", "hc"},
                              "$");
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) Fail("seed", "expected a non-negative integer");
    base.rng_seed = it->get<uint64_t>();
  }
  ReadDouble(doc, "brute_force_cap", "$", base.brute_force_cap);
  if (auto it = doc.find("score_space"); it != doc.end()) {
    auto space = ParseScoreSpace(internal::GetString(*it, "score_space"));
    if (!space) Fail("score_space", "expected \"raw\" or \"log\"");
    base.score_space = *space;
  }
  if (auto it = doc.find("ga"); it != doc.end()) {
    const Json& ga = *it;
    internal::ExpectObject(ga, "ga");
    internal::RejectUnknownKeys(
        ga,
        {"generations", "population_size", "population_per_function", "crossover_rate",
         "mutation_rate", "elitism_rate", "tournament_size", "mutation",
         "early_stop_generations"},
        "ga");
    ReadInt(ga, "generations", "ga", base.ga.generations);
    ReadInt(ga, "population_size", "ga", base.ga.population_size);
    ReadInt(ga, "population_per_function", "ga", base.ga.population_per_function);
    ReadDouble(ga, "crossover_rate", "ga", base.ga.crossover_rate);
    ReadDouble(ga, "mutation_rate", "ga", base.ga.mutation_rate);
    ReadDouble(ga, "elitism_rate", "ga", base.ga.elitism_rate);
    ReadInt(ga, "tournament_size", "ga", base.ga.tournament_size);
    ReadInt(ga, "early_stop_generations", "ga", base.ga.early_stop_generations);
    if (auto m = ga.find("mutation"); m != ga.end()) {
      auto mode = ParseMutationMode(internal::GetString(*m, "ga.mutation"));
      if (!mode) Fail("ga.mutation", "expected \"per_offspring\" or \"per_gene\"");
      base.ga.mutation = *mode;
    }
  }
  if (auto it = doc.find("sa"); it != doc.end()) {
    internal::ExpectObject(*it, "sa");
    internal::RejectUnknownKeys(*it, {"steps", "max_temperature", "min_temperature"}, "sa");
    ReadInt(*it, "steps", "sa", base.sa.steps);
    ReadDouble(*it, "max_temperature", "sa", base.sa.max_temperature);
    ReadDouble(*it, "min_temperature", "sa", base.sa.min_temperature);
  }
  if (auto it = doc.find("hc"); it != doc.end()) {
    internal::ExpectObject(*it, "hc");
    internal::RejectUnknownKeys(*it, {"max_restarts"}, "hc");
    ReadInt(*it, "max_restarts", "hc", base.hc.max_restarts);
  }
  return base;
}

}  // namespace devsel
