#ifndef DEVSEL_BENCH_H_
#define DEVSEL_BENCH_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "devsel/device_model.h"
#include "devsel/preference.h"
#include "devsel/solvers.h"
#include "devsel/workflow.h"

namespace devsel {

// Experiment settings. Defaults are the reference experiment: |F| from 4 to
// 7, seven alternatives per function, the planted optimum per |F|, 30 runs.
struct BenchSpec {
  std::vector<int> function_counts = {4, 5, 6, 7};
  int alternatives_per_function = 7;
  std::map<int, double> planted_p = {{4, 0.34}, {5, 0.42}, {6, 0.30}, {7, 0.24}};
  int runs = 30;
  int min_capabilities = 2;
  int max_capabilities = 7;
  std::vector<SolverKind> solvers = {std::begin(kAllSolvers), std::end(kAllSolvers)};
  uint64_t base_seed = 0;
  SolverConfig solver_config;
  PlantOptions plant;
  // Preference structure: chain in function order unless set.
  bool random_structure = false;
  // Cells run on an OpenMP team unless serial; threads <= 0 uses the default.
  bool serial = false;
  int threads = 0;

  // Throws InputError/DominanceError when the spec cannot be synthesized.
  void Validate() const;
  double PlantedP(int function_count) const;
};

struct SynthesizedInstance {
  Network network;
  Workflow workflow;
  PreferenceModel model;
  Assignment planted;
  double planted_p = 0.0;
  // Capable devices per function as recorded while packing capabilities.
  std::map<FunctionName, std::vector<DeviceId>> candidate_bookkeeping;
};

SynthesizedInstance SynthesizeInstance(const BenchSpec& spec, int function_count,
                                       uint64_t run_seed);

// Seed of run `run` at |F| = function_count; the instance depends only on it.
uint64_t RunSeed(uint64_t base_seed, int function_count, int run);
// Solver RNG seed within a run.
uint64_t SolverSeed(uint64_t run_seed, SolverKind solver);

struct BenchRecord {
  int f_count = 0;
  SolverKind solver = SolverKind::kBruteForce;
  int run = 0;
  uint64_t seed = 0;
  double best_score = 0.0;
  double optimal_score = 0.0;
  bool hit = false;
  uint64_t evaluations = 0;
  double wall_time_s = 0.0;
  Assignment assignment;
  // Brute force over the configured cap; no score was produced.
  bool skipped = false;
};

inline constexpr double kHitTolerance = 1e-9;

// Runs every |F| x solver x run cell. Records are ordered by |F|, then solver
// (in spec order), then run.
std::vector<BenchRecord> RunBenchmark(const BenchSpec& spec);

inline constexpr const char* kCsvHeader =
    "f_count,solver,run,seed,best_score,optimal_score,hit,evaluations,wall_time_s";

// Skipped cells produce no row.
void WriteCsv(const std::vector<BenchRecord>& records, std::ostream& out);
std::string FormatCsvRow(const BenchRecord& record);

struct BenchSummaryRow {
  int f_count = 0;
  SolverKind solver = SolverKind::kBruteForce;
  int runs = 0;
  int skipped = 0;
  int hits = 0;
  double mean_score = 0.0;
  double mean_evaluations = 0.0;
  double mean_wall_s = 0.0;
  double p50_wall_s = 0.0;
  double p95_wall_s = 0.0;
};

std::vector<BenchSummaryRow> Summarize(const std::vector<BenchRecord>& records);
std::string FormatSummaryTable(const std::vector<BenchSummaryRow>& rows);

}  // namespace devsel

#endif  // DEVSEL_BENCH_H_
