#include "devsel/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "devsel/errors.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace devsel {

double BenchSpec::PlantedP(int function_count) const {
  auto it = planted_p.find(function_count);
  if (it == planted_p.end()) {
    throw InputError("no planted probability for |F| = " + std::to_string(function_count));
  }
  return it->second;
}

void BenchSpec::Validate() const {
  if (runs < 1) throw InputError("runs must be >= 1");
  if (alternatives_per_function < 2) throw InputError("alternatives must be >= 2");
  if (min_capabilities < 1 || max_capabilities < min_capabilities) {
    throw InputError("capability range must satisfy 1 <= min <= max");
  }
  if (function_counts.empty()) throw InputError("no function counts given");
  if (solvers.empty()) throw InputError("no solvers selected");
  for (int f : function_counts) {
    if (f < 1) throw InputError("function counts must be >= 1");
    const double p = PlantedP(f);
    if (!(p > 0.0 && p < 1.0)) throw InputError("planted probabilities must lie in (0, 1)");
    const double q = std::pow(p, 1.0 / f);
    const double other = (1.0 - q) / (alternatives_per_function - 1);
    const double bound = plant.off_path == OffPathRows::kUniform ? q : p;
    if (!(other < bound)) {
      throw DominanceError("planted p = " + std::to_string(p) + " at |F| = " +
                           std::to_string(f) + " does not dominate " +
                           std::to_string(alternatives_per_function) + " alternatives");
    }
    solver_config.Validate(static_cast<size_t>(f));
  }
}

std::vector<BenchRecord> RunBenchmark(const BenchSpec& spec) {
  spec.Validate();
  const int nf = static_cast<int>(spec.function_counts.size());
  const int ns = static_cast<int>(spec.solvers.size());
  const int cells = nf * spec.runs;
  std::vector<BenchRecord> records(static_cast<size_t>(cells) * ns);

  int team = 1;
#ifdef _OPENMP
  if (!spec.serial) team = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#endif

  // One cell = one synthesized instance solved by every selected solver.
  // Each cell owns its RNGs and writes disjoint slots, so the results do not
  // depend on scheduling.
  std::vector<std::string> errors(cells);
#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (int cell = 0; cell < cells; ++cell) {
    const int fi = cell / spec.runs;
    const int run = cell % spec.runs;
    const int f = spec.function_counts[fi];
    try {
      const uint64_t seed = RunSeed(spec.base_seed, f, run);
      SynthesizedInstance inst = SynthesizeInstance(spec, f, seed);
      const CandidateSets candidates = FilterCandidates(inst.network, inst.workflow);
      const double optimal = Score(inst.model, inst.planted);
      for (int si = 0; si < ns; ++si) {
        BenchRecord& rec = records[(static_cast<size_t>(fi) * ns + si) * spec.runs + run];
        rec.f_count = f;
        rec.solver = spec.solvers[si];
        rec.run = run;
        rec.seed = seed;
        rec.optimal_score = optimal;
        SolverConfig config = spec.solver_config;
        config.rng_seed = SolverSeed(seed, rec.solver);
        try {
          SolverResult result = Solve(rec.solver, candidates, inst.model, config);
          rec.best_score = result.score;
          rec.evaluations = result.evaluations;
          rec.wall_time_s = result.wall_time_s;
          rec.assignment = std::move(result.assignment);
          rec.hit = std::abs(rec.best_score - optimal) <= kHitTolerance;
        } catch (const SearchSpaceError&) {
          rec.skipped = true;
        }
      }
    } catch (const std::exception& e) {
      errors[cell] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("benchmark cell failed: " + e);
  }
  return records;
}

std::string FormatCsvRow(const BenchRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%s,%d,%llu,%.17g,%.17g,%d,%llu,%.9f", r.f_count,
                std::string(ToString(r.solver)).c_str(), r.run,
                static_cast<unsigned long long>(r.seed), r.best_score, r.optimal_score,
                r.hit ? 1 : 0, static_cast<unsigned long long>(r.evaluations),
                r.wall_time_s);
  return buf;
}

void WriteCsv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    if (!r.skipped) out << FormatCsvRow(r) << "\n";
  }
}

namespace {

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  // Nearest-rank.
  size_t rank = static_cast<size_t>(std::ceil(q * values.size()));
  rank = std::clamp<size_t>(rank, 1, values.size());
  return values[rank - 1];
}

}  // namespace

std::vector<BenchSummaryRow> Summarize(const std::vector<BenchRecord>& records) {
  std::vector<BenchSummaryRow> rows;
  std::vector<std::vector<double>> walls;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const BenchSummaryRow& row) {
      return row.f_count == r.f_count && row.solver == r.solver;
    });
    if (it == rows.end()) {
      rows.push_back({r.f_count, r.solver});
      walls.emplace_back();
      it = rows.end() - 1;
    }
    auto& wall = walls[it - rows.begin()];
    if (r.skipped) {
      ++it->skipped;
      continue;
    }
    ++it->runs;
    it->hits += r.hit ? 1 : 0;
    it->mean_score += r.best_score;
    it->mean_evaluations += static_cast<double>(r.evaluations);
    it->mean_wall_s += r.wall_time_s;
    wall.push_back(r.wall_time_s);
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].runs == 0) continue;
    rows[i].mean_score /= rows[i].runs;
    rows[i].mean_evaluations /= rows[i].runs;
    rows[i].mean_wall_s /= rows[i].runs;
    rows[i].p50_wall_s = Percentile(walls[i], 0.50);
    rows[i].p95_wall_s = Percentile(walls[i], 0.95);
  }
  return rows;
}

std::string FormatSummaryTable(const std::vector<BenchSummaryRow>& rows) {
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof(line), "%3s  %-18s %5s %9s %10s %12s %11s %11s %11s\n", "|F|",
                "solver", "runs", "hit_rate", "mean_score", "mean_evals", "mean_wall_s",
                "p50_wall_s", "p95_wall_s");
  out << line;
  for (const auto& r : rows) {
    if (r.runs == 0) {
      std::snprintf(line, sizeof(line), "%3d  %-18s %5s  skipped: search space exceeds cap\n",
                    r.f_count, std::string(ToString(r.solver)).c_str(), "-");
      out << line;
      continue;
    }
    char hit[32];
    std::snprintf(hit, sizeof(hit), "%d/%d", r.hits, r.runs);
    std::snprintf(line, sizeof(line), "%3d  %-18s %5d %9s %10.6f %12.0f %11.6f %11.6f %11.6f\n",
                  r.f_count, std::string(ToString(r.solver)).c_str(), r.runs, hit,
                  r.mean_score, r.mean_evaluations, r.mean_wall_s, r.p50_wall_s,
                  r.p95_wall_s);
    out << line;
  }
  return out.str();
}

}  // namespace devsel
