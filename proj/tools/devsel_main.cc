// devsel: pick IoT devices for an activity workflow and emit its ACL policy.
//
// Exit codes: 0 success, 2 invalid input, 3 infeasible workflow,
// 4 brute-force search space over the cap, 5 unsatisfiable trigger,
// 6 policy verification failed.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "devsel/bench.h"
#include "devsel/device_model.h"
#include "devsel/errors.h"
#include "devsel/policy.h"
#include "devsel/preference.h"
#include "devsel/solvers.h"
#include "devsel/workflow.h"

namespace fs = std::filesystem;
using namespace devsel;

namespace {

enum ExitCode {
  kOk = 0,
  kInvalidInput = 2,
  kInfeasible = 3,
  kCapExceeded = 4,
  kUnsatisfiableTrigger = 5,
  kVerificationFailed = 6,
};

// Flags shared by every subcommand that runs a solver. Values stay unset
// unless given, so a --config file can supply them instead.
struct SolverFlags {
  std::string solver = "ga";
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> ga_generations, ga_population, ga_population_per_function,
      ga_tournament_size, ga_early_stop, hc_restarts;
  std::optional<double> ga_crossover, ga_mutation, ga_elitism, sa_max_t, sa_min_t, bf_cap;
  std::optional<int64_t> sa_steps;
  std::string ga_mutation_mode, score_space;

  void Register(CLI::App* app, bool with_solver) {
    if (with_solver) {
      app->add_option("--solver", solver, "bf | hc | sa | ga")->capture_default_str();
    }
    app->add_option("--config", config_path, "solver configuration JSON file");
    app->add_option("--seed", seed, "RNG seed");
    app->add_option("--ga-generations", ga_generations);
    app->add_option("--ga-population", ga_population, "0 = population-per-function x |F|");
    app->add_option("--ga-population-per-function", ga_population_per_function);
    app->add_option("--ga-crossover-rate", ga_crossover);
    app->add_option("--ga-mutation-rate", ga_mutation);
    app->add_option("--ga-elitism-rate", ga_elitism);
    app->add_option("--ga-tournament-size", ga_tournament_size);
    app->add_option("--ga-mutation-mode", ga_mutation_mode, "per_offspring | per_gene");
    app->add_option("--ga-early-stop", ga_early_stop,
                    "stop after N generations without improvement (0 = off)");
    app->add_option("--sa-steps", sa_steps);
    app->add_option("--sa-max-temperature", sa_max_t);
    app->add_option("--sa-min-temperature", sa_min_t);
    app->add_option("--hc-restarts", hc_restarts);
    app->add_option("--bf-cap", bf_cap, "maximum brute-force search space");
    app->add_option("--score-space", score_space, "raw | log");
  }

  SolverConfig Build() const {
    SolverConfig c;
    if (!config_path.empty()) c = LoadSolverConfig(ReadText(config_path));
    if (seed) c.rng_seed = *seed;
    if (ga_generations) c.ga.generations = *ga_generations;
    if (ga_population) c.ga.population_size = *ga_population;
    if (ga_population_per_function) c.ga.population_per_function = *ga_population_per_function;
    if (ga_crossover) c.ga.crossover_rate = *ga_crossover;
    if (ga_mutation) c.ga.mutation_rate = *ga_mutation;
    if (ga_elitism) c.ga.elitism_rate = *ga_elitism;
    if (ga_tournament_size) c.ga.tournament_size = *ga_tournament_size;
    if (ga_early_stop) c.ga.early_stop_generations = *ga_early_stop;
    if (!ga_mutation_mode.empty()) {
      auto m = ParseMutationMode(ga_mutation_mode);
      if (!m) throw InputError("--ga-mutation-mode must be per_offspring or per_gene");
      c.ga.mutation = *m;
    }
    if (sa_steps) c.sa.steps = *sa_steps;
    if (sa_max_t) c.sa.max_temperature = *sa_max_t;
    if (sa_min_t) c.sa.min_temperature = *sa_min_t;
    if (hc_restarts) c.hc.max_restarts = *hc_restarts;
    if (bf_cap) c.brute_force_cap = *bf_cap;
    if (!score_space.empty()) {
      auto s = ParseScoreSpace(score_space);
      if (!s) throw InputError("--score-space must be raw or log");
      c.score_space = *s;
    }
    return c;
  }

  SolverKind Kind() const {
    auto k = ParseSolverKind(solver);
    if (!k) throw InputError("unknown solver \"" + solver + "\"");
    return *k;
  }

  static std::string ReadText(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

// Synthesis settings shared by `bench` and `synth`.
struct SpecFlags {
  int alternatives = 7;
  std::string planted_p;
  int min_caps = 2, max_caps = 7;
  bool random_structure = false;
  std::string off_path = "random";
  double alpha = PlantOptions{}.dirichlet_alpha;

  void Register(CLI::App* app) {
    app->add_option("--alternatives", alternatives, "candidate devices per function")
        ->capture_default_str();
    app->add_option("--planted-p", planted_p, "planted optimum per |F|, e.g. 4:0.34,5:0.42");
    app->add_option("--min-capabilities", min_caps)->capture_default_str();
    app->add_option("--max-capabilities", max_caps)->capture_default_str();
    app->add_flag("--random-structure", random_structure,
                  "random preference DAG instead of a chain");
    app->add_option("--off-path", off_path, "random | uniform")->capture_default_str();
    app->add_option("--dirichlet-alpha", alpha)->capture_default_str();
  }

  void Apply(BenchSpec& spec) const {
    spec.alternatives_per_function = alternatives;
    spec.min_capabilities = min_caps;
    spec.max_capabilities = max_caps;
    spec.random_structure = random_structure;
    if (off_path == "random") {
      spec.plant.off_path = OffPathRows::kRandom;
    } else if (off_path == "uniform") {
      spec.plant.off_path = OffPathRows::kUniform;
    } else {
      throw InputError("--off-path must be random or uniform");
    }
    spec.plant.dirichlet_alpha = alpha;
    if (!planted_p.empty()) {
      std::stringstream ss(planted_p);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("--planted-p expects F:p pairs");
        try {
          spec.planted_p[std::stoi(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
        } catch (const std::logic_error&) {
          throw InputError("--planted-p expects F:p pairs");
        }
      }
    }
  }
};

std::string FormatScore(double score) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", score);
  return buf;
}

std::string IsoUtc(std::time_t t) {
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Explicit flag, then SOURCE_DATE_EPOCH, then the newest input modification
// time, so re-running on unchanged inputs reproduces the file exactly.
std::string PolicyTimestamp(const std::string& flag, const std::vector<std::string>& inputs) {
  if (!flag.empty()) return flag;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    return IsoUtc(static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10)));
  }
  std::time_t newest = 0;
  for (const auto& path : inputs) {
    if (path.empty()) continue;
    auto ft = fs::last_write_time(path);
    auto sys = std::chrono::time_point_cast<std::chrono::seconds>(
        ft - fs::file_time_type::clock::now() + std::chrono::system_clock::now());
    newest = std::max(newest, std::chrono::system_clock::to_time_t(sys));
  }
  return IsoUtc(newest);
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string DescribeAssignment(const Workflow& workflow, const Assignment& a) {
  std::string out;
  for (const auto& f : workflow.functions()) {
    if (!out.empty()) out += "; ";
    out += f + ": " + a.bindings.at(f);
  }
  return out;
}

int RunSelect(const std::string& registry, const std::string& workflow_path,
              const std::string& model_path, const SolverFlags& flags,
              const std::string& out_path, bool verbose) {
  Network network = LoadNetworkFile(registry);
  Workflow workflow = LoadWorkflowFile(workflow_path);
  PreferenceModel model = LoadModelFile(model_path);
  SolverResult result =
      RunSelection(network, workflow, model, flags.Kind(), flags.Build());
  std::cout << DescribeAssignment(workflow, result.assignment) << "; score "
            << FormatScore(result.score) << "\n";
  if (verbose) {
    std::cerr << "solver " << ToString(result.solver) << ", evaluations "
              << result.evaluations << ", wall time " << result.wall_time_s << " s\n";
  }
  if (!out_path.empty()) {
    WriteFile(out_path, SerializeAssignment(result.assignment, workflow.functions()));
  }
  return kOk;
}

int RunPolicy(const std::string& registry, const std::string& workflow_path,
              const std::string& model_path, const std::string& assignment_path,
              const SolverFlags& flags, const std::string& out_path,
              const std::string& timestamp, bool table) {
  if (model_path.empty() == assignment_path.empty()) {
    throw InputError("give exactly one of --model or --assignment");
  }
  Network network = LoadNetworkFile(registry);
  Workflow workflow = LoadWorkflowFile(workflow_path);
  Assignment assignment;
  if (!assignment_path.empty()) {
    assignment = LoadAssignmentFile(assignment_path);
  } else {
    PreferenceModel model = LoadModelFile(model_path);
    assignment = RunSelection(network, workflow, model, flags.Kind(), flags.Build()).assignment;
  }
  AclPolicy policy = GeneratePolicy(workflow, assignment, network);
  PolicyHeader header{workflow.id(),
                      PolicyTimestamp(timestamp, {registry, workflow_path, model_path,
                                                  assignment_path}),
                      assignment, workflow.functions()};
  WriteFile(out_path, SerializePolicy(policy, header));

  VerificationReport report = VerifyLeastPrivilege(policy, workflow, assignment, network);
  size_t outbound = policy.rules.size() - report.intra_network_rules;
  std::cout << "rules: " << policy.rules.size() << " allow (" << report.intra_network_rules
            << " intra-network, " << outbound << " outbound) + default deny\n";
  if (table) std::cout << FormatPolicyTable(policy);
  std::cout << "verification: " << report.Summary() << "\n";
  for (const auto& v : report.violations) std::cout << "  " << v << "\n";
  return report.Passed() ? kOk : kVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IoT device selection and least-privilege ACL generation"};
  app.require_subcommand(1);

  // select
  auto* select = app.add_subcommand("select", "choose one device per workflow function");
  std::string registry, workflow_path, model_path, out_path, assignment_path, timestamp;
  bool verbose = false, table = false;
  SolverFlags solver_flags;
  select->add_option("--registry", registry, "device registry JSON")->required();
  select->add_option("--workflow", workflow_path, "workflow JSON")->required();
  select->add_option("--model", model_path, "preference model JSON")->required();
  select->add_option("--out", out_path, "write the assignment as JSON");
  select->add_flag("-v,--verbose", verbose, "print solver statistics to stderr");
  solver_flags.Register(select, true);

  // policy
  auto* policy = app.add_subcommand("policy", "compile the ACL policy for a workflow");
  policy->add_option("--registry", registry)->required();
  policy->add_option("--workflow", workflow_path)->required();
  policy->add_option("--model", model_path, "solve the assignment with this model");
  policy->add_option("--assignment", assignment_path, "use a given assignment JSON");
  policy->add_option("--out", out_path, "policy JSON output")->required();
  policy->add_option("--timestamp", timestamp, "generated_at value for the header");
  policy->add_flag("--table", table, "also print a human-readable rule table");
  solver_flags.Register(policy, true);

  // bench
  auto* bench = app.add_subcommand("bench", "compare solvers on synthesized instances");
  BenchSpec spec;
  SpecFlags spec_flags;
  std::vector<int> f_counts;
  std::string solvers_text = "bf,hc,sa,ga", format = "table";
  bench->add_option("--f-counts", f_counts, "workflow sizes")->delimiter(',');
  bench->add_option("--runs", spec.runs)->capture_default_str();
  bench->add_option("--solvers", solvers_text)->capture_default_str();
  bench->add_option("--out", out_path, "write the per-run CSV here");
  bench->add_option("--format", format, "stdout format: csv | table")->capture_default_str();
  bench->add_flag("--serial", spec.serial, "run cells one at a time (cleaner timings)");
  bench->add_option("--threads", spec.threads, "OpenMP threads for cells (0 = default)");
  spec_flags.Register(bench);
  SolverFlags bench_solver_flags;
  bench_solver_flags.Register(bench, false);

  // synth
  auto* synth = app.add_subcommand("synth", "write one synthesized instance to disk");
  int f_count = 4;
  uint64_t synth_seed = 0;
  std::string out_dir = ".";
  synth->add_option("--f-count", f_count)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out-dir", out_dir)->capture_default_str();
  SpecFlags synth_flags;
  synth_flags.Register(synth);

  // validate
  auto* validate = app.add_subcommand("validate", "check documents and their consistency");
  std::string policy_path;
  validate->add_option("--registry", registry);
  validate->add_option("--workflow", workflow_path);
  validate->add_option("--model", model_path);
  validate->add_option("--assignment", assignment_path);
  validate->add_option("--policy", policy_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (*select) {
      return RunSelect(registry, workflow_path, model_path, solver_flags, out_path, verbose);
    }
    if (*policy) {
      return RunPolicy(registry, workflow_path, model_path, assignment_path, solver_flags,
                       out_path, timestamp, table);
    }
    if (*bench) {
      if (!f_counts.empty()) spec.function_counts = f_counts;
      spec_flags.Apply(spec);
      spec.solver_config = bench_solver_flags.Build();
      spec.base_seed = bench_solver_flags.seed.value_or(0);
      spec.solvers.clear();
      std::stringstream ss(solvers_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto k = ParseSolverKind(item);
        if (!k) throw InputError("unknown solver \"" + item + "\"");
        spec.solvers.push_back(*k);
      }
      if (format != "csv" && format != "table") {
        throw InputError("--format must be csv or table");
      }
      auto records = RunBenchmark(spec);
      if (!out_path.empty()) {
        std::ostringstream csv;
        WriteCsv(records, csv);
        WriteFile(out_path, csv.str());
      }
      if (format == "csv") {
        WriteCsv(records, std::cout);
      } else {
        std::cout << FormatSummaryTable(Summarize(records));
      }
      return kOk;
    }
    if (*synth) {
      BenchSpec s;
      synth_flags.Apply(s);
      s.function_counts = {f_count};
      if (!s.planted_p.count(f_count)) {
        throw InputError("no planted probability for |F| = " + std::to_string(f_count) +
                         "; pass --planted-p " + std::to_string(f_count) + ":<p>");
      }
      s.Validate();
      SynthesizedInstance inst = SynthesizeInstance(s, f_count, synth_seed);
      const fs::path dir(out_dir);
      WriteFile(dir / "registry.json", SerializeNetwork(inst.network));
      WriteFile(dir / "workflow.json", SerializeWorkflow(inst.workflow));
      WriteFile(dir / "model.json", SerializeModel(inst.model));
      WriteFile(dir / "planted.json",
                SerializeAssignment(inst.planted, inst.workflow.functions()));
      std::cout << "wrote " << inst.network.size() << " devices, " << f_count
                << " functions, planted score " << FormatScore(Score(inst.model, inst.planted))
                << " to " << dir.string() << "\n";
      return kOk;
    }
    if (*validate) {
      std::optional<Network> network;
      std::optional<Workflow> workflow;
      std::optional<PreferenceModel> model;
      std::optional<Assignment> assignment;
      if (!registry.empty()) {
        network = LoadNetworkFile(registry);
        std::cout << "registry: OK (" << network->size() << " devices)\n";
      }
      if (!workflow_path.empty()) {
        workflow = LoadWorkflowFile(workflow_path);
        std::cout << "workflow: OK (" << workflow->functions().size() << " functions, "
                  << workflow->edges().size() << " edges)\n";
      }
      if (!model_path.empty()) {
        model = LoadModelFile(model_path);
        std::cout << "model: OK (" << model->nodes().size() << " nodes)\n";
      }
      if (!assignment_path.empty()) assignment = LoadAssignmentFile(assignment_path);
      if (network && workflow) {
        auto report = CheckFeasible(*workflow, *network);
        if (!report.feasible) throw InfeasibleError(report.uncovered);
        std::cout << "feasibility: FEASIBLE\n";
      }
      if (model && workflow) {
        for (const auto& f : workflow->functions()) {
          if (!model->Find(f)) throw InputError("model has no node for \"" + f + "\"");
        }
        if (model->nodes().size() != workflow->functions().size()) {
          throw InputError("model has nodes outside the workflow");
        }
        std::cout << "model covers workflow: OK\n";
      }
      if (assignment && network && workflow) {
        GeneratePolicy(*workflow, *assignment, *network);
        std::cout << "assignment: OK\n";
        if (model) std::cout << "assignment score: " << FormatScore(Score(*model, *assignment)) << "\n";
      }
      if (!policy_path.empty()) {
        PolicyHeader header;
        AclPolicy p = LoadPolicy(SolverFlags::ReadText(policy_path), &header);
        std::cout << "policy: OK (" << p.rules.size() << " allow rules)\n";
        if (network && workflow) {
          const Assignment& a = assignment ? *assignment : header.assignment;
          auto report = VerifyLeastPrivilege(p, *workflow, a, *network);
          std::cout << "verification: " << report.Summary() << "\n";
          for (const auto& v : report.violations) std::cout << "  " << v << "\n";
          if (!report.Passed()) return kVerificationFailed;
        }
      }
      return kOk;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const SearchSpaceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const UnsatisfiableTriggerError& e) {
    std::cerr << "unsatisfiable trigger: " << e.what() << "\n";
    return kUnsatisfiableTrigger;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DominanceError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}
