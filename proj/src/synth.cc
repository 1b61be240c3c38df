#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "devsel/bench.h"
#include "devsel/errors.h"

namespace devsel {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> DeviceSizes(int total_slots, int lo, int hi, std::mt19937_64& rng) {
  std::vector<int> sizes;
  int remaining = total_slots;
  while (remaining > 0) {
    const int top = std::min(hi, remaining);
    if (top < lo) throw InputError("capability range cannot pack the requested slots");
    std::uniform_int_distribution<int> pick(lo, top);
    int s = pick(rng);
    const int rest = remaining - s;
    if (rest > 0 && rest < lo) {
      // Leave either nothing or at least `lo` slots for the next device.
      if (s + rest <= hi) {
        s += rest;
      } else if (s - (lo - rest) >= lo) {
        s -= lo - rest;
      } else {
        throw InputError("capability range cannot pack the requested slots");
      }
    }
    sizes.push_back(s);
    remaining -= s;
  }
  return sizes;
}

// Bipartite realization: every function ends with exactly `k` devices and
// device i with sizes[i] distinct functions. Each device takes the functions
// with the most copies left (random tie order), which always succeeds when
// sizes[i] <= n and the totals match.
std::vector<std::vector<int>> PackCapabilities(int n, int k, const std::vector<int>& sizes,
                                               std::mt19937_64& rng) {
  std::vector<int> left(n, k);
  std::vector<std::vector<int>> caps(sizes.size());
  std::vector<size_t> device_order(sizes.size());
  std::iota(device_order.begin(), device_order.end(), 0);
  std::stable_sort(device_order.begin(), device_order.end(),
                   [&](size_t a, size_t b) { return sizes[a] > sizes[b]; });
  for (size_t d : device_order) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return left[a] > left[b]; });
    for (int j = 0; j < sizes[d]; ++j) {
      if (left[order[j]] == 0) throw std::logic_error("capability packing failed");
      --left[order[j]];
      caps[d].push_back(order[j]);
    }
    std::sort(caps[d].begin(), caps[d].end());
  }
  for (int l : left) {
    if (l != 0) throw std::logic_error("capability packing left unused slots");
  }
  return caps;
}

// Kuhn's augmenting paths over shuffled candidate lists.
bool Augment(int f, const std::vector<std::vector<int>>& cand, std::vector<int>& owner,
             std::vector<bool>& visited, std::vector<int>& match) {
  for (int d : cand[f]) {
    if (visited[d]) continue;
    visited[d] = true;
    if (owner[d] < 0 || Augment(owner[d], cand, owner, visited, match)) {
      owner[d] = f;
      match[f] = d;
      return true;
    }
  }
  return false;
}

}  // namespace

uint64_t RunSeed(uint64_t base_seed, int function_count, int run) {
  return SplitMix64(base_seed ^ SplitMix64((static_cast<uint64_t>(function_count) << 32) ^
                                           static_cast<uint64_t>(run)));
}

uint64_t SolverSeed(uint64_t run_seed, SolverKind solver) {
  return SplitMix64(run_seed + 0x632be59bd9b4e019ULL * (static_cast<uint64_t>(solver) + 1));
}

SynthesizedInstance SynthesizeInstance(const BenchSpec& spec, int function_count,
                                       uint64_t run_seed) {
  if (function_count < 1) throw InputError("function count must be >= 1");
  const int n = function_count;
  const int k = spec.alternatives_per_function;
  const double p = spec.PlantedP(n);
  std::mt19937_64 rng(run_seed);

  std::vector<FunctionName> functions;
  std::vector<WorkflowEdge> chain;
  for (int i = 0; i < n; ++i) {
    functions.push_back("f" + std::to_string(i + 1));
    if (i > 0) chain.push_back({functions[i - 1], functions[i]});
  }

  const int lo = std::min(spec.min_capabilities, n);
  const int hi = std::min(spec.max_capabilities, n);
  std::vector<int> sizes = DeviceSizes(n * k, lo, hi, rng);
  std::vector<std::vector<int>> caps = PackCapabilities(n, k, sizes, rng);
  std::shuffle(caps.begin(), caps.end(), rng);

  static constexpr std::pair<int, TransportProtocol> kTriggers[] = {
      {443, TransportProtocol::kTcp},
      {8080, TransportProtocol::kTcp},
      {1883, TransportProtocol::kTcp},
      {5683, TransportProtocol::kUdp}};
  static constexpr const char* kBrands[] = {"Brand_A", "Brand_B", "Brand_C",
                                            "Brand_D", "Brand_E"};
  std::uniform_int_distribution<int> pick_trigger(0, 3);
  std::uniform_int_distribution<int> pick_brand(0, 4);
  std::uniform_int_distribution<int> octet(0, 255);
  std::bernoulli_distribution needs_cloud(0.5);

  std::vector<Device> devices(caps.size());
  for (size_t i = 0; i < caps.size(); ++i) {
    Device& d = devices[i];
    char id[32];
    std::snprintf(id, sizeof(id), "dev_%03zu", i + 1);
    d.id = id;
    d.address = Ipv4Address((10u << 24) | static_cast<uint32_t>(i + 2));
    d.attributes["brand"] = kBrands[pick_brand(rng)];
    const Ipv4Address cloud((52u << 24) | (static_cast<uint32_t>(octet(rng)) << 16) |
                            (static_cast<uint32_t>(octet(rng)) << 8) |
                            static_cast<uint32_t>(1 + octet(rng) % 254));
    for (int f : caps[i]) {
      d.capabilities.insert(functions[f]);
      auto& reqs = d.net_requirements[functions[f]];
      const auto& [port, proto] = kTriggers[pick_trigger(rng)];
      reqs.push_back({Direction::kInboundTrigger, port, proto, std::nullopt});
      if (needs_cloud(rng)) {
        reqs.push_back({Direction::kOutbound, 443, TransportProtocol::kTcp, cloud});
      }
    }
  }

  SynthesizedInstance inst;
  for (int f = 0; f < n; ++f) {
    auto& list = inst.candidate_bookkeeping[functions[f]];
    for (size_t i = 0; i < caps.size(); ++i) {
      if (std::binary_search(caps[i].begin(), caps[i].end(), f)) list.push_back(devices[i].id);
    }
  }

  // Preferred devices are pairwise distinct so every edge crosses the network.
  std::vector<std::vector<int>> cand_idx(n);
  for (size_t i = 0; i < caps.size(); ++i) {
    for (int f : caps[i]) cand_idx[f].push_back(static_cast<int>(i));
  }
  for (auto& c : cand_idx) std::shuffle(c.begin(), c.end(), rng);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> owner(caps.size(), -1), match(n, -1);
  for (int f : order) {
    std::vector<bool> visited(caps.size(), false);
    if (!Augment(f, cand_idx, owner, visited, match)) {
      throw std::logic_error("no distinct preferred assignment");
    }
  }
  for (int f = 0; f < n; ++f) inst.planted.bindings[functions[f]] = devices[match[f]].id;

  std::vector<WorkflowEdge> structure = chain;
  if (spec.random_structure) {
    // Random DAG in function order, at most two parents per node.
    structure.clear();
    std::bernoulli_distribution link(std::min(1.0, 2.0 / n));
    for (int j = 1; j < n; ++j) {
      int parents = 0;
      for (int i = 0; i < j && parents < 2; ++i) {
        if (link(rng)) {
          structure.push_back({functions[i], functions[j]});
          ++parents;
        }
      }
    }
  }

  const uint64_t model_seed = rng();
  inst.planted_p = p;
  inst.model = PlantPreference(functions, inst.candidate_bookkeeping, inst.planted, p,
                               structure, model_seed, spec.plant);
  inst.network = Network(std::move(devices));
  inst.workflow = Workflow(functions, chain,
                           "bench_f" + std::to_string(n) + "_" + std::to_string(run_seed));
  return inst;
}

}  // namespace devsel
