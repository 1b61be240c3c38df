#include "devsel/workflow.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "devsel/errors.h"
#include "json_util.h"

namespace devsel {

using internal::Fail;
using internal::Json;

namespace {

// Returns one cycle as a closed walk (first == last), or empty if acyclic.
std::vector<int> FindCycle(int n, const std::vector<std::vector<int>>& succ) {
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> parent(n, -1);
  for (int root = 0; root < n; ++root) {
    if (state[root]) continue;
    std::vector<std::pair<int, size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < succ[v].size()) {
        int w = succ[v][next++];
        if (state[w] == 1) {
          std::vector<int> cycle{w};
          for (int u = v; u != w; u = parent[u]) cycle.push_back(u);
          cycle.push_back(w);
          std::reverse(cycle.begin(), cycle.end());
          return cycle;
        }
        if (state[w] == 0) {
          state[w] = 1;
          parent[w] = v;
          stack.emplace_back(w, 0);
        }
      } else {
        state[v] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

}  // namespace

Workflow::Workflow(std::vector<FunctionName> functions,
                   std::vector<WorkflowEdge> edges, std::string id)
    : id_(std::move(id)), functions_(std::move(functions)), edges_(std::move(edges)) {
  if (functions_.empty()) Fail("functions", "workflow needs at least one function");
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].empty()) {
      Fail("functions[" + std::to_string(i) + "]", "empty function name");
    }
    if (!index.emplace(functions_[i], static_cast<int>(i)).second) {
      Fail("functions[" + std::to_string(i) + "]",
           "duplicate function \"" + functions_[i] + "\"");
    }
  }
  std::vector<std::vector<int>> succ(functions_.size());
  std::set<std::pair<int, int>> seen;
  for (size_t k = 0; k < edges_.size(); ++k) {
    const std::string path = "edges[" + std::to_string(k) + "]";
    auto from = index.find(edges_[k].from);
    auto to = index.find(edges_[k].to);
    if (from == index.end()) {
      Fail(path, "edge source \"" + edges_[k].from + "\" is not a workflow function");
    }
    if (to == index.end()) {
      Fail(path, "edge target \"" + edges_[k].to + "\" is not a workflow function");
    }
    if (!seen.emplace(from->second, to->second).second) {
      Fail(path, "duplicate edge " + edges_[k].from + " -> " + edges_[k].to);
    }
    succ[from->second].push_back(to->second);
  }
  auto cycle = FindCycle(static_cast<int>(functions_.size()), succ);
  if (!cycle.empty()) {
    std::string walk;
    for (size_t i = 0; i < cycle.size(); ++i) {
      if (i) walk += " -> ";
      walk += functions_[cycle[i]];
    }
    Fail("edges", "cycle detected: " + walk);
  }
}

int Workflow::IndexOf(std::string_view function) const {
  for (size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i] == function) return static_cast<int>(i);
  }
  return -1;
}

std::vector<FunctionName> Workflow::TopologicalOrder() const {
  const size_t n = functions_.size();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (const auto& e : edges_) {
    int a = IndexOf(e.from), b = IndexOf(e.to);
    succ[a].push_back(b);
    ++indegree[b];
  }
  std::set<int> ready;
  for (size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(static_cast<int>(i));
  }
  std::vector<FunctionName> order;
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(functions_[v]);
    for (int w : succ[v]) {
      if (--indegree[w] == 0) ready.insert(w);
    }
  }
  return order;
}

Workflow LoadWorkflow(std::string_view workflow_document) {
  Json doc = internal::ParseDocument(workflow_document, "workflow");
  internal::ExpectObject(doc, "$");
  internal::RejectUnknownKeys(doc, {"id", "functions", "edges"}, "$");
  std::string id = "workflow";
  if (auto it = doc.find("id"); it != doc.end()) id = internal::GetString(*it, "id");

  const Json& fj = internal::Require(doc, "functions", "$");
  internal::ExpectArray(fj, "functions");
  std::vector<FunctionName> functions;
  for (size_t i = 0; i < fj.size(); ++i) {
    functions.push_back(
        internal::GetString(fj[i], "functions[" + std::to_string(i) + "]"));
  }

  std::vector<WorkflowEdge> edges;
  if (auto it = doc.find("edges"); it != doc.end()) {
    internal::ExpectArray(*it, "edges");
    for (size_t k = 0; k < it->size(); ++k) {
      const std::string path = "edges[" + std::to_string(k) + "]";
      const Json& e = (*it)[k];
      if (!e.is_array() || e.size() != 2) Fail(path, "expected a [from, to] pair");
      edges.push_back({internal::GetString(e[0], path + "[0]"),
                       internal::GetString(e[1], path + "[1]")});
    }
  }
  return Workflow(std::move(functions), std::move(edges), std::move(id));
}

Workflow LoadWorkflowFile(const std::filesystem::path& path) {
  return LoadWorkflow(internal::ReadFile(path));
}

std::string SerializeWorkflow(const Workflow& workflow) {
  internal::OrderedJson doc;
  doc["id"] = workflow.id();
  doc["functions"] = workflow.functions();
  doc["edges"] = internal::OrderedJson::array();
  for (const auto& e : workflow.edges()) {
    doc["edges"].push_back(internal::OrderedJson::array({e.from, e.to}));
  }
  return doc.dump(2) + "\n";
}

FeasibilityReport CheckFeasible(const Workflow& workflow, const Network& network) {
  FeasibilityReport report;
  for (const auto& f : workflow.functions()) {
    if (CapableDevices(network, f).empty()) report.uncovered.push_back(f);
  }
  report.feasible = report.uncovered.empty();
  return report;
}

}  // namespace devsel
