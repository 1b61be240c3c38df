#include "devsel/preference.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "devsel/errors.h"
#include "json_util.h"

namespace devsel {

using internal::Fail;
using internal::Json;

int ModelNode::ValueIndex(std::string_view device) const {
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] == device) return static_cast<int>(i);
  }
  return -1;
}

PreferenceModel::PreferenceModel(std::vector<ModelNode> nodes)
    : nodes_(std::move(nodes)) {
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    if (nodes_[i].name.empty()) Fail(path + ".name", "empty node name");
    if (!index.emplace(nodes_[i].name, static_cast<int>(i)).second) {
      Fail(path + ".name", "duplicate node \"" + nodes_[i].name + "\"");
    }
  }

  parent_index_.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const ModelNode& node = nodes_[i];
    const std::string path = "nodes[" + std::to_string(i) + "] (\"" + node.name + "\")";
    if (node.values.empty()) Fail(path + ".values", "domain must be non-empty");
    std::set<std::string> distinct(node.values.begin(), node.values.end());
    if (distinct.size() != node.values.size()) {
      Fail(path + ".values", "domain values must be pairwise distinct");
    }
    std::set<std::string> seen_parents;
    for (const auto& parent : node.parents) {
      auto it = index.find(parent);
      if (it == index.end()) {
        Fail(path + ".parents", "unknown parent \"" + parent + "\"");
      }
      if (!seen_parents.insert(parent).second) {
        Fail(path + ".parents", "duplicate parent \"" + parent + "\"");
      }
      parent_index_[i].push_back(it->second);
    }
  }

  // Parent graph must be acyclic: Kahn's algorithm over child lists.
  std::vector<int> indegree(nodes_.size(), 0);
  std::vector<std::vector<int>> children(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    for (int p : parent_index_[i]) {
      children[p].push_back(static_cast<int>(i));
      ++indegree[i];
    }
  }
  std::vector<int> ready;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  }
  size_t visited = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++visited;
    for (int c : children[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (visited != nodes_.size()) Fail("nodes", "parent graph contains a cycle");

  for (size_t i = 0; i < nodes_.size(); ++i) {
    const ModelNode& node = nodes_[i];
    const std::string path = "nodes[" + std::to_string(i) + "] (\"" + node.name + "\").cpt";
    size_t rows = 1;
    for (int p : parent_index_[i]) rows *= nodes_[p].values.size();
    if (node.cpt.size() != rows * node.values.size()) {
      Fail(path, "expected " + std::to_string(rows) + " rows of " +
                     std::to_string(node.values.size()) + " probabilities");
    }
    for (size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (double prob : node.Row(r)) {
        if (!(prob >= 0.0 && prob <= 1.0)) {
          Fail(path + "[" + std::to_string(r) + "]",
               "probability " + std::to_string(prob) + " outside [0, 1]");
        }
        sum += prob;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", sum);
        Fail(path + "[" + std::to_string(r) + "]",
             std::string("row sums to ") + buf + ", expected 1");
      }
    }
  }
}

const ModelNode* PreferenceModel::Find(std::string_view name) const {
  int i = IndexOf(name);
  return i < 0 ? nullptr : &nodes_[i];
}

int PreferenceModel::IndexOf(std::string_view name) const {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

double Score(const PreferenceModel& model, const Assignment& assignment) {
  for (const auto& [function, device] : assignment.bindings) {
    if (model.IndexOf(function) < 0) {
      throw InputError("assignment binds unknown function \"" + function + "\"");
    }
  }
  const auto& nodes = model.nodes();
  std::vector<int> value_index(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    auto it = assignment.bindings.find(nodes[i].name);
    if (it == assignment.bindings.end()) {
      throw InputError("assignment does not bind function \"" + nodes[i].name + "\"");
    }
    value_index[i] = nodes[i].ValueIndex(it->second);
    if (value_index[i] < 0) {
      throw InputError("device \"" + it->second + "\" is not in the domain of \"" +
                       nodes[i].name + "\"");
    }
  }
  double score = 1.0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    size_t row = 0;
    for (int p : model.ParentIndices(i)) {
      row = row * nodes[p].values.size() + value_index[p];
    }
    score *= nodes[i].Row(row)[value_index[i]];
  }
  return score;
}

namespace {

std::vector<std::string> StringArray(const Json& j, const std::string& path) {
  internal::ExpectArray(j, path);
  std::vector<std::string> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(internal::GetString(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

// Rows in the document are keyed by their parent-value tuple and may appear in
// any order; each combination must occur exactly once.
PreferenceModel LoadModel(std::string_view model_document) {
  Json doc = internal::ParseDocument(model_document, "model");
  internal::ExpectObject(doc, "$");
  internal::RejectUnknownKeys(doc, {"nodes"}, "$");
  const Json& list = internal::Require(doc, "nodes", "$");
  internal::ExpectArray(list, "nodes");

  std::vector<ModelNode> nodes(list.size());
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const Json& nj = list[i];
    internal::ExpectObject(nj, path);
    internal::RejectUnknownKeys(nj, {"name", "values", "parents", "cpt"}, path);
    nodes[i].name = internal::GetString(internal::Require(nj, "name", path), path + ".name");
    nodes[i].values = StringArray(internal::Require(nj, "values", path), path + ".values");
    if (auto it = nj.find("parents"); it != nj.end()) {
      nodes[i].parents = StringArray(*it, path + ".parents");
    }
  }

  std::unordered_map<std::string, size_t> by_name;
  for (size_t i = 0; i < nodes.size(); ++i) by_name.emplace(nodes[i].name, i);

  for (size_t i = 0; i < list.size(); ++i) {
    ModelNode& node = nodes[i];
    const std::string path = "nodes[" + std::to_string(i) + "] (\"" + node.name + "\").cpt";
    std::vector<const ModelNode*> parents;
    size_t rows = 1;
    for (const auto& p : node.parents) {
      auto it = by_name.find(p);
      if (it == by_name.end()) {
        Fail("nodes[" + std::to_string(i) + "].parents", "unknown parent \"" + p + "\"");
      }
      parents.push_back(&nodes[it->second]);
      rows *= nodes[it->second].values.size();
    }
    const Json& cj = internal::Require(list[i], "cpt", "nodes[" + std::to_string(i) + "]");
    internal::ExpectArray(cj, path);
    if (cj.size() != rows) {
      Fail(path, "expected " + std::to_string(rows) + " rows, found " +
                     std::to_string(cj.size()));
    }
    node.cpt.assign(rows * node.values.size(), 0.0);
    std::vector<bool> filled(rows, false);
    for (size_t r = 0; r < cj.size(); ++r) {
      const std::string row_path = path + "[" + std::to_string(r) + "]";
      const Json& rj = cj[r];
      internal::ExpectObject(rj, row_path);
      internal::RejectUnknownKeys(rj, {"given", "probs"}, row_path);
      std::vector<std::string> given;
      if (auto it = rj.find("given"); it != rj.end()) {
        given = StringArray(*it, row_path + ".given");
      }
      if (given.size() != parents.size()) {
        Fail(row_path + ".given", "expected one value per parent");
      }
      size_t row = 0;
      for (size_t k = 0; k < given.size(); ++k) {
        int v = parents[k]->ValueIndex(given[k]);
        if (v < 0) {
          Fail(row_path + ".given[" + std::to_string(k) + "]",
               "\"" + given[k] + "\" is not a value of parent \"" + parents[k]->name + "\"");
        }
        row = row * parents[k]->values.size() + v;
      }
      if (filled[row]) Fail(row_path, "duplicate row for this parent combination");
      filled[row] = true;
      const Json& pj = internal::Require(rj, "probs", row_path);
      internal::ExpectArray(pj, row_path + ".probs");
      if (pj.size() != node.values.size()) {
        Fail(row_path + ".probs", "expected " + std::to_string(node.values.size()) +
                                      " probabilities");
      }
      for (size_t v = 0; v < pj.size(); ++v) {
        node.cpt[row * node.values.size() + v] =
            internal::GetNumber(pj[v], row_path + ".probs[" + std::to_string(v) + "]");
      }
    }
  }
  return PreferenceModel(std::move(nodes));
}

PreferenceModel LoadModelFile(const std::filesystem::path& path) {
  return LoadModel(internal::ReadFile(path));
}

std::string SerializeModel(const PreferenceModel& model) {
  using OJ = internal::OrderedJson;
  OJ nodes = OJ::array();
  for (size_t i = 0; i < model.nodes().size(); ++i) {
    const ModelNode& node = model.nodes()[i];
    const auto& parent_idx = model.ParentIndices(i);
    OJ nj;
    nj["name"] = node.name;
    nj["values"] = node.values;
    nj["parents"] = node.parents;
    nj["cpt"] = OJ::array();
    for (size_t r = 0; r < node.RowCount(); ++r) {
      // Decode the mixed-radix row index back into parent values.
      std::vector<std::string> given(parent_idx.size());
      size_t rest = r;
      for (size_t k = parent_idx.size(); k-- > 0;) {
        const auto& pv = model.nodes()[parent_idx[k]].values;
        given[k] = pv[rest % pv.size()];
        rest /= pv.size();
      }
      OJ row;
      row["given"] = given;
      auto span = node.Row(r);
      row["probs"] = std::vector<double>(span.begin(), span.end());
      nj["cpt"].push_back(std::move(row));
    }
    nodes.push_back(std::move(nj));
  }
  OJ doc;
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

Assignment LoadAssignment(std::string_view document) {
  Json doc = internal::ParseDocument(document, "assignment");
  internal::ExpectObject(doc, "$");
  // Accept either {"assignment": {...}} or a bare binding object.
  const Json* bindings = &doc;
  if (auto it = doc.find("assignment"); it != doc.end() && it->is_object()) {
    bindings = &*it;
  }
  Assignment a;
  for (auto it = bindings->begin(); it != bindings->end(); ++it) {
    a.bindings[it.key()] = internal::GetString(it.value(), it.key());
  }
  return a;
}

Assignment LoadAssignmentFile(const std::filesystem::path& path) {
  return LoadAssignment(internal::ReadFile(path));
}

std::string SerializeAssignment(const Assignment& assignment,
                                const std::vector<FunctionName>& order) {
  internal::OrderedJson bindings = internal::OrderedJson::object();
  for (const auto& f : order) {
    if (auto it = assignment.bindings.find(f); it != assignment.bindings.end()) {
      bindings[f] = it->second;
    }
  }
  for (const auto& [f, d] : assignment.bindings) {
    if (!bindings.contains(f)) bindings[f] = d;
  }
  internal::OrderedJson doc;
  doc["assignment"] = std::move(bindings);
  return doc.dump(2) + "\n";
}

PreferenceModel PlantPreference(
    const std::vector<FunctionName>& functions,
    const std::map<FunctionName, std::vector<DeviceId>>& candidates,
    const Assignment& preferred, double p,
    const std::vector<WorkflowEdge>& structure, uint64_t rng_seed,
    const PlantOptions& options) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError("planted probability must lie in (0, 1)");
  }
  // Reuses the workflow validation for names, dangling edges and cycles.
  Workflow dag(functions, structure, "structure");
  const size_t n = functions.size();
  const double q = std::pow(p, 1.0 / static_cast<double>(n));

  std::vector<const std::vector<DeviceId>*> domains(n);
  std::vector<int> preferred_index(n);
  for (size_t i = 0; i < n; ++i) {
    auto c = candidates.find(functions[i]);
    if (c == candidates.end() || c->second.size() < 2) {
      throw InputError("function \"" + functions[i] + "\" needs at least two candidates");
    }
    domains[i] = &c->second;
    auto b = preferred.bindings.find(functions[i]);
    if (b == preferred.bindings.end()) {
      throw InputError("preferred assignment does not bind \"" + functions[i] + "\"");
    }
    auto pos = std::find(c->second.begin(), c->second.end(), b->second);
    if (pos == c->second.end()) {
      throw InputError("preferred device \"" + b->second + "\" is not a candidate for \"" +
                       functions[i] + "\"");
    }
    preferred_index[i] = static_cast<int>(pos - c->second.begin());
  }
  if (preferred.bindings.size() != n) {
    throw InputError("preferred assignment binds functions outside the workflow");
  }

  // Strict-max check. With uniform off-path rows the joint factorizes, so a
  // per-row margin suffices. With random off-path rows, an assignment whose
  // first deviation (in topological order) sits at position t scores at most
  // q^t * (1 - q) / (k - 1), which must stay below q^n.
  auto topo = dag.TopologicalOrder();
  for (size_t t = 0; t < n; ++t) {
    const size_t i = dag.IndexOf(topo[t]);
    const double k = static_cast<double>(domains[i]->size());
    const double other = (1.0 - q) / (k - 1.0);
    const double bound = options.off_path == OffPathRows::kUniform
                             ? q
                             : std::pow(q, static_cast<double>(n - t));
    if (!(other < bound)) {
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "p = %g is too small to keep the preferred device of \"%s\" "
                    "dominant (%.6g per competitor vs %.6g)",
                    p, functions[i].c_str(), other, bound);
      throw DominanceError(buf);
    }
  }

  std::mt19937_64 rng(rng_seed);
  std::gamma_distribution<double> gamma(options.dirichlet_alpha, 1.0);

  std::vector<ModelNode> nodes(n);
  for (size_t i = 0; i < n; ++i) {
    ModelNode& node = nodes[i];
    node.name = functions[i];
    node.values = *domains[i];
    std::vector<size_t> parent_pos;
    for (const auto& e : structure) {
      if (e.to == functions[i]) parent_pos.push_back(dag.IndexOf(e.from));
    }
    // Parents follow function order so documents are stable.
    std::sort(parent_pos.begin(), parent_pos.end());
    size_t rows = 1;
    size_t preferred_row = 0;
    for (size_t pp : parent_pos) {
      node.parents.push_back(functions[pp]);
      rows *= domains[pp]->size();
      preferred_row = preferred_row * domains[pp]->size() + preferred_index[pp];
    }
    const size_t k = node.values.size();
    node.cpt.assign(rows * k, 0.0);
    for (size_t r = 0; r < rows; ++r) {
      double* row = node.cpt.data() + r * k;
      if (r == preferred_row || options.off_path == OffPathRows::kUniform) {
        const double other = (1.0 - q) / static_cast<double>(k - 1);
        for (size_t v = 0; v < k; ++v) row[v] = other;
        row[preferred_index[i]] = q;
        continue;
      }
      double sum = 0.0;
      for (size_t v = 0; v < k; ++v) sum += row[v] = gamma(rng);
      if (!(sum > 0.0)) {
        std::uniform_int_distribution<size_t> pick(0, k - 1);
        row[pick(rng)] = sum = 1.0;
      }
      for (size_t v = 0; v < k; ++v) row[v] /= sum;
    }
  }
  return PreferenceModel(std::move(nodes));
}

}  // namespace devsel
