#ifndef DEVSEL_PREFERENCE_H_
#define DEVSEL_PREFERENCE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devsel/device_model.h"
#include "devsel/workflow.h"

namespace devsel {

// One Bayesian-network node: a workflow function whose values are device ids.
//
// `cpt` is stored row-major: one row of values.size() probabilities for each
// combination of parent values. Rows are ordered mixed-radix over the parent
// value indices with the first parent most significant, so a root node has a
// single row.
struct ModelNode {
  FunctionName name;
  std::vector<DeviceId> values;
  std::vector<FunctionName> parents;
  std::vector<double> cpt;

  size_t RowCount() const { return values.empty() ? 0 : cpt.size() / values.size(); }
  std::span<const double> Row(size_t row) const {
    return {cpt.data() + row * values.size(), values.size()};
  }
  int ValueIndex(std::string_view device) const;

  friend bool operator==(const ModelNode&, const ModelNode&) = default;
};

// User preference model M(F, D). Immutable after construction; all
// invariants (distinct names, acyclic parents, complete normalized CPTs) are
// validated by the constructor.
class PreferenceModel {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  PreferenceModel() = default;
  explicit PreferenceModel(std::vector<ModelNode> nodes);

  const std::vector<ModelNode>& nodes() const { return nodes_; }
  const ModelNode* Find(std::string_view name) const;
  int IndexOf(std::string_view name) const;

  // Parent node indices of node i, in the node's declared parent order.
  const std::vector<int>& ParentIndices(size_t i) const { return parent_index_[i]; }

  friend bool operator==(const PreferenceModel& a, const PreferenceModel& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  std::vector<ModelNode> nodes_;
  std::vector<std::vector<int>> parent_index_;
};

// One device per workflow function.
struct Assignment {
  std::map<FunctionName, DeviceId> bindings;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Joint probability of `assignment` under `model`: the product over nodes, in
// node order, of P(node = bound device | parents = bound devices). Throws
// InputError when a node is unbound, a binding names an unknown function, or
// a bound device lies outside the node's domain.
double Score(const PreferenceModel& model, const Assignment& assignment);

PreferenceModel LoadModel(std::string_view model_document);
PreferenceModel LoadModelFile(const std::filesystem::path& path);
std::string SerializeModel(const PreferenceModel& model);

Assignment LoadAssignment(std::string_view document);
Assignment LoadAssignmentFile(const std::filesystem::path& path);
// `order` fixes the key order in the output; bindings not in it follow.
std::string SerializeAssignment(const Assignment& assignment,
                                const std::vector<FunctionName>& order = {});

// How CPT rows whose parent configuration differs from the preferred
// assignment are filled.
enum class OffPathRows {
  // Same shape as the preferred rows: the preferred device keeps p^(1/|F|).
  // The joint then factorizes per node.
  kUniform,
  // Drawn from a symmetric Dirichlet; only rows conditioned on the preferred
  // parent values are pinned. Yields a rugged landscape with local optima.
  kRandom,
};

struct PlantOptions {
  OffPathRows off_path = OffPathRows::kRandom;
  double dirichlet_alpha = 0.3;
};

// Builds a model whose unique maximum is `preferred`, with joint score `p`.
// Every row conditioned on the preferred parent values gives the preferred
// device p^(1/|F|) and splits the rest uniformly. Throws DominanceError when
// the construction cannot keep `preferred` the unique argmax and InputError on
// a malformed structure or candidate map.
PreferenceModel PlantPreference(
    const std::vector<FunctionName>& functions,
    const std::map<FunctionName, std::vector<DeviceId>>& candidates,
    const Assignment& preferred, double p,
    const std::vector<WorkflowEdge>& structure, uint64_t rng_seed,
    const PlantOptions& options = {});

}  // namespace devsel

#endif  // DEVSEL_PREFERENCE_H_
