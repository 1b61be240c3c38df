#include "devsel/scoring_kernel.h"

#include <cmath>

#include "devsel/errors.h"
#include "devsel/solvers.h"

namespace devsel {

ScoringKernel::ScoringKernel(const PreferenceModel& model,
                             const CandidateSets& candidates) {
  const auto& mnodes = model.nodes();
  if (mnodes.size() != candidates.functions.size()) {
    throw InputError("model has " + std::to_string(mnodes.size()) +
                     " nodes but the workflow has " +
                     std::to_string(candidates.functions.size()) + " functions");
  }
  for (const auto& per : candidates.per_function) {
    radix_.push_back(static_cast<int>(per.size()));
  }
  nodes_.resize(mnodes.size());
  for (size_t i = 0; i < mnodes.size(); ++i) {
    const ModelNode& m = mnodes[i];
    Node& node = nodes_[i];
    int position = -1;
    for (size_t f = 0; f < candidates.functions.size(); ++f) {
      if (candidates.functions[f] == m.name) position = static_cast<int>(f);
    }
    if (position < 0) {
      throw InputError("model node \"" + m.name + "\" is not a workflow function");
    }
    node.position = position;
    node.domain_size = static_cast<int>(m.values.size());
    for (const auto& device : candidates.per_function[position]) {
      int v = m.ValueIndex(device);
      if (v < 0) {
        throw InputError("candidate \"" + device + "\" for \"" + m.name +
                         "\" is not in the model domain");
      }
      node.value_of_candidate.push_back(v);
    }
    node.parent_nodes = model.ParentIndices(i);
    node.cpt = m.cpt;
    node.log_cpt.reserve(m.cpt.size());
    for (double p : m.cpt) node.log_cpt.push_back(std::log(p));
  }
}

size_t ScoringKernel::RowOf(const Node& node, std::span<const int> genes) const {
  size_t row = 0;
  for (int p : node.parent_nodes) {
    const Node& parent = nodes_[p];
    row = row * parent.domain_size +
          parent.value_of_candidate[genes[parent.position]];
  }
  return row;
}

double ScoringKernel::Raw(std::span<const int> genes) const {
  double score = 1.0;
  for (const Node& node : nodes_) {
    const size_t row = RowOf(node, genes);
    score *= node.cpt[row * node.domain_size +
                      node.value_of_candidate[genes[node.position]]];
  }
  return score;
}

double ScoringKernel::Log(std::span<const int> genes) const {
  double score = 0.0;
  for (const Node& node : nodes_) {
    const size_t row = RowOf(node, genes);
    score += node.log_cpt[row * node.domain_size +
                          node.value_of_candidate[genes[node.position]]];
  }
  return score;
}

}  // namespace devsel
