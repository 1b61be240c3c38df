#ifndef DEVSEL_SCORING_KERNEL_H_
#define DEVSEL_SCORING_KERNEL_H_

#include <span>
#include <vector>

#include "devsel/preference.h"

namespace devsel {

struct CandidateSets;

// A preference model compiled against a fixed candidate layout, so that an
// assignment can be scored from a gene vector (one candidate index per
// workflow function) without string lookups.
//
// Factors are multiplied in model node order, the same order Score() uses,
// so Raw() is bit-identical to Score() on the decoded assignment.
class ScoringKernel {
 public:
  ScoringKernel(const PreferenceModel& model, const CandidateSets& candidates);

  double Raw(std::span<const int> genes) const;
  double Log(std::span<const int> genes) const;

  size_t positions() const { return radix_.size(); }
  int radix(size_t position) const { return radix_[position]; }

 private:
  struct Node {
    int position = 0;
    int domain_size = 0;
    // Node value index for each candidate index at `position`.
    std::vector<int> value_of_candidate;
    std::vector<int> parent_nodes;
    std::vector<double> cpt;
    std::vector<double> log_cpt;
  };

  size_t RowOf(const Node& node, std::span<const int> genes) const;

  std::vector<Node> nodes_;
  std::vector<int> radix_;
};

}  // namespace devsel

#endif  // DEVSEL_SCORING_KERNEL_H_
