#ifndef DEVSEL_WORKFLOW_H_
#define DEVSEL_WORKFLOW_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "devsel/device_model.h"

namespace devsel {

struct WorkflowEdge {
  FunctionName from;
  FunctionName to;

  friend bool operator==(const WorkflowEdge&, const WorkflowEdge&) = default;
};

// An activity workflow: abstract functions plus trigger dependencies. The
// constructor rejects duplicate functions, dangling edges and cycles.
class Workflow {
 public:
  Workflow() = default;
  Workflow(std::vector<FunctionName> functions, std::vector<WorkflowEdge> edges,
           std::string id = "workflow");

  const std::string& id() const { return id_; }
  const std::vector<FunctionName>& functions() const { return functions_; }
  const std::vector<WorkflowEdge>& edges() const { return edges_; }

  // Position of `function` in functions(), or -1.
  int IndexOf(std::string_view function) const;

  // Kahn order; ties resolved by declaration order.
  std::vector<FunctionName> TopologicalOrder() const;

  friend bool operator==(const Workflow&, const Workflow&) = default;

 private:
  std::string id_;
  std::vector<FunctionName> functions_;
  std::vector<WorkflowEdge> edges_;
};

Workflow LoadWorkflow(std::string_view workflow_document);
Workflow LoadWorkflowFile(const std::filesystem::path& path);
std::string SerializeWorkflow(const Workflow& workflow);

struct FeasibilityReport {
  bool feasible = true;
  std::vector<FunctionName> uncovered;
};

FeasibilityReport CheckFeasible(const Workflow& workflow, const Network& network);

}  // namespace devsel

#endif  // DEVSEL_WORKFLOW_H_
