#ifndef DEVSEL_POLICY_H_
#define DEVSEL_POLICY_H_

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "devsel/device_model.h"
#include "devsel/preference.h"
#include "devsel/workflow.h"

namespace devsel {

// What caused a rule to exist.
struct RuleSource {
  enum class Kind { kTriggerEdge, kOutbound };
  Kind kind = Kind::kTriggerEdge;
  // Upstream function of the edge; empty for outbound requirements.
  FunctionName from;
  // Function whose requirement is served: the edge target or the function
  // whose device needs outbound access.
  FunctionName function;
  DeviceId device;
  size_t requirement_index = 0;

  friend bool operator==(const RuleSource&, const RuleSource&) = default;
};

// Exact-match allow rule. Source ports are unconstrained.
struct AclRule {
  Ipv4Address src_ip;
  Ipv4Address dest_ip;
  int dest_port = 0;
  TransportProtocol tp_proto = TransportProtocol::kTcp;
  std::vector<RuleSource> provenance;

  auto Tuple() const { return std::tie(src_ip, dest_ip, dest_port, tp_proto); }
  friend bool operator==(const AclRule&, const AclRule&) = default;
};

// An edge whose endpoints run on the same device needs no network rule.
struct LocalTrigger {
  WorkflowEdge edge;
  DeviceId device;

  friend bool operator==(const LocalTrigger&, const LocalTrigger&) = default;
};

// Ordered allow rules followed by an implicit terminal deny-all.
struct AclPolicy {
  std::vector<AclRule> rules;
  std::vector<LocalTrigger> local_triggers;

  friend bool operator==(const AclPolicy&, const AclPolicy&) = default;
};

// Compiles the least-privilege policy for `assignment`:
//  - per edge f_i -> f_j, one rule per inbound_trigger requirement of the
//    target device for f_j, from the upstream device's address;
//  - per assigned (function, device), one rule per outbound requirement.
// Rules keep edge order then requirement order; identical 4-tuples are merged
// and accumulate provenance.
// Throws InputError for assignments inconsistent with the workflow/network and
// UnsatisfiableTriggerError when an edge target declares no trigger.
AclPolicy GeneratePolicy(const Workflow& workflow, const Assignment& assignment,
                         const Network& network);

struct VerificationReport {
  bool completeness = true;
  bool minimality = true;
  bool closure = true;
  std::vector<std::string> violations;
  size_t intra_network_rules = 0;
  size_t permitted_intra_tuples = 0;

  bool Passed() const { return completeness && minimality && closure; }
  std::string Summary() const;
};

VerificationReport VerifyLeastPrivilege(const AclPolicy& policy,
                                        const Workflow& workflow,
                                        const Assignment& assignment,
                                        const Network& network);

struct PolicyHeader {
  std::string workflow_id;
  std::string generated_at;
  Assignment assignment;
  // Key order for the assignment object.
  std::vector<FunctionName> function_order;
};

std::string SerializePolicy(const AclPolicy& policy, const PolicyHeader& header);
AclPolicy LoadPolicy(std::string_view document, PolicyHeader* header = nullptr);
std::string FormatPolicyTable(const AclPolicy& policy);

inline constexpr std::string_view kStatefulnessNote =
    "rules permit connection initiation from src_ip to dest_ip only; return "
    "traffic is expected to be admitted by stateful enforcement";

}  // namespace devsel

#endif  // DEVSEL_POLICY_H_
