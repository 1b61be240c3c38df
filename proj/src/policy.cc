#include "devsel/policy.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "devsel/errors.h"
#include "json_util.h"

namespace devsel {

using internal::Fail;
using internal::Json;

namespace {

std::string Describe(const WorkflowEdge& e) { return e.from + " -> " + e.to; }

std::string Describe(Ipv4Address src, Ipv4Address dst, int port,
                     TransportProtocol proto) {
  return src.ToString() + " -> " + dst.ToString() + ":" + std::to_string(port) + "/" +
         std::string(ToString(proto));
}

std::string Describe(const AclRule& r) {
  return "ALLOW " + Describe(r.src_ip, r.dest_ip, r.dest_port, r.tp_proto);
}

// Resolves every workflow function to its assigned device. Throws InputError
// when the assignment and workflow disagree or a binding is not capable.
std::map<FunctionName, const Device*> ResolveAssignment(const Workflow& workflow,
                                                        const Assignment& assignment,
                                                        const Network& network) {
  std::map<FunctionName, const Device*> out;
  for (const auto& f : workflow.functions()) {
    auto it = assignment.bindings.find(f);
    if (it == assignment.bindings.end()) {
      bool on_edge = false;
      for (const auto& e : workflow.edges()) on_edge = on_edge || e.from == f || e.to == f;
      throw InputError("function \"" + f + "\" is unassigned" +
                       (on_edge ? " but referenced by a workflow edge" : ""));
    }
    const Device* d = network.Find(it->second);
    if (!d) throw InputError("assigned device \"" + it->second + "\" is not in the network");
    if (!d->Supports(f)) {
      throw InputError("assigned device \"" + d->id + "\" cannot execute \"" + f + "\"");
    }
    out[f] = d;
  }
  for (const auto& [f, d] : assignment.bindings) {
    if (workflow.IndexOf(f) < 0) {
      throw InputError("assignment binds \"" + f + "\" which is not a workflow function");
    }
  }
  return out;
}

// The 4-tuple a provenance entry should produce, if the entry is live.
std::optional<AclRule> Expected(const RuleSource& src, const Workflow& workflow,
                                const std::map<FunctionName, const Device*>& bound) {
  auto target = bound.find(src.function);
  if (target == bound.end() || target->second->id != src.device) return std::nullopt;
  const Device& device = *target->second;
  const auto& reqs = NetRequirements(device, src.function);
  if (src.requirement_index >= reqs.size()) return std::nullopt;
  const NetRequirement& req = reqs[src.requirement_index];
  AclRule rule;
  rule.dest_port = req.dest_port;
  rule.tp_proto = req.tp_proto;
  if (src.kind == RuleSource::Kind::kTriggerEdge) {
    if (req.direction != Direction::kInboundTrigger) return std::nullopt;
    const WorkflowEdge edge{src.from, src.function};
    if (std::find(workflow.edges().begin(), workflow.edges().end(), edge) ==
        workflow.edges().end()) {
      return std::nullopt;
    }
    auto upstream = bound.find(src.from);
    if (upstream == bound.end() || upstream->second == &device) return std::nullopt;
    rule.src_ip = upstream->second->address;
    rule.dest_ip = device.address;
  } else {
    if (req.direction != Direction::kOutbound || !src.from.empty()) return std::nullopt;
    rule.src_ip = device.address;
    rule.dest_ip = *req.external_endpoint;
  }
  return rule;
}

}  // namespace

AclPolicy GeneratePolicy(const Workflow& workflow, const Assignment& assignment,
                         const Network& network) {
  const auto bound = ResolveAssignment(workflow, assignment, network);
  AclPolicy policy;
  std::map<std::tuple<uint32_t, uint32_t, int, int>, size_t> index;
  auto emit = [&](AclRule rule) {
    auto key = std::make_tuple(rule.src_ip.value(), rule.dest_ip.value(), rule.dest_port,
                               static_cast<int>(rule.tp_proto));
    auto [it, inserted] = index.emplace(key, policy.rules.size());
    if (inserted) {
      policy.rules.push_back(std::move(rule));
    } else {
      auto& prov = policy.rules[it->second].provenance;
      prov.insert(prov.end(), rule.provenance.begin(), rule.provenance.end());
    }
  };

  for (const auto& edge : workflow.edges()) {
    const Device& up = *bound.at(edge.from);
    const Device& down = *bound.at(edge.to);
    const auto& reqs = NetRequirements(down, edge.to);
    bool has_trigger = false;
    for (size_t k = 0; k < reqs.size(); ++k) {
      if (reqs[k].direction != Direction::kInboundTrigger) continue;
      has_trigger = true;
      if (&up == &down) continue;
      emit({up.address, down.address, reqs[k].dest_port, reqs[k].tp_proto,
            {{RuleSource::Kind::kTriggerEdge, edge.from, edge.to, down.id, k}}});
    }
    if (!has_trigger) {
      throw UnsatisfiableTriggerError("edge " + Describe(edge) + ": device \"" + down.id +
                                      "\" declares no inbound_trigger for \"" + edge.to +
                                      "\"");
    }
    if (&up == &down) policy.local_triggers.push_back({edge, down.id});
  }

  for (const auto& f : workflow.functions()) {
    const Device& d = *bound.at(f);
    const auto& reqs = NetRequirements(d, f);
    for (size_t k = 0; k < reqs.size(); ++k) {
      if (reqs[k].direction != Direction::kOutbound) continue;
      emit({d.address, *reqs[k].external_endpoint, reqs[k].dest_port, reqs[k].tp_proto,
            {{RuleSource::Kind::kOutbound, "", f, d.id, k}}});
    }
  }
  return policy;
}

std::string VerificationReport::Summary() const {
  auto word = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::string s = std::string("completeness ") + word(completeness) + ", minimality " +
                  word(minimality) + ", closure " + word(closure);
  return s;
}

VerificationReport VerifyLeastPrivilege(const AclPolicy& policy,
                                        const Workflow& workflow,
                                        const Assignment& assignment,
                                        const Network& network) {
  VerificationReport report;
  const auto bound = ResolveAssignment(workflow, assignment, network);

  using Tuple = std::tuple<uint32_t, uint32_t, int, int>;
  auto key = [](Ipv4Address s, Ipv4Address d, int port, TransportProtocol p) {
    return Tuple{s.value(), d.value(), port, static_cast<int>(p)};
  };
  std::multiset<Tuple> present;
  for (const auto& r : policy.rules) present.insert(key(r.src_ip, r.dest_ip, r.dest_port, r.tp_proto));

  // Completeness: every non-local edge trigger and every outbound need.
  std::set<std::pair<uint32_t, uint32_t>> allowed_pairs;
  for (const auto& edge : workflow.edges()) {
    const Device& up = *bound.at(edge.from);
    const Device& down = *bound.at(edge.to);
    if (&up == &down) continue;
    allowed_pairs.emplace(up.address.value(), down.address.value());
    const auto& reqs = NetRequirements(down, edge.to);
    bool any_trigger = false;
    for (const auto& req : reqs) {
      if (req.direction != Direction::kInboundTrigger) continue;
      any_trigger = true;
      if (!present.count(key(up.address, down.address, req.dest_port, req.tp_proto))) {
        report.completeness = false;
        report.violations.push_back(
            "completeness: edge " + Describe(edge) + " lacks ALLOW " +
            Describe(up.address, down.address, req.dest_port, req.tp_proto));
      }
    }
    if (!any_trigger) {
      report.completeness = false;
      report.violations.push_back("completeness: edge " + Describe(edge) +
                                  " targets a device with no inbound trigger");
    }
  }
  for (const auto& f : workflow.functions()) {
    const Device& d = *bound.at(f);
    for (const auto& req : NetRequirements(d, f)) {
      if (req.direction != Direction::kOutbound) continue;
      if (!present.count(key(d.address, *req.external_endpoint, req.dest_port, req.tp_proto))) {
        report.completeness = false;
        report.violations.push_back(
            "completeness: outbound need of " + d.id + " for " + f + " lacks ALLOW " +
            Describe(d.address, *req.external_endpoint, req.dest_port, req.tp_proto));
      }
    }
  }

  // Minimality: each rule is unique and every provenance entry is live and
  // reproduces exactly this rule.
  for (const auto& rule : policy.rules) {
    if (present.count(key(rule.src_ip, rule.dest_ip, rule.dest_port, rule.tp_proto)) > 1) {
      report.minimality = false;
      report.violations.push_back("minimality: duplicate rule " + Describe(rule));
    }
    bool live = !rule.provenance.empty();
    for (const auto& src : rule.provenance) {
      auto expected = Expected(src, workflow, bound);
      live = live && expected && expected->Tuple() == rule.Tuple();
    }
    if (!live) {
      report.minimality = false;
      report.violations.push_back("minimality: rule " + Describe(rule) +
                                  " has no live edge or requirement behind it");
    }
  }

  // Closure: full deny matrix over ordered device pairs.
  std::set<std::pair<uint32_t, uint32_t>> permitted_pairs;
  std::set<Tuple> intra_tuples;
  for (const auto& rule : policy.rules) {
    if (!network.FindByAddress(rule.dest_ip)) continue;
    ++report.intra_network_rules;
    intra_tuples.insert(key(rule.src_ip, rule.dest_ip, rule.dest_port, rule.tp_proto));
    permitted_pairs.emplace(rule.src_ip.value(), rule.dest_ip.value());
    if (!network.FindByAddress(rule.src_ip)) {
      report.closure = false;
      report.violations.push_back("closure: " + Describe(rule) +
                                  " admits a source outside the device network");
    }
  }
  report.permitted_intra_tuples = intra_tuples.size();
  for (const Device& a : network.devices()) {
    for (const Device& b : network.devices()) {
      if (&a == &b) continue;
      const std::pair<uint32_t, uint32_t> pair{a.address.value(), b.address.value()};
      if (permitted_pairs.count(pair) && !allowed_pairs.count(pair)) {
        report.closure = false;
        report.violations.push_back("closure: " + a.id + " -> " + b.id +
                                    " is permitted without a workflow edge");
      }
    }
  }
  if (report.permitted_intra_tuples != report.intra_network_rules) {
    report.closure = false;
    report.violations.push_back("closure: intra-network rules overlap");
  }
  return report;
}

std::string SerializePolicy(const AclPolicy& policy, const PolicyHeader& header) {
  using OJ = internal::OrderedJson;
  OJ doc;
  OJ& h = doc["header"];
  h["workflow"] = header.workflow_id;
  h["generated_at"] = header.generated_at;
  h["statefulness"] = kStatefulnessNote;
  h["assignment"] =
      OJ::parse(SerializeAssignment(header.assignment, header.function_order))["assignment"];

  doc["rules"] = OJ::array();
  for (const auto& r : policy.rules) {
    OJ rj;
    rj["action"] = "allow";
    rj["src_ip"] = r.src_ip.ToString();
    rj["dest_ip"] = r.dest_ip.ToString();
    rj["dest_port"] = r.dest_port;
    rj["tp_proto"] = ToString(r.tp_proto);
    rj["provenance"] = OJ::array();
    for (const auto& p : r.provenance) {
      OJ pj;
      if (p.kind == RuleSource::Kind::kTriggerEdge) {
        pj["kind"] = "trigger_edge";
        pj["from"] = p.from;
        pj["to"] = p.function;
      } else {
        pj["kind"] = "outbound";
        pj["function"] = p.function;
      }
      pj["device"] = p.device;
      pj["requirement"] = p.requirement_index;
      rj["provenance"].push_back(std::move(pj));
    }
    doc["rules"].push_back(std::move(rj));
  }
  doc["local_triggers"] = OJ::array();
  for (const auto& lt : policy.local_triggers) {
    OJ lj;
    lj["from"] = lt.edge.from;
    lj["to"] = lt.edge.to;
    lj["device"] = lt.device;
    doc["local_triggers"].push_back(std::move(lj));
  }
  doc["default"] = "deny";
  return doc.dump(2) + "\n";
}

AclPolicy LoadPolicy(std::string_view document, PolicyHeader* header) {
  Json doc = internal::ParseDocument(document, "policy");
  internal::ExpectObject(doc, "$");
  internal::RejectUnknownKeys(doc, {"header", "rules", "local_triggers", "default"}, "$");
  if (internal::GetString(internal::Require(doc, "default", "$"), "default") != "deny") {
    Fail("default", "policy must terminate in deny");
  }
  if (header) {
    const Json& h = internal::Require(doc, "header", "$");
    internal::ExpectObject(h, "header");
    header->workflow_id =
        internal::GetString(internal::Require(h, "workflow", "header"), "header.workflow");
    header->generated_at = internal::GetString(
        internal::Require(h, "generated_at", "header"), "header.generated_at");
    header->assignment = LoadAssignment(internal::Require(h, "assignment", "header").dump());
    header->function_order.clear();
    for (auto it = h["assignment"].begin(); it != h["assignment"].end(); ++it) {
      header->function_order.push_back(it.key());
    }
  }

  auto address = [](const Json& j, const std::string& path) {
    auto text = internal::GetString(j, path);
    auto a = Ipv4Address::Parse(text);
    if (!a) Fail(path, "\"" + text + "\" is not a valid IPv4 address");
    return *a;
  };

  AclPolicy policy;
  const Json& rules = internal::Require(doc, "rules", "$");
  internal::ExpectArray(rules, "rules");
  for (size_t i = 0; i < rules.size(); ++i) {
    const std::string path = "rules[" + std::to_string(i) + "]";
    const Json& rj = rules[i];
    internal::ExpectObject(rj, path);
    if (internal::GetString(internal::Require(rj, "action", path), path + ".action") !=
        "allow") {
      Fail(path + ".action", "only allow rules precede the terminal deny");
    }
    AclRule rule;
    rule.src_ip = address(internal::Require(rj, "src_ip", path), path + ".src_ip");
    rule.dest_ip = address(internal::Require(rj, "dest_ip", path), path + ".dest_ip");
    auto port = internal::GetInteger(internal::Require(rj, "dest_port", path),
                                     path + ".dest_port");
    if (port < 0 || port > 65535) Fail(path + ".dest_port", "port outside [0, 65535]");
    rule.dest_port = static_cast<int>(port);
    auto proto_text =
        internal::GetString(internal::Require(rj, "tp_proto", path), path + ".tp_proto");
    auto proto = ParseTransportProtocol(proto_text);
    if (!proto) Fail(path + ".tp_proto", "unknown protocol \"" + proto_text + "\"");
    rule.tp_proto = *proto;
    if (auto it = rj.find("provenance"); it != rj.end()) {
      internal::ExpectArray(*it, path + ".provenance");
      for (size_t k = 0; k < it->size(); ++k) {
        const std::string pp = path + ".provenance[" + std::to_string(k) + "]";
        const Json& pj = (*it)[k];
        internal::ExpectObject(pj, pp);
        RuleSource src;
        auto kind = internal::GetString(internal::Require(pj, "kind", pp), pp + ".kind");
        if (kind == "trigger_edge") {
          src.kind = RuleSource::Kind::kTriggerEdge;
          src.from = internal::GetString(internal::Require(pj, "from", pp), pp + ".from");
          src.function = internal::GetString(internal::Require(pj, "to", pp), pp + ".to");
        } else if (kind == "outbound") {
          src.kind = RuleSource::Kind::kOutbound;
          src.function =
              internal::GetString(internal::Require(pj, "function", pp), pp + ".function");
        } else {
          Fail(pp + ".kind", "unknown provenance kind \"" + kind + "\"");
        }
        src.device = internal::GetString(internal::Require(pj, "device", pp), pp + ".device");
        auto req = internal::GetInteger(internal::Require(pj, "requirement", pp),
                                        pp + ".requirement");
        if (req < 0) Fail(pp + ".requirement", "negative index");
        src.requirement_index = static_cast<size_t>(req);
        rule.provenance.push_back(std::move(src));
      }
    }
    policy.rules.push_back(std::move(rule));
  }
  if (auto it = doc.find("local_triggers"); it != doc.end()) {
    internal::ExpectArray(*it, "local_triggers");
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string path = "local_triggers[" + std::to_string(i) + "]";
      const Json& lj = (*it)[i];
      internal::ExpectObject(lj, path);
      policy.local_triggers.push_back(
          {{internal::GetString(internal::Require(lj, "from", path), path + ".from"),
            internal::GetString(internal::Require(lj, "to", path), path + ".to")},
           internal::GetString(internal::Require(lj, "device", path), path + ".device")});
    }
  }
  return policy;
}

std::string FormatPolicyTable(const AclPolicy& policy) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-4s %-6s %-15s %-15s %6s %-5s %s\n", "#", "action",
                "src_ip", "dest_ip", "port", "proto", "source");
  out += line;
  for (size_t i = 0; i < policy.rules.size(); ++i) {
    const AclRule& r = policy.rules[i];
    std::string why;
    for (const auto& p : r.provenance) {
      if (!why.empty()) why += ", ";
      why += p.kind == RuleSource::Kind::kTriggerEdge ? p.from + " -> " + p.function
                                                      : p.function + " outbound";
    }
    std::snprintf(line, sizeof(line), "%-4zu %-6s %-15s %-15s %6d %-5s %s\n", i + 1, "ALLOW",
                  r.src_ip.ToString().c_str(), r.dest_ip.ToString().c_str(), r.dest_port,
                  std::string(ToString(r.tp_proto)).c_str(), why.c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-4s %-6s %-15s %-15s %6s %-5s\n", "*", "DENY", "any",
                "any", "any", "any");
  out += line;
  return out;
}

}  // namespace devsel
