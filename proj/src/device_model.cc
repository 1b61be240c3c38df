#include "devsel/device_model.h"

#include "devsel/errors.h"
#include "json_util.h"

namespace devsel {

using internal::Fail;
using internal::Json;

std::string_view ToString(Direction d) {
  return d == Direction::kInboundTrigger ? "inbound_trigger" : "outbound";
}

std::string_view ToString(TransportProtocol p) {
  return p == TransportProtocol::kTcp ? "TCP" : "UDP";
}

std::optional<Direction> ParseDirection(std::string_view text) {
  if (text == "inbound_trigger") return Direction::kInboundTrigger;
  if (text == "outbound") return Direction::kOutbound;
  return std::nullopt;
}

std::optional<TransportProtocol> ParseTransportProtocol(std::string_view text) {
  if (text == "TCP") return TransportProtocol::kTcp;
  if (text == "UDP") return TransportProtocol::kUdp;
  return std::nullopt;
}

namespace {

std::string DevicePath(size_t index, const std::string& id) {
  return "devices[" + std::to_string(index) + "] (id \"" + id + "\")";
}

void ValidateRequirement(const NetRequirement& r, const std::string& path) {
  if (r.dest_port < 0 || r.dest_port > 65535) {
    Fail(path + ".dest_port", "port " + std::to_string(r.dest_port) +
                                  " outside [0, 65535]");
  }
  if (r.direction == Direction::kInboundTrigger && r.external_endpoint) {
    Fail(path + ".external_endpoint",
         "inbound_trigger requirements take no external endpoint");
  }
  if (r.direction == Direction::kOutbound && !r.external_endpoint) {
    Fail(path + ".external_endpoint",
         "outbound requirements need an external endpoint");
  }
}

}  // namespace

Network::Network(std::vector<Device> devices) : devices_(std::move(devices)) {
  for (size_t i = 0; i < devices_.size(); ++i) {
    const Device& d = devices_[i];
    const std::string path = DevicePath(i, d.id);
    if (d.id.empty()) Fail(path + ".id", "device id must be non-empty");
    if (!by_id_.emplace(d.id, i).second) {
      Fail(path + ".id", "duplicate device id \"" + d.id + "\"");
    }
    if (!by_address_.emplace(d.address, i).second) {
      Fail(path + ".address",
           "duplicate address " + d.address.ToString());
    }
    if (d.capabilities.empty()) {
      Fail(path + ".capabilities", "capabilities must be non-empty");
    }
    for (const auto& cap : d.capabilities) {
      if (cap.empty()) Fail(path + ".capabilities", "empty function name");
    }
    for (const auto& [function, reqs] : d.net_requirements) {
      const std::string req_path = path + ".net_requirements." + function;
      if (!d.Supports(function)) {
        Fail(req_path, "requirement for function \"" + function +
                           "\" which is not among the device capabilities");
      }
      for (size_t k = 0; k < reqs.size(); ++k) {
        ValidateRequirement(reqs[k], req_path + "[" + std::to_string(k) + "]");
      }
    }
  }
  // Outbound endpoints must leave the device network; intra-network flows are
  // expressed only through workflow edges.
  for (size_t i = 0; i < devices_.size(); ++i) {
    for (const auto& [function, reqs] : devices_[i].net_requirements) {
      for (size_t k = 0; k < reqs.size(); ++k) {
        if (reqs[k].external_endpoint &&
            by_address_.count(*reqs[k].external_endpoint)) {
          Fail(DevicePath(i, devices_[i].id) + ".net_requirements." +
                   function + "[" + std::to_string(k) + "].external_endpoint",
               "endpoint " + reqs[k].external_endpoint->ToString() +
                   " is the address of a device in the network");
        }
      }
    }
  }
}

const Device* Network::Find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &devices_[it->second];
}

const Device* Network::FindByAddress(Ipv4Address address) const {
  auto it = by_address_.find(address);
  return it == by_address_.end() ? nullptr : &devices_[it->second];
}

namespace {

Ipv4Address ParseAddress(const Json& j, const std::string& path) {
  auto text = internal::GetString(j, path);
  auto addr = Ipv4Address::Parse(text);
  if (!addr) Fail(path, "\"" + text + "\" is not a valid IPv4 address");
  return *addr;
}

NetRequirement ParseRequirement(const Json& j, const std::string& path) {
  internal::ExpectObject(j, path);
  internal::RejectUnknownKeys(
      j, {"direction", "dest_port", "tp_proto", "external_endpoint"}, path);
  NetRequirement r;
  auto dir_text = internal::GetString(internal::Require(j, "direction", path),
                                      path + ".direction");
  auto dir = ParseDirection(dir_text);
  if (!dir) Fail(path + ".direction", "unknown direction \"" + dir_text + "\"");
  r.direction = *dir;
  auto port = internal::GetInteger(internal::Require(j, "dest_port", path),
                                   path + ".dest_port");
  if (port < 0 || port > 65535) {
    Fail(path + ".dest_port",
         "port " + std::to_string(port) + " outside [0, 65535]");
  }
  r.dest_port = static_cast<int>(port);
  auto proto_text = internal::GetString(
      internal::Require(j, "tp_proto", path), path + ".tp_proto");
  auto proto = ParseTransportProtocol(proto_text);
  if (!proto) Fail(path + ".tp_proto", "unknown protocol \"" + proto_text + "\"");
  r.tp_proto = *proto;
  if (auto it = j.find("external_endpoint"); it != j.end() && !it->is_null()) {
    r.external_endpoint = ParseAddress(*it, path + ".external_endpoint");
  }
  return r;
}

Device ParseDevice(const Json& j, size_t index) {
  std::string path = "devices[" + std::to_string(index) + "]";
  internal::ExpectObject(j, path);
  Device d;
  d.id = internal::GetString(internal::Require(j, "id", path), path + ".id");
  path = DevicePath(index, d.id);
  internal::RejectUnknownKeys(
      j, {"id", "address", "attributes", "capabilities", "net_requirements"},
      path);
  d.address = ParseAddress(internal::Require(j, "address", path),
                           path + ".address");

  if (auto it = j.find("attributes"); it != j.end()) {
    internal::ExpectObject(*it, path + ".attributes");
    for (auto a = it->begin(); a != it->end(); ++a) {
      d.attributes[a.key()] =
          internal::GetString(a.value(), path + ".attributes." + a.key());
    }
  }

  const Json& caps = internal::Require(j, "capabilities", path);
  internal::ExpectArray(caps, path + ".capabilities");
  for (size_t k = 0; k < caps.size(); ++k) {
    const std::string cap_path = path + ".capabilities[" + std::to_string(k) + "]";
    if (!d.capabilities.insert(internal::GetString(caps[k], cap_path)).second) {
      Fail(cap_path, "duplicate capability");
    }
  }

  if (auto it = j.find("net_requirements"); it != j.end()) {
    internal::ExpectObject(*it, path + ".net_requirements");
    for (auto f = it->begin(); f != it->end(); ++f) {
      const std::string f_path = path + ".net_requirements." + f.key();
      internal::ExpectArray(f.value(), f_path);
      auto& list = d.net_requirements[f.key()];
      for (size_t k = 0; k < f.value().size(); ++k) {
        list.push_back(
            ParseRequirement(f.value()[k], f_path + "[" + std::to_string(k) + "]"));
      }
    }
  }
  return d;
}

}  // namespace

Network LoadNetwork(std::string_view registry_document) {
  Json doc = internal::ParseDocument(registry_document, "registry");
  internal::ExpectObject(doc, "$");
  internal::RejectUnknownKeys(doc, {"devices"}, "$");
  const Json& list = internal::Require(doc, "devices", "$");
  internal::ExpectArray(list, "devices");
  std::vector<Device> devices;
  devices.reserve(list.size());
  for (size_t i = 0; i < list.size(); ++i) devices.push_back(ParseDevice(list[i], i));
  return Network(std::move(devices));
}

Network LoadNetworkFile(const std::filesystem::path& path) {
  return LoadNetwork(internal::ReadFile(path));
}

std::string SerializeNetwork(const Network& network) {
  internal::OrderedJson devices = internal::OrderedJson::array();
  for (const Device& d : network.devices()) {
    internal::OrderedJson dj;
    dj["id"] = d.id;
    dj["address"] = d.address.ToString();
    dj["attributes"] = internal::OrderedJson::object();
    for (const auto& [k, v] : d.attributes) dj["attributes"][k] = v;
    dj["capabilities"] = internal::OrderedJson::array();
    for (const auto& c : d.capabilities) dj["capabilities"].push_back(c);
    dj["net_requirements"] = internal::OrderedJson::object();
    for (const auto& [f, reqs] : d.net_requirements) {
      auto& arr = dj["net_requirements"][f] = internal::OrderedJson::array();
      for (const auto& r : reqs) {
        internal::OrderedJson rj;
        rj["direction"] = ToString(r.direction);
        rj["dest_port"] = r.dest_port;
        rj["tp_proto"] = ToString(r.tp_proto);
        if (r.external_endpoint) {
          rj["external_endpoint"] = r.external_endpoint->ToString();
        }
        arr.push_back(std::move(rj));
      }
    }
    devices.push_back(std::move(dj));
  }
  internal::OrderedJson doc;
  doc["devices"] = std::move(devices);
  return doc.dump(2) + "\n";
}

std::vector<const Device*> CapableDevices(const Network& network,
                                          std::string_view function) {
  std::vector<const Device*> out;
  for (const Device& d : network.devices()) {
    if (d.Supports(function)) out.push_back(&d);
  }
  return out;
}

const std::vector<NetRequirement>& NetRequirements(const Device& device,
                                                   std::string_view function) {
  static const std::vector<NetRequirement> kNone;
  if (!device.Supports(function)) {
    throw InputError("device \"" + device.id + "\" does not support function \"" +
                     std::string(function) + "\"");
  }
  auto it = device.net_requirements.find(std::string(function));
  return it == device.net_requirements.end() ? kNone : it->second;
}

}  // namespace devsel
