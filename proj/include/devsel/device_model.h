#ifndef DEVSEL_DEVICE_MODEL_H_
#define DEVSEL_DEVICE_MODEL_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "devsel/ipv4.h"

namespace devsel {

using DeviceId = std::string;
using FunctionName = std::string;

enum class Direction { kInboundTrigger, kOutbound };
enum class TransportProtocol { kTcp, kUdp };

std::string_view ToString(Direction d);
std::string_view ToString(TransportProtocol p);
std::optional<Direction> ParseDirection(std::string_view text);
std::optional<TransportProtocol> ParseTransportProtocol(std::string_view text);

// One network access a device needs to execute a function. Inbound triggers
// describe how a peer reaches this device; outbound entries describe an
// external endpoint this device must reach.
struct NetRequirement {
  Direction direction = Direction::kInboundTrigger;
  int dest_port = 0;
  TransportProtocol tp_proto = TransportProtocol::kTcp;
  std::optional<Ipv4Address> external_endpoint;

  friend bool operator==(const NetRequirement&,
                         const NetRequirement&) = default;
};

struct Device {
  DeviceId id;
  Ipv4Address address;
  std::map<std::string, std::string> attributes;
  std::set<FunctionName> capabilities;
  std::map<FunctionName, std::vector<NetRequirement>> net_requirements;

  bool Supports(std::string_view function) const {
    return capabilities.find(std::string(function)) != capabilities.end();
  }

  friend bool operator==(const Device&, const Device&) = default;
};

// The device pool. Immutable once constructed; construction validates every
// invariant and throws InputError on the first violation.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<Device> devices);

  const std::vector<Device>& devices() const { return devices_; }
  size_t size() const { return devices_.size(); }

  const Device* Find(std::string_view id) const;
  const Device* FindByAddress(Ipv4Address address) const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.devices_ == b.devices_;
  }

 private:
  std::vector<Device> devices_;
  std::unordered_map<std::string, size_t> by_id_;
  std::map<Ipv4Address, size_t> by_address_;
};

// Parses and validates a registry document (JSON, top-level key "devices").
Network LoadNetwork(std::string_view registry_document);
Network LoadNetworkFile(const std::filesystem::path& path);
std::string SerializeNetwork(const Network& network);

// Devices whose capability set contains `function`, in registry order.
std::vector<const Device*> CapableDevices(const Network& network,
                                          std::string_view function);

// Stored requirements of `device` for `function`. Throws InputError when the
// device does not support the function.
const std::vector<NetRequirement>& NetRequirements(const Device& device,
                                                   std::string_view function);

}  // namespace devsel

#endif  // DEVSEL_DEVICE_MODEL_H_
