#include "devsel/device_model.h"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "devsel/errors.h"
#include "json.hpp"
#include "test_support.h"

namespace devsel {
namespace {

using nlohmann::json;
using testing::DataPath;
using testing::ReadText;

TEST(Ipv4, ParsesCanonicalDottedQuad) {
  auto a = Ipv4Address::Parse("10.0.0.7");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->value(), (10u << 24) | 7u);
  EXPECT_EQ(a->ToString(), "10.0.0.7");
  EXPECT_EQ(Ipv4Address::Parse("255.255.255.255")->value(), 0xffffffffu);
  EXPECT_EQ(Ipv4Address::Parse("0.0.0.0")->value(), 0u);
}

TEST(Ipv4, RejectsNonCanonicalText) {
  for (const char* bad : {"", "1.2.3", "1.2.3.4.5", "256.1.1.1", "01.2.3.4", "1.2.3.-4",
                          " 1.2.3.4", "1.2.3.4 ", "1..3.4", "a.b.c.d", "1.2.3.4/24"}) {
    EXPECT_FALSE(Ipv4Address::Parse(bad)) << bad;
  }
}

TEST(DeviceModel, MinimalRegistryLoads) {
  Network n = LoadNetwork(R"({"devices":[{"id":"cm1","address":"10.0.0.2",
      "attributes":{},"capabilities":["make_coffee"],"net_requirements":{}}]})");
  EXPECT_EQ(n.size(), 1u);
  EXPECT_TRUE(n.devices()[0].Supports("make_coffee"));
}

TEST(DeviceModel, DuplicateIdRejected) {
  EXPECT_THROW(LoadNetwork(R"({"devices":[
      {"id":"cm1","address":"10.0.0.2","attributes":{},"capabilities":["a"],"net_requirements":{}},
      {"id":"cm1","address":"10.0.0.3","attributes":{},"capabilities":["a"],"net_requirements":{}}]})"),
               InputError);
}

TEST(DeviceModel, ErrorNamesDeviceAndField) {
  try {
    LoadNetwork(R"({"devices":[{"id":"cm1","address":"10.0.0.2","attributes":{},
        "capabilities":["a"],"net_requirements":{"b":[]}}]})");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("cm1"), std::string::npos) << what;
    EXPECT_NE(what.find("net_requirements"), std::string::npos) << what;
  }
}

TEST(DeviceModel, SmartHomeRegistry) {
  Network n = LoadNetworkFile(DataPath("smart_home/registry.json"));
  ASSERT_EQ(n.size(), 4u);
  for (const auto& d : n.devices()) EXPECT_EQ(d.capabilities.size(), 1u) << d.id;

  auto coffee = CapableDevices(n, "make_coffee");
  ASSERT_EQ(coffee.size(), 2u);
  EXPECT_EQ(coffee[0]->id, "cm_brand_A");
  EXPECT_EQ(coffee[1]->id, "cm_brand_B");
  EXPECT_TRUE(CapableDevices(n, "teleport").empty());
}

TEST(DeviceModel, NetRequirementsLookup) {
  Network n = LoadNetworkFile(DataPath("smart_home/registry.json"));
  const auto& cm_a = NetRequirements(*n.Find("cm_brand_A"), "make_coffee");
  ASSERT_EQ(cm_a.size(), 1u);
  EXPECT_EQ(cm_a[0].direction, Direction::kInboundTrigger);
  EXPECT_EQ(cm_a[0].dest_port, 8080);
  EXPECT_EQ(cm_a[0].tp_proto, TransportProtocol::kTcp);
  EXPECT_FALSE(cm_a[0].external_endpoint);

  EXPECT_TRUE(NetRequirements(*n.Find("alarm_brand_A"), "alarm").empty());
  EXPECT_THROW(NetRequirements(*n.Find("alarm_brand_A"), "make_coffee"), InputError);
}

TEST(DeviceModel, CoffeeMakerTriggerOnly) {
  Network n = LoadNetwork(R"({"devices":[{"id":"cm","address":"10.0.0.7","attributes":{},
      "capabilities":["make_coffee"],"net_requirements":{"make_coffee":[
        {"direction":"inbound_trigger","dest_port":443,"tp_proto":"TCP"}]}}]})");
  const auto& reqs = NetRequirements(n.devices()[0], "make_coffee");
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0], (NetRequirement{Direction::kInboundTrigger, 443, TransportProtocol::kTcp, {}}));
}

TEST(DeviceModel, RoundTrip) {
  Network n = LoadNetworkFile(DataPath("smart_home/registry.json"));
  std::string text = SerializeNetwork(n);
  EXPECT_EQ(LoadNetwork(text), n);
  EXPECT_EQ(SerializeNetwork(LoadNetwork(text)), text);
}

// Capable-device filter against a direct scan on random registries.
TEST(DeviceModel, CapableDevicesMatchesScan) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> functions = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Device> devices;
    const int count = std::uniform_int_distribution<int>(1, 50)(rng);
    for (int i = 0; i < count; ++i) {
      Device d;
      d.id = "d" + std::to_string(i);
      d.address = Ipv4Address(0x0a000002u + i);
      for (const auto& f : functions) {
        if (std::bernoulli_distribution(0.3)(rng)) d.capabilities.insert(f);
      }
      if (d.capabilities.empty()) d.capabilities.insert("a");
      devices.push_back(d);
    }
    Network n(devices);
    for (const auto& f : functions) {
      auto capable = CapableDevices(n, f);
      std::set<std::string> got;
      for (auto* d : capable) got.insert(d->id);
      for (const auto& d : devices) {
        EXPECT_EQ(got.count(d.id) == 1, d.capabilities.count(f) == 1) << d.id << " " << f;
      }
      for (size_t i = 1; i < capable.size(); ++i) {
        EXPECT_LT(capable[i - 1] - n.devices().data(), capable[i] - n.devices().data());
      }
    }
  }
}

// Every single-field mutation must either be rejected or reload to the same
// network. Benign mutations (attribute edits) must reload.
TEST(DeviceModel, SingleFieldMutationFuzz) {
  const json base = json::parse(ReadText(DataPath("smart_home/registry.json")));
  using Mutation = std::function<void(json&)>;
  const std::vector<std::pair<std::string, Mutation>> breaking = {
      {"duplicate id", [](json& j) { j["devices"][1]["id"] = "alarm_brand_A"; }},
      {"empty id", [](json& j) { j["devices"][0]["id"] = ""; }},
      {"id not a string", [](json& j) { j["devices"][0]["id"] = 7; }},
      {"bad address", [](json& j) { j["devices"][2]["address"] = "10.0.0.300"; }},
      {"leading zero address", [](json& j) { j["devices"][2]["address"] = "10.0.0.08"; }},
      {"duplicate address", [](json& j) { j["devices"][3]["address"] = "10.0.0.5"; }},
      {"empty capabilities", [](json& j) { j["devices"][0]["capabilities"] = json::array(); }},
      {"duplicate capability",
       [](json& j) { j["devices"][0]["capabilities"] = {"alarm", "alarm"}; }},
      {"requirement for unlisted function",
       [](json& j) { j["devices"][0]["net_requirements"]["fly"] = json::array(); }},
      {"port too large",
       [](json& j) { j["devices"][3]["net_requirements"]["make_coffee"][0]["dest_port"] = 65536; }},
      {"negative port",
       [](json& j) { j["devices"][3]["net_requirements"]["make_coffee"][0]["dest_port"] = -1; }},
      {"fractional port",
       [](json& j) { j["devices"][3]["net_requirements"]["make_coffee"][0]["dest_port"] = 44.5; }},
      {"unknown protocol",
       [](json& j) { j["devices"][3]["net_requirements"]["make_coffee"][0]["tp_proto"] = "ICMP"; }},
      {"unknown direction",
       [](json& j) { j["devices"][3]["net_requirements"]["make_coffee"][0]["direction"] = "up"; }},
      {"trigger with endpoint",
       [](json& j) {
         j["devices"][3]["net_requirements"]["make_coffee"][0]["external_endpoint"] = "1.2.3.4";
       }},
      {"outbound without endpoint",
       [](json& j) {
         j["devices"][3]["net_requirements"]["make_coffee"][1].erase("external_endpoint");
       }},
      {"outbound to bad endpoint",
       [](json& j) {
         j["devices"][3]["net_requirements"]["make_coffee"][1]["external_endpoint"] = "52.1.2";
       }},
      {"missing address", [](json& j) { j["devices"][0].erase("address"); }},
      {"missing capabilities", [](json& j) { j["devices"][0].erase("capabilities"); }},
      {"attribute not a string", [](json& j) { j["devices"][0]["attributes"]["brand"] = 3; }},
      {"devices not an array", [](json& j) { j["devices"] = json::object(); }},
      {"unknown device key", [](json& j) { j["devices"][0]["colour"] = "red"; }},
  };
  for (const auto& [name, mutate] : breaking) {
    json doc = base;
    mutate(doc);
    EXPECT_THROW(LoadNetwork(doc.dump()), InputError) << name;
  }

  const Network original = LoadNetwork(base.dump());
  json renamed = base;
  renamed["devices"][0]["attributes"]["brand"] = "Brand_C";
  Network reloaded = LoadNetwork(renamed.dump());
  EXPECT_EQ(reloaded.devices()[0].attributes.at("brand"), "Brand_C");
  json reordered = base;
  reordered["devices"][0]["attributes"] = {{"type", "alarm"}, {"brand", "Brand_A"}};
  EXPECT_EQ(LoadNetwork(reordered.dump()), original);
}

}  // namespace
}  // namespace devsel
