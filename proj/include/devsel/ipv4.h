#ifndef DEVSEL_IPV4_H_
#define DEVSEL_IPV4_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace devsel {

// A dotted-quad IPv4 address. Only the canonical textual form is accepted:
// four decimal octets, no leading zeros, no surrounding whitespace.
class Ipv4Address {
 public:
  constexpr Ipv4Address() = default;
  constexpr explicit Ipv4Address(uint32_t value) : value_(value) {}

  static std::optional<Ipv4Address> Parse(std::string_view text);

  uint32_t value() const { return value_; }
  std::string ToString() const;

  friend auto operator<=>(const Ipv4Address&, const Ipv4Address&) = default;

 private:
  uint32_t value_ = 0;
};

}  // namespace devsel

#endif  // DEVSEL_IPV4_H_
