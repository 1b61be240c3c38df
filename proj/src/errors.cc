#include "devsel/errors.h"

#include <cstdio>

namespace devsel {
namespace {

std::string JoinUncovered(const std::vector<std::string>& uncovered) {
  std::string out = "no capable device for function(s):";
  for (const auto& f : uncovered) out += " " + f;
  return out;
}

std::string DescribeCap(double size, double cap) {
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "search space of %.0f assignments exceeds cap of %.0f", size,
                cap);
  return buf;
}

}  // namespace

InfeasibleError::InfeasibleError(std::vector<std::string> uncovered)
    : std::runtime_error(JoinUncovered(uncovered)),
      uncovered_(std::move(uncovered)) {}

SearchSpaceError::SearchSpaceError(double size, double cap)
    : std::runtime_error(DescribeCap(size, cap)), size_(size), cap_(cap) {}

}  // namespace devsel
