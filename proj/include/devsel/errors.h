#ifndef DEVSEL_ERRORS_H_
#define DEVSEL_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace devsel {

// Malformed or inconsistent input document (schema violation, broken
// invariant, unknown reference). The message carries the field path.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Some workflow function has no capable device in the network.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(std::vector<std::string> uncovered);

  const std::vector<std::string>& uncovered() const { return uncovered_; }

 private:
  std::vector<std::string> uncovered_;
};

// Brute-force enumeration was asked to cover more assignments than allowed.
class SearchSpaceError : public std::runtime_error {
 public:
  SearchSpaceError(double size, double cap);

  double size() const { return size_; }
  double cap() const { return cap_; }

 private:
  double size_;
  double cap_;
};

// A planted preference cannot keep the preferred assignment the unique
// maximum for the requested probability and domain size.
class DominanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An edge targets a device/function pair that declares no way to be
// triggered over the network.
class UnsatisfiableTriggerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace devsel

#endif  // DEVSEL_ERRORS_H_
