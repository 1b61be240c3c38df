#ifndef DEVSEL_SRC_JSON_UTIL_H_
#define DEVSEL_SRC_JSON_UTIL_H_

// Internal helpers for reading JSON documents with path-annotated errors.

#include <filesystem>
#include <string>
#include <string_view>

#include "devsel/errors.h"
#include "json.hpp"

namespace devsel::internal {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] inline void Fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

inline Json ParseDocument(std::string_view text, const char* kind) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string(kind) + " document is not valid JSON: " +
                     e.what());
  }
}

std::string ReadFile(const std::filesystem::path& path);

inline const Json& Require(const Json& obj, const char* key,
                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(path, std::string("missing required key \"") + key + "\"");
  return *it;
}

inline void ExpectObject(const Json& j, const std::string& path) {
  if (!j.is_object()) Fail(path, "expected an object");
}

inline void ExpectArray(const Json& j, const std::string& path) {
  if (!j.is_array()) Fail(path, "expected an array");
}

inline std::string GetString(const Json& j, const std::string& path) {
  if (!j.is_string()) Fail(path, "expected a string");
  return j.get<std::string>();
}

inline double GetNumber(const Json& j, const std::string& path) {
  if (!j.is_number()) Fail(path, "expected a number");
  return j.get<double>();
}

inline long long GetInteger(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) Fail(path, "expected an integer");
  return j.get<long long>();
}

// Rejects keys outside `allowed` so typos surface instead of being ignored.
inline void RejectUnknownKeys(const Json& obj,
                              std::initializer_list<std::string_view> allowed,
                              const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto key : allowed) known = known || it.key() == key;
    if (!known) Fail(path, "unknown key \"" + it.key() + "\"");
  }
}

}  // namespace devsel::internal

#endif  // DEVSEL_SRC_JSON_UTIL_H_
