#pragma once

// Scenario file format (.cfg):
//
//   # comment                     (also allowed after a value)
//   controller = hierarchical     top-level key
//   [arm.3]                       section; keys below become "arm.3.<key>"
//   mass = 4.5                    number
//   name = "text"                 quoted string
//   epsilon = scheduled           bare word (read as a string)
//   enabled = true                boolean
//   axis = [0, 0, 1]              array of numbers on one line
//
// Keys and section names are [A-Za-z0-9_] segments joined by dots. A key may
// appear only once. Units are SI; angles are radians; quaternions are written
// scalar-first [w, x, y, z].

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "orbitgrasp/error.hpp"

namespace orbitgrasp {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct ConfigValue {
  enum class Kind { kNumber, kString, kBool, kArray };
  Kind kind = Kind::kNumber;
  double number = 0.0;
  std::string text;  // string payload, or the literal as written
  bool boolean = false;
  std::vector<double> array;
  int line = 0;  // 0 for command-line overrides
};

// Parses one value literal (the text right of '=').
ConfigValue parse_config_value(std::string_view literal, int line = 0);

class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text);
  static ConfigDocument load(const std::string& path);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  const ConfigValue& at(const std::string& key) const;
  const std::map<std::string, ConfigValue>& entries() const { return entries_; }

  // Inserts or replaces a key from a "KEY=VALUE" string.
  void set(const std::string& assignment);
  void set(const std::string& key, const ConfigValue& value) { entries_[key] = value; }
  void erase(const std::string& key) { entries_.erase(key); }

  // Renders back to the file format, one fully qualified key per line.
  std::string dump() const;

 private:
  std::map<std::string, ConfigValue> entries_;
};

}  // namespace orbitgrasp
