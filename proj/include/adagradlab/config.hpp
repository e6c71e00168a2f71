#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "adagradlab/common.hpp"

namespace adagradlab::config {

/// One configuration value: string, number, or array of numbers.
using Value = std::variant<std::string, double, std::vector<double>>;

/// Flat view of a parsed config file: section -> key -> value. Nested
/// table headers like [a.b] become the section name "a.b".
struct Document {
  std::map<std::string, std::map<std::string, Value>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const Value& get(const std::string& section, const std::string& key) const;
};

/// Parses the key/value format with [section] and [section.sub] headers,
/// '#' comments, quoted strings, numbers, and arrays of numbers.
Document parse(const std::string& text);
Document parse_file(const std::string& path);

/// Typed accessors; throw ConfigError on a missing key or a wrong type.
std::string get_string(const Document& doc, const std::string& section, const std::string& key);
double get_number(const Document& doc, const std::string& section, const std::string& key);
std::vector<double> get_array(const Document& doc, const std::string& section,
                              const std::string& key);

}  // namespace adagradlab::config
