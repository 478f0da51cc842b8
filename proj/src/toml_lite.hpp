#pragma once

// Minimal reader for the TOML subset used by scenario files: [tables],
// `key = value` lines, strings, numbers, booleans and (nested, possibly
// multi-line) arrays. Inline tables, dates and dotted keys are not supported.

#include <map>
#include <string>
#include <vector>

namespace fvpnet::toml_lite {

struct Value {
  enum class Kind { String, Number, Bool, Array };
  Kind kind = Kind::Number;
  std::string text;  // String payload
  double number = 0.0;
  bool integral = false;  // written without '.', 'e' or 'inf'/'nan'
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

struct ParseIssue {
  int line = 0;
  std::string message;
};

struct Document {
  /// Fully qualified keys, e.g. "algo.beta".
  std::map<std::string, Value> entries;
  std::vector<ParseIssue> issues;
};

Document parse(const std::string& text);

const char* kind_name(Value::Kind kind);

}  // namespace fvpnet::toml_lite
