#include "toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace fvpnet::toml_lite {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= s.size(); }
  char peek() const { return done() ? '\0' : s[pos]; }
  char get() {
    const char c = s[pos++];
    if (c == '\n') ++line;
    return c;
  }

  // whitespace, newlines and comments (only where arrays allow them)
  void skip_space(bool newlines) {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        get();
      } else if (c == '\n' && newlines) {
        get();
      } else if (c == '#') {
        while (!done() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }
};

class ParseError {
 public:
  ParseError(int line, std::string message) : line(line), message(std::move(message)) {}
  int line;
  std::string message;
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

Value parse_value(Cursor& c, bool in_array);

std::string parse_string(Cursor& c) {
  const int start_line = c.line;
  c.get();  // opening quote
  std::string out;
  while (true) {
    if (c.done() || c.peek() == '\n') throw ParseError(start_line, "unterminated string");
    const char ch = c.get();
    if (ch == '"') break;
    if (ch != '\\') {
      out.push_back(ch);
      continue;
    }
    if (c.done()) throw ParseError(start_line, "unterminated escape");
    const char esc = c.get();
    switch (esc) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      default: throw ParseError(start_line, std::string("unsupported escape \\") + esc);
    }
  }
  return out;
}

Value parse_scalar_token(Cursor& c) {
  Value v;
  v.line = c.line;
  std::string token;
  while (!c.done()) {
    const char ch = c.peek();
    if (ch == ',' || ch == ']' || ch == '#' || ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') break;
    token.push_back(c.get());
  }
  if (token.empty()) throw ParseError(c.line, "expected a value");
  if (token == "true" || token == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = token == "true";
    return v;
  }
  std::string digits;
  for (char ch : token)
    if (ch != '_') digits.push_back(ch);
  v.kind = Value::Kind::Number;
  if (digits == "inf" || digits == "+inf") {
    v.number = std::numeric_limits<double>::infinity();
    return v;
  }
  if (digits == "-inf") {
    v.number = -std::numeric_limits<double>::infinity();
    return v;
  }
  if (digits == "nan" || digits == "+nan" || digits == "-nan") {
    v.number = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  const char* first = digits.data();
  const char* last = digits.data() + digits.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v.number);
  if (ec != std::errc() || ptr != last) throw ParseError(v.line, "invalid value '" + token + "'");
  v.integral = digits.find_first_of(".eE") == std::string::npos;
  return v;
}

Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::Array;
  v.line = c.line;
  c.get();  // '['
  while (true) {
    c.skip_space(true);
    if (c.done()) throw ParseError(v.line, "unterminated array");
    if (c.peek() == ']') {
      c.get();
      return v;
    }
    v.items.push_back(parse_value(c, true));
    c.skip_space(true);
    if (c.peek() == ',') {
      c.get();
      continue;
    }
    if (c.peek() == ']') {
      c.get();
      return v;
    }
    throw ParseError(c.line, "expected ',' or ']' in array");
  }
}

Value parse_value(Cursor& c, bool in_array) {
  c.skip_space(in_array);
  if (c.done()) throw ParseError(c.line, "expected a value");
  const char ch = c.peek();
  if (ch == '"') {
    Value v;
    v.kind = Value::Kind::String;
    v.line = c.line;
    v.text = parse_string(c);
    return v;
  }
  if (ch == '[') return parse_array(c);
  if (ch == '{') throw ParseError(c.line, "inline tables are not supported");
  return parse_scalar_token(c);
}

void skip_to_line_end(Cursor& c) {
  while (!c.done() && c.peek() != '\n') c.get();
  if (!c.done()) c.get();
}

}  // namespace

const char* kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::String: return "string";
    case Value::Kind::Number: return "number";
    case Value::Kind::Bool: return "boolean";
    case Value::Kind::Array: return "array";
  }
  return "?";
}

Document parse(const std::string& text) {
  Document doc;
  Cursor c{text};
  std::string table;
  while (true) {
    c.skip_space(true);
    if (c.done()) break;
    const int line = c.line;
    try {
      if (c.peek() == '[') {
        c.get();
        std::string name;
        while (!c.done() && c.peek() != ']' && c.peek() != '\n') name.push_back(c.get());
        if (c.peek() != ']') throw ParseError(line, "unterminated table header");
        c.get();
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.erase(name.begin());
        if (name.empty()) throw ParseError(line, "empty table name");
        for (char ch : name)
          if (!is_bare_key_char(ch) && ch != '.') throw ParseError(line, "invalid table name '" + name + "'");
        table = name;
        c.skip_space(false);
        if (!c.done() && c.peek() != '\n') throw ParseError(line, "unexpected text after table header");
        continue;
      }
      std::string key;
      while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.get());
      if (key.empty()) throw ParseError(line, "expected a key");
      c.skip_space(false);
      if (c.peek() != '=') throw ParseError(line, "expected '=' after key '" + key + "'");
      c.get();
      Value v = parse_value(c, false);
      v.line = line;
      c.skip_space(false);
      if (!c.done() && c.peek() != '\n') throw ParseError(c.line, "unexpected text after value");
      const std::string full = table.empty() ? key : table + "." + key;
      if (!doc.entries.emplace(full, std::move(v)).second) throw ParseError(line, "duplicate key '" + full + "'");
    } catch (const ParseError& e) {
      doc.issues.push_back({e.line, e.message});
      skip_to_line_end(c);
    }
  }
  return doc;
}

}  // namespace fvpnet::toml_lite
