#include "orbitgrasp/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orbitgrasp {

namespace {

std::string location(const std::string& key, int line) {
  std::string s;
  if (line > 0) s += "line " + std::to_string(line) + ": ";
  if (!key.empty()) s += "'" + key + "': ";
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

bool is_dotted_name(std::string_view s) {
  if (s.empty()) return false;
  size_t start = 0;
  while (true) {
    const size_t dot = s.find('.', start);
    if (!is_name(s.substr(start, dot == std::string_view::npos ? dot : dot - start))) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : Error(location(key, line) + message), key_(key), line_(line) {}

ConfigValue parse_config_value(std::string_view literal, int line) {
  const std::string_view s = trim(literal);
  ConfigValue v;
  v.line = line;
  v.text = std::string(s);
  if (s.empty()) throw ConfigError("", line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"' || s.substr(1, s.size() - 2).find('"') != std::string_view::npos) {
      throw ConfigError("", line, "unterminated string");
    }
    v.kind = ConfigValue::Kind::kString;
    v.text = std::string(s.substr(1, s.size() - 2));
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("", line, "unterminated array");
    v.kind = ConfigValue::Kind::kArray;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    if (body.empty()) return v;
    size_t start = 0;
    while (true) {
      const size_t comma = body.find(',', start);
      const std::string_view item =
          trim(body.substr(start, comma == std::string_view::npos ? comma : comma - start));
      double x = 0.0;
      if (!parse_number(item, x)) {
        throw ConfigError("", line, "array element '" + std::string(item) + "' is not a number");
      }
      if (!std::isfinite(x)) throw ConfigError("", line, "array element must be finite");
      v.array.push_back(x);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = ConfigValue::Kind::kBool;
    v.boolean = s == "true";
    return v;
  }
  double x = 0.0;
  if (parse_number(s, x)) {
    if (!std::isfinite(x)) throw ConfigError("", line, "number must be finite");
    v.kind = ConfigValue::Kind::kNumber;
    v.number = x;
    return v;
  }
  if (is_name(s) && !std::isdigit(static_cast<unsigned char>(s.front()))) {
    v.kind = ConfigValue::Kind::kString;
    return v;
  }
  throw ConfigError("", line, "cannot parse value '" + std::string(s) + "'");
}

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "malformed section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!is_dotted_name(name)) {
        throw ConfigError("", line_no, "invalid section name '" + std::string(name) + "'");
      }
      section = std::string(name);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    if (!is_dotted_name(key)) {
      throw ConfigError("", line_no, "invalid key '" + std::string(key) + "'");
    }
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.contains(full)) throw ConfigError(full, line_no, "duplicate key");
    try {
      doc.entries_[full] = parse_config_value(line.substr(eq + 1), line_no);
    } catch (const ConfigError& e) {
      throw ConfigError(full, line_no, std::string(e.what()).substr(location("", line_no).size()));
    }
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ConfigValue& ConfigDocument::at(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, 0, "missing required key");
  return it->second;
}

void ConfigDocument::set(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", 0, "override must look like KEY=VALUE");
  const std::string key(trim(std::string_view(assignment).substr(0, eq)));
  if (!is_dotted_name(key)) throw ConfigError(key, 0, "invalid override key");
  try {
    entries_[key] = parse_config_value(std::string_view(assignment).substr(eq + 1), 0);
  } catch (const ConfigError& e) {
    throw ConfigError(key, 0, e.what());
  }
}

std::string ConfigDocument::dump() const {
  std::ostringstream out;
  for (const auto& [key, v] : entries_) {
    out << key << " = ";
    switch (v.kind) {
      case ConfigValue::Kind::kNumber: out << format_number(v.number); break;
      case ConfigValue::Kind::kBool: out << (v.boolean ? "true" : "false"); break;
      case ConfigValue::Kind::kString: out << '"' << v.text << '"'; break;
      case ConfigValue::Kind::kArray:
        out << '[';
        for (size_t i = 0; i < v.array.size(); ++i) out << (i ? ", " : "") << format_number(v.array[i]);
        out << ']';
        break;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace orbitgrasp
