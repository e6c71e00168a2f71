#include "adagradlab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace adagradlab::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a '#' comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& tok, int line_no) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ConfigError("config line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  return v;
}

Value parse_value(const std::string& raw, int line_no) {
  if (raw.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
    return raw.substr(1, raw.size() - 2);
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
    std::vector<double> vals;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) {
        if (vals.empty() && trim(inner).empty()) break;  // empty array
        throw ConfigError("config line " + std::to_string(line_no) + ": empty array element");
      }
      vals.push_back(parse_number(tok, line_no));
    }
    return vals;
  }
  return parse_number(raw, line_no);
}

}  // namespace

bool Document::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

const Value& Document::get(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end()) throw ConfigError("config: missing section [" + section + "]");
  auto jt = it->second.find(key);
  if (jt == it->second.end())
    throw ConfigError("config: missing key '" + key + "' in [" + section + "]");
  return jt->second;
}

Document parse(const std::string& text) {
  Document doc;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      doc.sections[section];  // sections may legally be empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (doc.sections[section].count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    doc.sections[section][key] = parse_value(raw, line_no);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string get_string(const Document& doc, const std::string& section, const std::string& key) {
  const Value& v = doc.get(section, key);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("config: key '" + key + "' in [" + section + "] must be a string");
}

double get_number(const Document& doc, const std::string& section, const std::string& key) {
  const Value& v = doc.get(section, key);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigError("config: key '" + key + "' in [" + section + "] must be a number");
}

std::vector<double> get_array(const Document& doc, const std::string& section,
                              const std::string& key) {
  const Value& v = doc.get(section, key);
  if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
  if (const auto* d = std::get_if<double>(&v)) return {*d};  // scalar promotes to length-1
  throw ConfigError("config: key '" + key + "' in [" + section + "] must be an array");
}

}  // namespace adagradlab::config
