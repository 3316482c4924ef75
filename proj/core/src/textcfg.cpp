#include "ewg/textcfg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ewg/errors.hpp"

namespace ewg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

TextConfig TextConfig::parse_string(const std::string& text, const std::string& origin) {
  TextConfig cfg;
  cfg.origin_ = origin;
  cfg.sections_[""] = {};
  cfg.section_order_.push_back("");

  std::istringstream in(text);
  std::string raw;
  std::string current;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail("empty section name");
      if (cfg.sections_.count(name)) fail("duplicate section [" + name + "]");
      cfg.sections_[name] = {};
      cfg.section_order_.push_back(name);
      current = name;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    else if (!value.empty() && (value.front() == '"' || value.back() == '"'))
      fail("unterminated quote");
    auto& sec = cfg.sections_[current];
    for (const auto& [k, v] : sec.entries)
      if (k == key) fail("duplicate key '" + key + "'");
    sec.entries.emplace_back(key, value);
  }
  return cfg;
}

TextConfig TextConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

bool TextConfig::has_section(const std::string& section) const {
  auto it = sections_.find(section);
  return it != sections_.end() && (!section.empty() || !it->second.entries.empty());
}

bool TextConfig::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> TextConfig::get(const std::string& section,
                                           const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return std::nullopt;
  for (const auto& [k, v] : it->second.entries)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& TextConfig::require(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it != sections_.end()) {
    for (const auto& [k, v] : it->second.entries)
      if (k == key) return v;
  }
  throw InputError(origin_ + ": missing key '" + key + "'" +
                   (section.empty() ? "" : " in section [" + section + "]"));
}

double TextConfig::require_double(const std::string& section, const std::string& key) const {
  const std::string& s = require(section, key);
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError(origin_ + ": key '" + key + "' is not a number: " + s);
  }
  if (pos != s.size()) {
    // Allow exact rational syntax "p/q" for numeric keys.
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      try {
        double num = std::stod(s.substr(0, slash));
        double den = std::stod(s.substr(slash + 1));
        if (den == 0) throw InputError(origin_ + ": zero denominator in '" + s + "'");
        return num / den;
      } catch (const InputError&) {
        throw;
      } catch (const std::exception&) {
      }
    }
    throw InputError(origin_ + ": key '" + key + "' is not a number: " + s);
  }
  return v;
}

long TextConfig::require_int(const std::string& section, const std::string& key) const {
  const std::string& s = require(section, key);
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw InputError(origin_ + ": key '" + key + "' is not an integer: " + s);
  }
  if (pos != s.size())
    throw InputError(origin_ + ": key '" + key + "' is not an integer: " + s);
  return v;
}

std::vector<std::string> TextConfig::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  for (const auto& [k, v] : it->second.entries) out.push_back(k);
  return out;
}

std::vector<std::string> TextConfig::section_names() const {
  std::vector<std::string> out;
  for (const auto& name : section_order_)
    if (!name.empty()) out.push_back(name);
  return out;
}

void TextConfig::require_known_keys(const std::string& section,
                                    const std::vector<std::string>& allowed) const {
  for (const auto& key : keys(section)) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InputError(origin_ + ": unknown key '" + key + "'" +
                       (section.empty() ? "" : " in section [" + section + "]"));
  }
}

void TextConfig::require_known_sections(const std::vector<std::string>& allowed) const {
  for (const auto& name : section_names()) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      throw InputError(origin_ + ": unknown section [" + name + "]");
  }
}

}  // namespace ewg
