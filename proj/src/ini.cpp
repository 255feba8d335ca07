#include "fastlim/ini.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace fastlim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

} // namespace

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header '" + t + "'");
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (name.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      auto it = doc.sections_.find(name);
      if (it != doc.sections_.end()) {
        throw ConfigError("line " + std::to_string(lineno) + ": duplicate section [" + name +
                          "] (first defined at line " + std::to_string(it->second.line) + ")");
      }
      doc.sections_[name].line = lineno;
      doc.section_order_.push_back(name);
      current = name;
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
    }
    if (current.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    Section& sec = doc.sections_[current];
    auto it = sec.entries.find(key);
    if (it != sec.entries.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in [" +
                        current + "] (first set at line " + std::to_string(it->second.line) + ")");
    }
    sec.entries[key] = Entry{value, lineno};
    sec.order.push_back(key);
  }
  return doc;
}

bool IniDocument::has(const std::string& s, const std::string& k) const {
  auto it = sections_.find(s);
  return it != sections_.end() && it->second.entries.count(k) != 0;
}

const IniDocument::Entry* IniDocument::find(const std::string& s, const std::string& k) const {
  auto it = sections_.find(s);
  if (it == sections_.end()) return nullptr;
  auto e = it->second.entries.find(k);
  return e == it->second.entries.end() ? nullptr : &e->second;
}

std::vector<std::string> IniDocument::section_names() const { return section_order_; }

std::vector<std::string> IniDocument::keys(const std::string& s) const {
  auto it = sections_.find(s);
  return it == sections_.end() ? std::vector<std::string>{} : it->second.order;
}

int IniDocument::section_line(const std::string& s) const {
  auto it = sections_.find(s);
  return it == sections_.end() ? 0 : it->second.line;
}

const IniDocument::Entry& ConfigReader::require(const std::string& sec, const std::string& key) {
  const IniDocument::Entry* e = doc_.find(sec, key);
  if (!e) throw ConfigError("missing required key '" + key + "' in section [" + sec + "]");
  consumed_.insert({sec, key});
  return *e;
}

void ConfigReader::fail_at(const std::string& sec, const std::string& key,
                           const std::string& why) const {
  const IniDocument::Entry* e = doc_.find(sec, key);
  const std::string where = e ? " (line " + std::to_string(e->line) + ")" : "";
  throw ConfigError(sec + "." + key + where + ": " + why);
}

std::string ConfigReader::get_string(const std::string& sec, const std::string& key) {
  return require(sec, key).value;
}

std::string ConfigReader::get_string(const std::string& sec, const std::string& key,
                                     const std::string& dflt) {
  if (!doc_.has(sec, key)) return dflt;
  return require(sec, key).value;
}

double ConfigReader::get_double(const std::string& sec, const std::string& key) {
  const IniDocument::Entry& e = require(sec, key);
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0') {
    throw ConfigError(sec + "." + key + " (line " + std::to_string(e.line) +
                      "): expected a number, got '" + e.value + "'");
  }
  return v;
}

double ConfigReader::get_double(const std::string& sec, const std::string& key, double dflt) {
  if (!doc_.has(sec, key)) return dflt;
  return get_double(sec, key);
}

long long ConfigReader::get_int(const std::string& sec, const std::string& key, long long dflt) {
  if (!doc_.has(sec, key)) return dflt;
  const IniDocument::Entry& e = require(sec, key);
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0') {
    throw ConfigError(sec + "." + key + " (line " + std::to_string(e.line) +
                      "): expected an integer, got '" + e.value + "'");
  }
  return v;
}

bool ConfigReader::get_bool(const std::string& sec, const std::string& key, bool dflt) {
  if (!doc_.has(sec, key)) return dflt;
  const IniDocument::Entry& e = require(sec, key);
  if (e.value == "true" || e.value == "on" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "off" || e.value == "no" || e.value == "0") return false;
  throw ConfigError(sec + "." + key + " (line " + std::to_string(e.line) +
                    "): expected a boolean, got '" + e.value + "'");
}

std::vector<double> ConfigReader::get_double_list(const std::string& sec, const std::string& key) {
  const IniDocument::Entry& e = require(sec, key);
  std::vector<double> out;
  std::istringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') {
      throw ConfigError(sec + "." + key + " (line " + std::to_string(e.line) +
                        "): malformed list element '" + t + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw ConfigError(sec + "." + key + " (line " + std::to_string(e.line) + "): empty list");
  }
  return out;
}

void ConfigReader::finish() const {
  for (const std::string& sec : doc_.section_names()) {
    if (!allowed_sections_.count(sec)) {
      throw ConfigError("unknown section [" + sec + "] at line " +
                        std::to_string(doc_.section_line(sec)));
    }
    for (const std::string& key : doc_.keys(sec)) {
      if (!consumed_.count({sec, key})) {
        throw ConfigError("unknown key '" + key + "' in [" + sec + "] at line " +
                          std::to_string(doc_.find(sec, key)->line));
      }
    }
  }
}

} // namespace fastlim
