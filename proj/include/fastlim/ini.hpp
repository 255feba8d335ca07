#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastlim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// INI-style structured text: [section] headers, key = value lines, and
// full-line comments starting with '#' or ';'. Duplicate sections or keys
// are errors that report both line numbers; so are keys before any section.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static IniDocument parse(const std::string& text);

  bool has_section(const std::string& s) const { return sections_.count(s) != 0; }
  bool has(const std::string& s, const std::string& k) const;
  const Entry* find(const std::string& s, const std::string& k) const;
  std::vector<std::string> section_names() const;
  std::vector<std::string> keys(const std::string& s) const;
  int section_line(const std::string& s) const;

 private:
  struct Section {
    int line = 0;
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
  };
  std::map<std::string, Section> sections_;
  std::vector<std::string> section_order_;
};

// Typed, consumption-tracking view over an IniDocument. Every key read is
// marked consumed; finish() turns anything left over into an unknown-key
// error so typos cannot be silently absorbed.
class ConfigReader {
 public:
  explicit ConfigReader(IniDocument doc) : doc_(std::move(doc)) {}

  bool has(const std::string& sec, const std::string& key) const { return doc_.has(sec, key); }
  bool has_section(const std::string& sec) const { return doc_.has_section(sec); }

  std::string get_string(const std::string& sec, const std::string& key);
  std::string get_string(const std::string& sec, const std::string& key, const std::string& dflt);
  double get_double(const std::string& sec, const std::string& key);
  double get_double(const std::string& sec, const std::string& key, double dflt);
  long long get_int(const std::string& sec, const std::string& key, long long dflt);
  bool get_bool(const std::string& sec, const std::string& key, bool dflt);
  std::vector<double> get_double_list(const std::string& sec, const std::string& key);

  void allow_section(const std::string& sec) { allowed_sections_.insert(sec); }
  // Throws ConfigError on unconsumed keys or unknown sections.
  void finish() const;

  [[noreturn]] void fail_at(const std::string& sec, const std::string& key,
                            const std::string& why) const;

 private:
  const IniDocument::Entry& require(const std::string& sec, const std::string& key);
  IniDocument doc_;
  std::set<std::pair<std::string, std::string>> consumed_;
  std::set<std::string> allowed_sections_;
};

} // namespace fastlim
