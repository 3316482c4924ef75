#ifndef EWG_TEXTCFG_HPP
#define EWG_TEXTCFG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ewg {

/// Minimal structured-text format: `key = value` lines grouped under
/// `[section]` headers, `#` comments, double quotes optional around values.
/// Keys before any section header live in the root section "". Duplicate keys
/// within a section and unterminated quotes are errors; consumers reject
/// unknown keys through require_known_keys.
class TextConfig {
 public:
  static TextConfig parse_string(const std::string& text, const std::string& origin = "<string>");
  static TextConfig parse_file(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  const std::string& require(const std::string& section, const std::string& key) const;

  double require_double(const std::string& section, const std::string& key) const;
  long require_int(const std::string& section, const std::string& key) const;

  /// Keys of a section in file order.
  std::vector<std::string> keys(const std::string& section) const;
  std::vector<std::string> section_names() const;

  /// Throws InputError naming the first key of `section` not in `allowed`.
  void require_known_keys(const std::string& section,
                          const std::vector<std::string>& allowed) const;
  /// Throws InputError naming the first section not in `allowed`.
  void require_known_sections(const std::vector<std::string>& allowed) const;

  const std::string& origin() const { return origin_; }

 private:
  struct Section {
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::map<std::string, Section> sections_;
  std::vector<std::string> section_order_;
  std::string origin_;
};

}  // namespace ewg

#endif
