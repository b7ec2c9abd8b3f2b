#pragma once
#include <map>
#include <string>
#include <vector>

namespace cablefem {

// Line-oriented `key = value` file with '#' comments. Key order is preserved
// for serialization; lookups keep the file name so errors cite their source.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_string(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;           // ParseError if absent
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  std::string serialize() const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
  std::string origin_;
};

// Shared CSV helpers: header-checked reader that skips '#' comment lines and
// blank lines, splitting on commas with surrounding whitespace trimmed.
std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::vector<std::string>& expect_header);
std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
double parse_double(const std::string& s, const std::string& context);

}  // namespace cablefem
