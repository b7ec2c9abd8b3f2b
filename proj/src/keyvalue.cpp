#include "cablefem/keyvalue.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cablefem/errors.hpp"

namespace cablefem {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  std::string t = trim(s);
  if (t.empty()) throw ParseError(context + ": empty numeric field");
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size())
    throw ParseError(context + ": bad number '" + t + "'");
  return v;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

KeyValueFile KeyValueFile::parse_string(const std::string& text, const std::string& origin) {
  KeyValueFile f;
  f.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (f.index_.count(key))
      throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    f.index_[key] = f.entries_.size();
    f.entries_.emplace_back(key, val);
  }
  return f;
}

bool KeyValueFile::has(const std::string& key) const { return index_.count(key) != 0; }

const std::string& KeyValueFile::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end())
    throw ParseError(origin_ + ": missing required key '" + key + "'");
  return entries_[it->second].second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
  auto it = index_.find(key);
  return it == index_.end() ? fallback : entries_[it->second].second;
}

double KeyValueFile::get_double(const std::string& key) const {
  return parse_double(get(key), origin_ + ": key '" + key + "'");
}

int KeyValueFile::get_int(const std::string& key) const {
  double v = get_double(key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError(origin_ + ": key '" + key + "' is not an integer");
  return i;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
  } else {
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
  }
}

std::string KeyValueFile::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::vector<std::string>& expect_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::vector<std::string> fields = split(s, ',');
    for (auto& f : fields) f = trim(f);
    if (!header_seen) {
      if (fields != expect_header) {
        std::string want;
        for (const auto& h : expect_header) want += (want.empty() ? "" : ",") + h;
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad header, expected '" +
                         want + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != expect_header.size())
      throw ParseError(path + ":" + std::to_string(lineno) + ": wrong field count");
    rows.push_back(std::move(fields));
  }
  if (!header_seen) throw ParseError(path + ": missing header row");
  return rows;
}

}  // namespace cablefem
