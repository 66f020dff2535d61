/**
 * @file config.hpp
 * @brief INI-style configuration: parsing, canonical emission, command-line
 *        overrides, content hashing and typed access.
 *
 * Files are line-oriented: `[section]` headers, `key = value` pairs, `#` or
 * `;` comments, blank lines ignored.  Keys are unique per section (later
 * assignments win).  Emission is canonical: sections and keys sorted, one
 * blank line between sections, so parse(emit(c)) == c and the content hash is
 * stable.  Typed getters record every key they touch; after loading, callers
 * can reject keys that were never consumed to catch misspelled options.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace srsim {

/// Error raised for malformed configuration input or values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// 64-bit FNV-1a hash of a byte string.
inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

/**
 * @brief Ordered key/value configuration grouped into sections.
 */
class Config {
 public:
  Config() = default;

  /// Parse INI text.  Throws ConfigError on malformed lines.
  static Config parse(const std::string& text) {
    Config cfg;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string line = (eol == std::string::npos)
                             ? text.substr(pos)
                             : text.substr(pos, eol - pos);
      pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
      ++line_no;
      std::size_t cut = line.find_first_of("#;");
      if (cut != std::string::npos) line = line.substr(0, cut);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) {
          throw ConfigError("line " + std::to_string(line_no) +
                            ": malformed section header");
        }
        section = detail::trim(line.substr(1, line.size() - 2));
        cfg.data_[section];  // ensure section exists even if empty
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": expected key = value");
      }
      std::string key = detail::trim(line.substr(0, eq));
      std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      }
      cfg.data_[section][key] = value;
    }
    return cfg;
  }

  /// Canonical text form: sorted sections and keys.
  std::string emit() const {
    std::string out;
    bool first = true;
    for (const auto& [section, entries] : data_) {
      if (!first) out += "\n";
      first = false;
      if (!section.empty()) out += "[" + section + "]\n";
      for (const auto& [key, value] : entries) {
        out += key + " = " + value + "\n";
      }
    }
    return out;
  }

  /// FNV-1a hash of the canonical text, as 16 hex digits.
  std::string content_hash() const {
    std::uint64_t h = fnv1a64(emit());
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = hex[h & 0xF];
      h >>= 4;
    }
    return s;
  }

  /// Apply a `section.key=value` override.  Throws ConfigError if malformed.
  void apply_override(const std::string& spec) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + spec + "': expected section.key=value");
    }
    std::string path = detail::trim(spec.substr(0, eq));
    std::string value = detail::trim(spec.substr(eq + 1));
    std::size_t dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= path.size()) {
      throw ConfigError("override '" + spec + "': expected section.key=value");
    }
    data_[path.substr(0, dot)][path.substr(dot + 1)] = value;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
  }

  /// Raw string lookup; marks the key consumed.
  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const {
    consumed_.insert(section + "." + key);
    auto s = data_.find(section);
    if (s == data_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ConfigError(section + "." + key + ": '" + *v + "' is not a number");
    }
  }

  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    long long out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) {
      throw ConfigError(section + "." + key + ": '" + *v +
                        "' is not an integer");
    }
    return out;
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError(section + "." + key + ": '" + *v + "' is not a boolean");
  }

  void set(const std::string& section, const std::string& key,
           const std::string& value) {
    data_[section][key] = value;
  }

  /// Keys present in the file that no getter ever touched.
  std::vector<std::string> unconsumed_keys() const {
    std::vector<std::string> out;
    for (const auto& [section, entries] : data_) {
      for (const auto& [key, value] : entries) {
        (void)value;
        if (consumed_.count(section + "." + key) == 0) {
          out.push_back(section + "." + key);
        }
      }
    }
    return out;
  }

  /// Reject unknown keys after all loaders have run.
  void require_all_consumed() const {
    auto leftover = unconsumed_keys();
    if (!leftover.empty()) {
      std::string msg = "unknown configuration key(s):";
      for (const auto& k : leftover) msg += " " + k;
      throw ConfigError(msg);
    }
  }

  bool operator==(const Config& other) const { return data_ == other.data_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
  mutable std::set<std::string> consumed_;
};

}  // namespace srsim
