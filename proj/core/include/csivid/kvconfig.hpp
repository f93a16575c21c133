// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace csivid {

/// Plain `key=value` configuration text. One pair per line, `#` starts a
/// comment, blank lines ignored, whitespace around keys and values trimmed.
class KvConfig {
  public:
    KvConfig() = default;

    static KvConfig parse(const std::string& text);
    static KvConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Serializes in sorted key order, `key=value` per line.
    std::string to_string() const;

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace csivid
