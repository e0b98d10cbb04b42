#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace seilab {

/// Sectioned key=value text. '#' and ';' start comments; keys before the
/// first [section] belong to section "". Every lookup error names the source,
/// line and field.
class KvConfig {
public:
    static KvConfig parse(const std::string& text, const std::string& source = "<config>");
    static KvConfig load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> raw(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key, const std::string& def) const;
    std::string require_string(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key, long long def) const;
    std::uint64_t require_u64(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double def) const;
    bool get_bool(const std::string& section, const std::string& key, bool def) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& def) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                      const std::vector<std::string>& def) const;

    /// Throws ConfigError on the first key not listed for its section.
    void reject_unknown(const std::map<std::string, std::set<std::string>>& allowed) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const;
    const Entry* find(const std::string& section, const std::string& key) const;

    std::string source_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace seilab
