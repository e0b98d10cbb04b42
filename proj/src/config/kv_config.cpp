#include "seilab/config/kv_config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "seilab/common.hpp"

namespace seilab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::optional<double> to_double(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE) return std::nullopt;
    return v;
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text, const std::string& source) {
    KvConfig cfg;
    cfg.source_ = source;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where() + "unterminated section header '" + body + "'");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw ConfigError(where() + "empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + "expected key = value, got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError(where() + "missing key before '='");
        auto& sec = cfg.sections_[section];
        if (auto it = sec.find(key); it != sec.end())
            throw ConfigError(where() + "[" + section + "] " + key + " already set on line " +
                              std::to_string(it->second.line));
        sec[key] = {trim(body.substr(eq + 1)), lineno};
    }
    return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path + ": " + std::strerror(errno));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const KvConfig::Entry* KvConfig::find(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

void KvConfig::fail(const std::string& section, const std::string& key, const std::string& why) const {
    const auto* e = find(section, key);
    const std::string at = e ? source_ + ":" + std::to_string(e->line) + ": " : source_ + ": ";
    throw ConfigError(at + "[" + section + "] " + key + ": " + why);
}

bool KvConfig::has(const std::string& section, const std::string& key) const { return find(section, key); }

std::optional<std::string> KvConfig::raw(const std::string& section, const std::string& key) const {
    if (const auto* e = find(section, key)) return e->value;
    return std::nullopt;
}

std::string KvConfig::get_string(const std::string& section, const std::string& key, const std::string& def) const {
    return raw(section, key).value_or(def);
}

std::string KvConfig::require_string(const std::string& section, const std::string& key) const {
    const auto v = raw(section, key);
    if (!v || v->empty()) fail(section, key, "required field is missing");
    return *v;
}

long long KvConfig::get_int(const std::string& section, const std::string& key, long long def) const {
    const auto v = raw(section, key);
    if (!v) return def;
    long long out = 0;
    const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) fail(section, key, "expected an integer, got '" + *v + "'");
    return out;
}

std::uint64_t KvConfig::require_u64(const std::string& section, const std::string& key) const {
    const auto v = require_string(section, key);
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        fail(section, key, "expected a non-negative integer, got '" + v + "'");
    return out;
}

double KvConfig::get_double(const std::string& section, const std::string& key, double def) const {
    const auto v = raw(section, key);
    if (!v) return def;
    const auto d = to_double(*v);
    if (!d) fail(section, key, "expected a number, got '" + *v + "'");
    return *d;
}

bool KvConfig::get_bool(const std::string& section, const std::string& key, bool def) const {
    const auto v = raw(section, key);
    if (!v) return def;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    fail(section, key, "expected true or false, got '" + *v + "'");
}

std::vector<double> KvConfig::get_doubles(const std::string& section, const std::string& key,
                                          const std::vector<double>& def) const {
    const auto v = raw(section, key);
    if (!v) return def;
    std::vector<double> out;
    for (const auto& item : split_commas(*v)) {
        const auto d = to_double(item);
        if (!d) fail(section, key, "expected a comma-separated list of numbers, bad item '" + item + "'");
        out.push_back(*d);
    }
    if (out.empty()) fail(section, key, "list is empty");
    return out;
}

std::vector<std::string> KvConfig::get_list(const std::string& section, const std::string& key,
                                            const std::vector<std::string>& def) const {
    const auto v = raw(section, key);
    if (!v) return def;
    auto out = split_commas(*v);
    if (out.empty()) fail(section, key, "list is empty");
    return out;
}

void KvConfig::reject_unknown(const std::map<std::string, std::set<std::string>>& allowed) const {
    for (const auto& [sec, keys] : sections_) {
        auto a = allowed.find(sec);
        for (const auto& [key, entry] : keys)
            if (a == allowed.end() || !a->second.count(key))
                throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown field [" + sec + "] " + key);
        if (keys.empty() && a == allowed.end()) throw ConfigError(source_ + ": unknown section [" + sec + "]");
    }
}

void KvConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    auto& e = sections_[section][key];
    e.value = value;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace seilab
