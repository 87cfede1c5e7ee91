#ifndef CPOFDM_KV_CONFIG_HPP
#define CPOFDM_KV_CONFIG_HPP

// Sectioned key=value text:
//
//   # comment
//   [fig2]
//   axis = snr_db
//   values = -5, 0, 5
//
// Keys before the first section header land in the section named "".

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cpofdm/error.hpp"

namespace cpofdm {

class KvSection {
public:
    explicit KvSection(std::string name = {}) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

    const std::string& get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("[" + name_ + "] missing key '" + key + "'");
        return it->second;
    }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// Sections in file order.
inline std::vector<KvSection> parse_kv_sections(std::string_view text) {
    std::vector<KvSection> sections;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError("line " + std::to_string(lineno) + ": bad section header '" + line + "'");
            sections.emplace_back(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (sections.empty()) sections.emplace_back("");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        sections.back().set(key, trim(line.substr(eq + 1)));
    }
    return sections;
}

inline double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + s + "' is not a number");
    }
}

inline std::size_t parse_count(const std::string& key, const std::string& s) {
    std::size_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("key '" + key + "': '" + s + "' is not a non-negative integer");
    return v;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

} // namespace cpofdm

#endif // CPOFDM_KV_CONFIG_HPP
