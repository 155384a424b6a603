#pragma once

// `key = value` config files: '#' comments (outside double quotes), values
// optionally double-quoted.

#include <istream>
#include <string>
#include <vector>

#include "orderline/errors.hpp"
#include "text_util.hpp"

namespace orderline::kv {

struct Entry {
    int line;
    std::string key;
    std::string value;
};

inline std::vector<Entry> read(std::istream& in, const std::string& what) {
    std::vector<Entry> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.erase(i);
                break;
            }
        }
        if (text::trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(what + " line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string_view v = text::trim(std::string_view(line).substr(eq + 1));
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        out.push_back({line_no, std::string(text::trim(std::string_view(line).substr(0, eq))),
                       std::string(v)});
    }
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' must be a number, got '" + v + "'");
    }
}

inline long long to_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' must be an integer, got '" + v + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' must be true or false, got '" + v + "'");
}

}  // namespace orderline::kv
