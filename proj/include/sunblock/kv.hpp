#pragma once

// Flat key = value text with optional [section] headers. '#' starts a comment.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sunblock {

class KvError : public std::invalid_argument {
public:
    KvError(std::size_t line, const std::string& msg)
        : std::invalid_argument(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct KvEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct KvSection {
    std::string name;  // empty for the leading global block
    std::size_t line = 0;
    std::vector<KvEntry> entries;
};

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<KvSection> parse_kv(std::string_view text) {
    std::vector<KvSection> out(1);
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw KvError(line_no, "unterminated section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw KvError(line_no, "empty section name");
            out.push_back({std::string(name), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw KvError(line_no, "expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw KvError(line_no, "missing key");
        out.back().entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return out;
}

inline double kv_double(const KvEntry& e) {
    const std::string_view v = e.value;
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out))
        throw KvError(e.line, e.key + ": expected a number, got '" + e.value + "'");
    return out;
}

inline std::uint64_t kv_uint(const KvEntry& e, std::uint64_t max = std::numeric_limits<std::uint64_t>::max()) {
    const std::string_view v = e.value;
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || out > max)
        throw KvError(e.line, e.key + ": expected a non-negative integer, got '" + e.value + "'");
    return out;
}

inline bool kv_bool(const KvEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw KvError(e.line, e.key + ": expected true or false, got '" + e.value + "'");
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return out;
}

}  // namespace sunblock
