#pragma once

// Rule language: a strict subset of the community IDS rule grammar.
//
//   action proto src_addr src_port dir dst_addr dst_port (option; option; ...)
//
// action   alert | drop
// proto    tcp | udp | icmp | ip
// addr     any | [!]a.b.c.d[/n] | [!]$VAR | [!][cidr,cidr,...]
// port     any | n | a:b
// dir      -> | <>
// options  msg:"..."; sid:n; rev:n; content:"..."; nocase; flags:[+*!]FSRPAU0;
//          detection_filter: track by_src|by_dst, count n, seconds s;
//          scan_filter: track by_src|by_dst, distinct dst_ports|flag_probes, count n, seconds s;

#include <sunblock/events.hpp>
#include <sunblock/packet.hpp>
#include <sunblock/time.hpp>

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sunblock {

enum class RuleAction : std::uint8_t { alert, drop };
enum class RuleProtocol : std::uint8_t { tcp, udp, icmp, ip };
enum class Direction : std::uint8_t { forward, both };
enum class Track : std::uint8_t { by_src, by_dst };
enum class DistinctKind : std::uint8_t { dst_ports, flag_probes };

inline constexpr std::string_view to_string(RuleAction a) { return a == RuleAction::drop ? "drop" : "alert"; }
inline constexpr std::string_view to_string(Track t) { return t == Track::by_src ? "by_src" : "by_dst"; }
inline constexpr std::string_view to_string(DistinctKind d) {
    return d == DistinctKind::dst_ports ? "dst_ports" : "flag_probes";
}
inline constexpr std::string_view to_string(RuleProtocol p) {
    switch (p) {
        case RuleProtocol::tcp: return "tcp";
        case RuleProtocol::udp: return "udp";
        case RuleProtocol::icmp: return "icmp";
        case RuleProtocol::ip: break;
    }
    return "ip";
}

struct AddrSpec {
    enum class Kind : std::uint8_t { any, literal, variable };
    Kind kind = Kind::any;
    bool negated = false;
    std::string var;           // variable name without '$'
    std::vector<Cidr> cidrs;   // literal list or resolved variable
    bool cidrs_negated = false;  // set when the variable itself is a negation

    static AddrSpec any() { return {}; }
    static AddrSpec list(std::vector<Cidr> cidrs, bool negate = false) {
        AddrSpec a;
        a.kind = Kind::literal;
        a.cidrs = std::move(cidrs);
        a.cidrs_negated = negate;
        return a;
    }

    bool matches(Ipv4Addr addr) const {
        if (kind == Kind::any) return !negated;
        bool in = false;
        for (const Cidr& c : cidrs) in = in || c.contains(addr);
        if (cidrs_negated) in = !in;
        return negated ? !in : in;
    }

    std::string to_string() const {
        std::string s = negated ? "!" : "";
        switch (kind) {
            case Kind::any: return s + "any";
            case Kind::variable: return s + "$" + var;
            case Kind::literal: break;
        }
        if (cidrs.size() == 1) return s + cidrs.front().to_string();
        s += '[';
        for (std::size_t i = 0; i < cidrs.size(); ++i) s += (i ? "," : "") + cidrs[i].to_string();
        return s + ']';
    }

    friend bool operator==(const AddrSpec&, const AddrSpec&) = default;
};

struct PortSpec {
    bool any = true;
    std::uint16_t lo = 0;
    std::uint16_t hi = 65535;

    static PortSpec exactly(std::uint16_t p) { return {false, p, p}; }
    static PortSpec range(std::uint16_t a, std::uint16_t b) { return {false, a, b}; }

    bool matches(std::uint16_t port) const { return any || (port >= lo && port <= hi); }

    std::string to_string() const {
        if (any) return "any";
        if (lo == hi) return std::to_string(lo);
        return std::to_string(lo) + ':' + std::to_string(hi);
    }

    friend bool operator==(const PortSpec&, const PortSpec&) = default;
};

struct ContentMatch {
    std::string bytes;
    bool nocase = false;
    friend bool operator==(const ContentMatch&, const ContentMatch&) = default;
};

struct FlagMatch {
    enum class Mode : std::uint8_t { exact, all_plus_any, any_of, none_of };
    std::uint8_t mask = 0;
    Mode mode = Mode::exact;

    bool matches(TcpFlags f) const {
        switch (mode) {
            case Mode::exact: return f.bits() == mask;
            case Mode::all_plus_any: return (f.bits() & mask) == mask;
            case Mode::any_of: return (f.bits() & mask) != 0;
            case Mode::none_of: return (f.bits() & mask) == 0;
        }
        return false;
    }

    friend bool operator==(const FlagMatch&, const FlagMatch&) = default;
};

struct DetectionFilter {
    Track track = Track::by_src;
    std::uint32_t count = 1;
    Duration seconds{1000000};
    friend bool operator==(const DetectionFilter&, const DetectionFilter&) = default;
};

struct ScanFilter {
    Track track = Track::by_src;
    DistinctKind distinct = DistinctKind::dst_ports;
    std::uint32_t count = 1;
    Duration seconds{1000000};
    friend bool operator==(const ScanFilter&, const ScanFilter&) = default;
};

struct Rule {
    RuleAction action = RuleAction::alert;
    RuleProtocol protocol = RuleProtocol::ip;
    AddrSpec src_addr;
    PortSpec src_port;
    Direction direction = Direction::forward;
    AddrSpec dst_addr;
    PortSpec dst_port;

    std::string msg;
    std::uint32_t sid = 0;
    std::optional<std::uint32_t> rev;
    std::vector<ContentMatch> contents;
    std::optional<FlagMatch> flags;
    std::optional<DetectionFilter> detection;
    std::optional<ScanFilter> scan;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
    std::vector<Rule> rules;
    std::size_t size() const { return rules.size(); }
    friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

// Named address variables. EXTERNAL_NET defaults to the complement of HOME_NET.
struct VarBindings {
    std::map<std::string, AddrSpec, std::less<>> vars;

    static VarBindings for_home_net(std::vector<Cidr> home) {
        VarBindings b;
        b.vars["HOME_NET"] = AddrSpec::list(home);
        b.vars["EXTERNAL_NET"] = AddrSpec::list(std::move(home), true);
        return b;
    }

    static VarBindings defaults() {
        return for_home_net({Cidr::parse("10.0.0.0/8"), Cidr::parse("172.16.0.0/12"), Cidr::parse("192.168.0.0/16")});
    }
};

class RuleSyntaxError : public std::runtime_error {
public:
    RuleSyntaxError(std::size_t line, std::size_t column, std::string token, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                             message + (token.empty() ? "" : " at '" + token + "'")),
          line_(line), column_(column), token_(std::move(token)) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& token() const { return token_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

class RuleSetError : public std::runtime_error {
public:
    explicit RuleSetError(std::vector<std::string> diagnostics)
        : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<std::string>& d) {
        std::string s = "rule set has " + std::to_string(d.size()) + " error(s)";
        for (const auto& x : d) s += "\n  " + x;
        return s;
    }
    std::vector<std::string> diagnostics_;
};

namespace rule_detail {

class Parser {
public:
    Parser(std::string_view text, std::size_t line, const VarBindings& vars) : s_(text), line_(line), vars_(vars) {}

    Rule parse() {
        Rule r;
        r.action = parse_action();
        r.protocol = parse_protocol();
        r.src_addr = parse_addr();
        r.src_port = parse_port();
        r.direction = parse_direction();
        r.dst_addr = parse_addr();
        r.dst_port = parse_port();
        skip_ws();
        if (at_end() || s_[pos_] != '(') fail(pos_, peek_token(), "expected '(' to open rule options");
        ++pos_;
        parse_options(r);
        skip_ws();
        if (!at_end()) fail(pos_, peek_token(), "unexpected text after rule options");
        validate(r);
        return r;
    }

private:
    [[noreturn]] void fail(std::size_t at, std::string token, const std::string& msg) const {
        throw RuleSyntaxError(line_, at + 1, std::move(token), msg);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    void skip_ws() {
        while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }

    std::string peek_token() const {
        std::size_t e = pos_;
        while (e < s_.size() && s_[e] != ' ' && s_[e] != '\t') ++e;
        return std::string(s_.substr(pos_, e - pos_));
    }

    // Header token: runs to whitespace or '('.
    std::pair<std::string_view, std::size_t> next_token(const char* what) {
        skip_ws();
        const std::size_t start = pos_;
        while (!at_end() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '(') ++pos_;
        if (start == pos_) fail(start, peek_token(), std::string("missing ") + what);
        return {s_.substr(start, pos_ - start), start};
    }

    RuleAction parse_action() {
        auto [tok, at] = next_token("action");
        if (tok == "alert") return RuleAction::alert;
        if (tok == "drop") return RuleAction::drop;
        fail(at, std::string(tok), "unknown action");
    }

    RuleProtocol parse_protocol() {
        auto [tok, at] = next_token("protocol");
        if (tok == "tcp") return RuleProtocol::tcp;
        if (tok == "udp") return RuleProtocol::udp;
        if (tok == "icmp") return RuleProtocol::icmp;
        if (tok == "ip") return RuleProtocol::ip;
        fail(at, std::string(tok), "unknown protocol");
    }

    Direction parse_direction() {
        auto [tok, at] = next_token("direction");
        if (tok == "->") return Direction::forward;
        if (tok == "<>") return Direction::both;
        fail(at, std::string(tok), "expected '->' or '<>'");
    }

    AddrSpec parse_addr() {
        auto [tok, at] = next_token("address");
        AddrSpec a;
        std::string_view body = tok;
        if (body == "any") return a;
        if (!body.empty() && body.front() == '!') {
            a.negated = true;
            body.remove_prefix(1);
        }
        if (body == "any") fail(at, std::string(tok), "'!any' matches nothing");
        if (!body.empty() && body.front() == '$') {
            a.kind = AddrSpec::Kind::variable;
            a.var = std::string(body.substr(1));
            auto it = vars_.vars.find(a.var);
            if (it == vars_.vars.end()) fail(at, std::string(tok), "undefined variable");
            if (it->second.kind == AddrSpec::Kind::any) {
                a.cidrs = {Cidr{Ipv4Addr{}, 0}};
                a.cidrs_negated = it->second.negated;
            } else {
                a.cidrs = it->second.cidrs;
                a.cidrs_negated = it->second.cidrs_negated != it->second.negated;
            }
            return a;
        }
        a.kind = AddrSpec::Kind::literal;
        if (!body.empty() && body.front() == '[') {
            if (body.back() != ']' || body.size() < 3) fail(at, std::string(tok), "malformed address list");
            body = body.substr(1, body.size() - 2);
            while (!body.empty()) {
                const auto comma = body.find(',');
                const auto item = body.substr(0, comma);
                Cidr c;
                if (!Cidr::try_parse(item, c)) fail(at, std::string(item), "invalid CIDR");
                a.cidrs.push_back(c);
                if (comma == std::string_view::npos) break;
                body.remove_prefix(comma + 1);
                if (body.empty()) fail(at, std::string(tok), "trailing comma in address list");
            }
            return a;
        }
        Cidr c;
        if (!Cidr::try_parse(body, c)) fail(at, std::string(tok), "invalid address or CIDR");
        a.cidrs.push_back(c);
        return a;
    }

    static bool parse_u16(std::string_view s, std::uint16_t& out) {
        unsigned v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || v > 65535) return false;
        out = static_cast<std::uint16_t>(v);
        return true;
    }

    PortSpec parse_port() {
        auto [tok, at] = next_token("port");
        if (tok == "any") return {};
        PortSpec p;
        p.any = false;
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) {
            if (!parse_u16(tok, p.lo)) fail(at, std::string(tok), "invalid port");
            p.hi = p.lo;
            return p;
        }
        if (!parse_u16(tok.substr(0, colon), p.lo) || !parse_u16(tok.substr(colon + 1), p.hi))
            fail(at, std::string(tok), "invalid port range");
        if (p.lo > p.hi) fail(at, std::string(tok), "port range has low > high");
        return p;
    }

    struct RawOption {
        std::string keyword;
        std::string_view value;  // raw, untrimmed
        std::size_t keyword_at = 0;
        std::size_t value_at = 0;
        bool has_value = false;
    };

    RawOption next_option() {
        RawOption o;
        o.keyword_at = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        o.keyword = std::string(s_.substr(o.keyword_at, pos_ - o.keyword_at));
        if (o.keyword.empty()) fail(o.keyword_at, peek_token(), "expected option keyword");
        skip_ws();
        if (!at_end() && s_[pos_] == ':') {
            ++pos_;
            o.has_value = true;
            o.value_at = pos_;
            bool quoted = false;
            while (!at_end()) {
                const char c = s_[pos_];
                if (c == '\\' && pos_ + 1 < s_.size()) {
                    pos_ += 2;
                    continue;
                }
                if (c == '"') quoted = !quoted;
                if (c == ';' && !quoted) break;
                ++pos_;
            }
            if (quoted) fail(o.value_at, std::string(s_.substr(o.value_at)), "unterminated quoted string");
            o.value = s_.substr(o.value_at, pos_ - o.value_at);
        }
        if (at_end() || s_[pos_] != ';') fail(pos_, peek_token(), "expected ';' after option '" + o.keyword + "'");
        ++pos_;
        return o;
    }

    static std::string_view trim(std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    }

    std::string quoted(const RawOption& o, bool allow_hex) {
        std::string_view v = trim(o.value);
        if (v.size() < 2 || v.front() != '"' || v.back() != '"')
            fail(o.value_at, std::string(v), "expected quoted string for '" + o.keyword + "'");
        v = v.substr(1, v.size() - 2);
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const char c = v[i];
            if (c == '\\') {
                if (i + 1 >= v.size()) fail(o.value_at, std::string(v), "dangling escape");
                out += v[++i];
            } else if (c == '|' && allow_hex) {
                const auto close = v.find('|', i + 1);
                if (close == std::string_view::npos) fail(o.value_at, std::string(v), "unterminated hex block");
                std::string_view hex = v.substr(i + 1, close - i - 1);
                std::string digits;
                for (char h : hex)
                    if (h != ' ') digits += h;
                if (digits.size() % 2) fail(o.value_at, std::string(hex), "odd number of hex digits");
                for (std::size_t k = 0; k < digits.size(); k += 2) {
                    unsigned byte = 0;
                    auto [p, ec] = std::from_chars(digits.data() + k, digits.data() + k + 2, byte, 16);
                    if (ec != std::errc{} || p != digits.data() + k + 2)
                        fail(o.value_at, std::string(hex), "invalid hex digit");
                    out += static_cast<char>(byte);
                }
                i = close;
            } else if (c == '"' || (c == ';')) {
                fail(o.value_at, std::string(v), "unescaped quote or ';' inside string");
            } else {
                out += c;
            }
        }
        return out;
    }

    std::uint32_t positive_int(std::string_view v, std::size_t at, const std::string& what) {
        v = trim(v);
        std::uint32_t n = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
        if (ec != std::errc{} || p != v.data() + v.size() || v.empty() || n == 0)
            fail(at, std::string(v), what + " must be a positive integer");
        return n;
    }

    Duration positive_seconds(std::string_view v, std::size_t at) {
        v = trim(v);
        double d = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
        if (ec != std::errc{} || p != v.data() + v.size() || v.empty() || !(d > 0))
            fail(at, std::string(v), "seconds must be a positive number");
        const Duration out = seconds_to_duration(d);
        if (out.count() <= 0) fail(at, std::string(v), "seconds below microsecond resolution");
        return out;
    }

    // Splits "track by_dst, count 100, seconds 1" into keyword/argument pairs.
    std::map<std::string, std::string, std::less<>> filter_fields(const RawOption& o,
                                                                  std::initializer_list<std::string_view> allowed) {
        std::map<std::string, std::string, std::less<>> fields;
        std::string_view rest = o.value;
        while (true) {
            const auto comma = rest.find(',');
            const auto part = trim(rest.substr(0, comma));
            const auto space = part.find_first_of(" \t");
            if (space == std::string_view::npos)
                fail(o.value_at, std::string(part), "expected '<field> <value>' in " + o.keyword);
            const std::string key(part.substr(0, space));
            const std::string val(trim(part.substr(space)));
            bool ok = false;
            for (auto a : allowed) ok = ok || a == key;
            if (!ok) fail(o.value_at, key, "unknown " + o.keyword + " field");
            if (!fields.emplace(key, val).second) fail(o.value_at, key, "duplicate " + o.keyword + " field");
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        for (auto a : allowed)
            if (!fields.contains(a)) fail(o.value_at, std::string(o.value), o.keyword + " requires '" + std::string(a) + "'");
        return fields;
    }

    Track parse_track(const std::string& v, std::size_t at) {
        if (v == "by_src") return Track::by_src;
        if (v == "by_dst") return Track::by_dst;
        fail(at, v, "track must be by_src or by_dst");
    }

    void parse_options(Rule& r) {
        bool seen_msg = false;
        bool seen_sid = false;
        while (true) {
            skip_ws();
            if (at_end()) fail(pos_, "", "unterminated option list, expected ')'");
            if (s_[pos_] == ')') {
                ++pos_;
                break;
            }
            RawOption o = next_option();
            auto once = [&](bool already) {
                if (already) fail(o.keyword_at, o.keyword, "duplicate option");
            };
            auto need_value = [&] {
                if (!o.has_value) fail(o.keyword_at, o.keyword, "option requires a value");
            };
            if (o.keyword == "msg") {
                once(seen_msg);
                need_value();
                r.msg = quoted(o, false);
                seen_msg = true;
            } else if (o.keyword == "sid") {
                once(seen_sid);
                need_value();
                r.sid = positive_int(o.value, o.value_at, "sid");
                seen_sid = true;
            } else if (o.keyword == "rev") {
                once(r.rev.has_value());
                need_value();
                r.rev = positive_int(o.value, o.value_at, "rev");
            } else if (o.keyword == "content") {
                need_value();
                ContentMatch c{quoted(o, true), false};
                if (c.bytes.empty()) fail(o.value_at, std::string(o.value), "empty content");
                r.contents.push_back(std::move(c));
            } else if (o.keyword == "nocase") {
                if (o.has_value) fail(o.value_at, std::string(o.value), "nocase takes no value");
                if (r.contents.empty()) fail(o.keyword_at, o.keyword, "nocase must follow a content option");
                if (r.contents.back().nocase) fail(o.keyword_at, o.keyword, "duplicate option");
                r.contents.back().nocase = true;
            } else if (o.keyword == "flags") {
                once(r.flags.has_value());
                need_value();
                r.flags = parse_flags(o);
            } else if (o.keyword == "detection_filter") {
                once(r.detection.has_value());
                need_value();
                auto f = filter_fields(o, {"track", "count", "seconds"});
                r.detection = DetectionFilter{parse_track(f["track"], o.value_at),
                                              positive_int(f["count"], o.value_at, "count"),
                                              positive_seconds(f["seconds"], o.value_at)};
            } else if (o.keyword == "scan_filter") {
                once(r.scan.has_value());
                need_value();
                auto f = filter_fields(o, {"track", "distinct", "count", "seconds"});
                ScanFilter sf;
                sf.track = parse_track(f["track"], o.value_at);
                if (f["distinct"] == "dst_ports")
                    sf.distinct = DistinctKind::dst_ports;
                else if (f["distinct"] == "flag_probes")
                    sf.distinct = DistinctKind::flag_probes;
                else
                    fail(o.value_at, f["distinct"], "distinct must be dst_ports or flag_probes");
                sf.count = positive_int(f["count"], o.value_at, "count");
                sf.seconds = positive_seconds(f["seconds"], o.value_at);
                r.scan = sf;
            } else {
                fail(o.keyword_at, o.keyword, "unknown option keyword");
            }
        }
        if (!seen_msg) fail(0, "", "rule is missing the msg option");
        if (!seen_sid) fail(0, "", "rule is missing the sid option");
    }

    FlagMatch parse_flags(const RawOption& o) {
        std::string_view v = trim(o.value);
        FlagMatch f;
        if (!v.empty()) {
            switch (v.front()) {
                case '+': f.mode = FlagMatch::Mode::all_plus_any; v.remove_prefix(1); break;
                case '*': f.mode = FlagMatch::Mode::any_of; v.remove_prefix(1); break;
                case '!': f.mode = FlagMatch::Mode::none_of; v.remove_prefix(1); break;
                default: break;
            }
        }
        if (v.empty()) fail(o.value_at, std::string(o.value), "empty flags pattern");
        if (v == "0") {
            if (f.mode != FlagMatch::Mode::exact) fail(o.value_at, std::string(o.value), "'0' takes no modifier");
            return f;
        }
        for (char c : v) {
            std::uint8_t bit = 0;
            switch (c) {
                case 'F': bit = TcpFlags::FIN; break;
                case 'S': bit = TcpFlags::SYN; break;
                case 'R': bit = TcpFlags::RST; break;
                case 'P': bit = TcpFlags::PSH; break;
                case 'A': bit = TcpFlags::ACK; break;
                case 'U': bit = TcpFlags::URG; break;
                default: fail(o.value_at, std::string(1, c), "unknown TCP flag letter");
            }
            if (f.mask & bit) fail(o.value_at, std::string(1, c), "repeated TCP flag letter");
            f.mask |= bit;
        }
        return f;
    }

    void validate(const Rule& r) const {
        const bool ported = r.protocol == RuleProtocol::tcp || r.protocol == RuleProtocol::udp;
        if (!ported && (!r.src_port.any || !r.dst_port.any))
            fail(0, std::string(to_string(r.protocol)), "port constraints need tcp or udp");
        if (r.flags && r.protocol != RuleProtocol::tcp)
            fail(0, std::string(to_string(r.protocol)), "flags option needs the tcp protocol");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
    const VarBindings& vars_;
};

inline std::string seconds_text(Duration d) {
    const auto us = d.count();
    if (us % 1000000 == 0) return std::to_string(us / 1000000);
    std::string s = std::to_string(us / 1000000) + '.';
    std::string frac = std::to_string(us % 1000000);
    s += std::string(6 - frac.size(), '0') + frac;
    while (s.back() == '0') s.pop_back();
    return s;
}

inline std::string quote(std::string_view bytes, bool hex_escapes) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out = "\"";
    for (unsigned char c : bytes) {
        const bool printable = c >= 0x20 && c < 0x7f;
        if (hex_escapes && (!printable || c == '|')) {
            out += '|';
            out += kHex[c >> 4];
            out += kHex[c & 15];
            out += '|';
        } else if (c == '"' || c == ';' || c == '\\') {
            out += '\\';
            out += static_cast<char>(c);
        } else {
            out += static_cast<char>(c);
        }
    }
    return out + '"';
}

}  // namespace rule_detail

inline Rule parse_rule(std::string_view line, const VarBindings& vars = VarBindings::defaults(),
                       std::size_t line_no = 1) {
    return rule_detail::Parser(line, line_no, vars).parse();
}

// Canonical text form; parse_rule(to_string(r)) == r.
inline std::string to_string(const Rule& r) {
    using rule_detail::quote;
    std::string s;
    s += to_string(r.action);
    s += ' ';
    s += to_string(r.protocol);
    s += ' ' + r.src_addr.to_string() + ' ' + r.src_port.to_string();
    s += r.direction == Direction::both ? " <> " : " -> ";
    s += r.dst_addr.to_string() + ' ' + r.dst_port.to_string() + " (msg:" + quote(r.msg, false) + ';';
    if (r.flags) {
        s += " flags:";
        switch (r.flags->mode) {
            case FlagMatch::Mode::all_plus_any: s += '+'; break;
            case FlagMatch::Mode::any_of: s += '*'; break;
            case FlagMatch::Mode::none_of: s += '!'; break;
            case FlagMatch::Mode::exact: break;
        }
        s += flags_to_string(TcpFlags(r.flags->mask)) + ';';
    }
    for (const auto& c : r.contents) {
        s += " content:" + quote(c.bytes, true) + ';';
        if (c.nocase) s += " nocase;";
    }
    if (r.detection)
        s += " detection_filter: track " + std::string(to_string(r.detection->track)) + ", count " +
             std::to_string(r.detection->count) + ", seconds " + rule_detail::seconds_text(r.detection->seconds) + ';';
    if (r.scan)
        s += " scan_filter: track " + std::string(to_string(r.scan->track)) + ", distinct " +
             std::string(to_string(r.scan->distinct)) + ", count " + std::to_string(r.scan->count) + ", seconds " +
             rule_detail::seconds_text(r.scan->seconds) + ';';
    s += " sid:" + std::to_string(r.sid) + ';';
    if (r.rev) s += " rev:" + std::to_string(*r.rev) + ';';
    return s + ')';
}

// Parses a rule file: one rule per line, '#' comments and blank lines ignored.
// All errors are collected before throwing RuleSetError.
inline RuleSet parse_ruleset(std::string_view text, const VarBindings& vars = VarBindings::defaults()) {
    RuleSet set;
    std::vector<std::string> errors;
    std::map<std::uint32_t, std::size_t> sid_line;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        try {
            Rule r = parse_rule(line, vars, line_no);
            if (auto [it, fresh] = sid_line.emplace(r.sid, line_no); !fresh) {
                errors.push_back("duplicate sid " + std::to_string(r.sid) + " on lines " + std::to_string(it->second) +
                                 " and " + std::to_string(line_no));
                continue;
            }
            set.rules.push_back(std::move(r));
        } catch (const RuleSyntaxError& e) {
            errors.emplace_back(e.what());
        }
    }
    if (!errors.empty()) throw RuleSetError(std::move(errors));
    return set;
}

struct RuleThresholds {
    struct Rate {
        std::uint32_t count;
        double seconds;
    };
    Rate syn_flood{100, 1};
    Rate udp_flood{200, 1};
    Rate dns_flood{150, 1};
    Rate http_flood{100, 1};
    Rate port_scan{20, 5};
    Rate os_scan{5, 5};
};

// Default protection rules; thresholds are substituted from `t`.
inline std::string builtin_rules_text(const RuleThresholds& t = {}) {
    auto rate = [](const RuleThresholds::Rate& r) {
        return "count " + std::to_string(r.count) + ", seconds " + rule_detail::seconds_text(seconds_to_duration(r.seconds));
    };
    std::ostringstream o;
    o << "# Built-in protection rules. Sids 10010xx..10017xx map to threat classes.\n"
      << "# Flooding\n"
      << "drop tcp any any -> $HOME_NET any (msg:\"SYN flood\"; flags:S; detection_filter: track by_dst, "
      << rate(t.syn_flood) << "; sid:1001001; rev:1;)\n"
      << "drop udp any any -> $HOME_NET any (msg:\"UDP flood\"; detection_filter: track by_dst, " << rate(t.udp_flood)
      << "; sid:1001101; rev:1;)\n"
      << "drop udp any any -> any 53 (msg:\"DNS flood\"; detection_filter: track by_src, " << rate(t.dns_flood)
      << "; sid:1001201; rev:1;)\n"
      << "drop tcp any any -> any 80 (msg:\"HTTP GET flood\"; content:\"GET\"; detection_filter: track by_dst, "
      << rate(t.http_flood) << "; sid:1001301; rev:1;)\n"
      << "drop tcp any any -> any 80 (msg:\"HTTP POST flood\"; content:\"POST\"; detection_filter: track by_dst, "
      << rate(t.http_flood) << "; sid:1001302; rev:1;)\n"
      << "# Scanning\n"
      << "drop tcp any any -> $HOME_NET any (msg:\"TCP port scan\"; flags:S; scan_filter: track by_src, distinct "
         "dst_ports, "
      << rate(t.port_scan) << "; sid:1001401; rev:1;)\n"
      << "drop ip any any -> any any (msg:\"OS fingerprint probes\"; scan_filter: track by_src, distinct flag_probes, "
      << rate(t.os_scan) << "; sid:1001501; rev:1;)\n"
      << "# Plaintext credentials over HTTP\n"
      << "drop tcp any any -> any 80 (msg:\"plaintext password\"; content:\"password=\"; nocase; sid:1001601; rev:1;)\n"
      << "drop tcp any any -> any 80 (msg:\"plaintext passwd\"; content:\"passwd\"; nocase; sid:1001602; rev:1;)\n"
      << "drop tcp any any -> any 80 (msg:\"HTTP basic credentials\"; content:\"Authorization: Basic\"; nocase; "
         "sid:1001603; rev:1;)\n"
      << "# Unencrypted web traffic leaving the home network\n"
      << "alert tcp $HOME_NET any -> $EXTERNAL_NET 80 (msg:\"unencrypted HTTP to WAN\"; sid:1001701; rev:1;)\n";
    return o.str();
}

}  // namespace sunblock
