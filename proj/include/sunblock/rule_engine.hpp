#pragma once

#include <sunblock/packet.hpp>
#include <sunblock/rules.hpp>
#include <sunblock/tracker.hpp>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sunblock {

enum class Decision : std::uint8_t { pass, drop };

struct RuleVerdict {
    std::uint32_t sid = 0;
    RuleAction action = RuleAction::alert;
    std::string msg;
    Timestamp matched_at;
    Ipv4Addr key;  // tracked address, or the packet source for unfiltered rules

    friend bool operator==(const RuleVerdict&, const RuleVerdict&) = default;
};

struct MatchResult {
    std::vector<RuleVerdict> verdicts;
    Decision decision = Decision::pass;
};

// detection_filter "count N" fires once more than N matches fall in the window.
inline std::size_t detection_threshold(const DetectionFilter& f) { return std::size_t{f.count} + 1; }
// scan_filter "count N" fires when N distinct values are live.
inline std::size_t scan_threshold(const ScanFilter& f) { return f.count; }

// Probe signature for OS fingerprinting: FIN-only, NULL and XMAS TCP segments
// and ICMP echo requests, keyed by target. Other packets are not probes.
inline std::optional<std::uint64_t> probe_signature(const Packet& p) {
    std::uint64_t kind = 0;
    if (p.protocol == Protocol::TCP) {
        const auto bits = p.tcp_flags.bits();
        if (bits == TcpFlags::FIN)
            kind = 1;
        else if (bits == 0)
            kind = 2;
        else if (bits == (TcpFlags::FIN | TcpFlags::PSH | TcpFlags::URG))
            kind = 3;
        else
            return std::nullopt;
        return kind << 48 | std::uint64_t{p.dst_ip.value()} << 16 | p.dst_port;
    }
    if (p.protocol == Protocol::ICMP && p.icmp_type == kIcmpEchoRequest)
        return std::uint64_t{4} << 48 | std::uint64_t{p.dst_ip.value()} << 16;
    return std::nullopt;
}

namespace engine_detail {

inline bool protocol_matches(RuleProtocol rp, Protocol p) {
    switch (rp) {
        case RuleProtocol::tcp: return p == Protocol::TCP;
        case RuleProtocol::udp: return p == Protocol::UDP;
        case RuleProtocol::icmp: return p == Protocol::ICMP;
        case RuleProtocol::ip: return true;
    }
    return false;
}

inline bool contains_bytes(std::string_view hay, std::string_view needle, bool nocase) {
    if (!nocase) return hay.find(needle) != std::string_view::npos;
    auto eq = [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    };
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), eq) != hay.end();
}

inline bool header_matches(const Rule& r, const Packet& p) {
    if (!protocol_matches(r.protocol, p.protocol)) return false;
    const bool forward = r.src_addr.matches(p.src_ip) && r.src_port.matches(p.src_port) &&
                         r.dst_addr.matches(p.dst_ip) && r.dst_port.matches(p.dst_port);
    if (forward) return true;
    return r.direction == Direction::both && r.src_addr.matches(p.dst_ip) && r.src_port.matches(p.dst_port) &&
           r.dst_addr.matches(p.src_ip) && r.dst_port.matches(p.src_port);
}

inline bool payload_matches(const Rule& r, const Packet& p) {
    if (r.flags && (p.protocol != Protocol::TCP || !r.flags->matches(p.tcp_flags))) return false;
    const auto payload = p.payload_view();
    return std::all_of(r.contents.begin(), r.contents.end(),
                       [&](const ContentMatch& c) { return contains_bytes(payload, c.bytes, c.nocase); });
}

}  // namespace engine_detail

// Evaluates every rule against one packet. Rules carrying a filter report a
// verdict only on the packet where their tracker crosses its threshold; with
// both filters present either crossing fires the rule.
inline MatchResult match_packet(const RuleSet& rules, TrackerTable& trackers, const Packet& p, Timestamp now) {
    MatchResult out;
    for (const Rule& r : rules.rules) {
        if (!engine_detail::header_matches(r, p) || !engine_detail::payload_matches(r, p)) continue;
        bool fired = !r.detection && !r.scan;
        Ipv4Addr key = p.src_ip;
        if (r.detection) {
            key = r.detection->track == Track::by_src ? p.src_ip : p.dst_ip;
            fired = trackers.note_event(r.sid, key, now, r.detection->seconds, detection_threshold(*r.detection)).fired;
        }
        if (r.scan) {
            std::optional<std::uint64_t> value;
            if (r.scan->distinct == DistinctKind::dst_ports)
                value = p.dst_port;
            else
                value = probe_signature(p);
            if (value) {
                const Ipv4Addr scan_key = r.scan->track == Track::by_src ? p.src_ip : p.dst_ip;
                if (trackers.note_distinct(r.sid, scan_key, *value, now, r.scan->seconds, scan_threshold(*r.scan)).fired) {
                    fired = true;
                    key = scan_key;
                }
            }
        }
        if (!fired) continue;
        out.verdicts.push_back({r.sid, r.action, r.msg, now, key});
        if (r.action == RuleAction::drop) out.decision = Decision::drop;
    }
    return out;
}

// A rule set plus the trackers it owns. Single caller.
class RuleSession {
public:
    RuleSession() = default;
    explicit RuleSession(RuleSet rules) : rules_(std::move(rules)) {}

    MatchResult inspect(const Packet& p) {
        auto r = match_packet(rules_, trackers_, p, p.ts);
        if (++since_prune_ >= kPruneEvery) {
            since_prune_ = 0;
            trackers_.prune(p.ts, [this](std::uint32_t sid) { return window_of(sid); });
        }
        return r;
    }

    void reset_trackers() { trackers_.clear(); }
    const RuleSet& rules() const { return rules_; }
    const TrackerTable& trackers() const { return trackers_; }

private:
    static constexpr std::size_t kPruneEvery = 65536;

    Duration window_of(std::uint32_t sid) const {
        Duration w{0};
        for (const Rule& r : rules_.rules) {
            if (r.sid != sid) continue;
            if (r.detection) w = std::max(w, r.detection->seconds);
            if (r.scan) w = std::max(w, r.scan->seconds);
        }
        return w;
    }

    RuleSet rules_;
    TrackerTable trackers_;
    std::size_t since_prune_ = 0;
};

}  // namespace sunblock
