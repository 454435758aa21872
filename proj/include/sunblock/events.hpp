#pragma once

#include <sunblock/packet.hpp>
#include <sunblock/time.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace sunblock {

enum class ThreatClass : std::uint8_t {
    SynFlood,
    UdpFlood,
    DnsFlood,
    HttpFlood,
    PortScan,
    OsScan,
    PiiLeak,
    PlainHttp,
    MlAnomaly,
};

inline constexpr std::array<std::string_view, 9> kThreatClassNames{
    "SynFlood", "UdpFlood", "DnsFlood", "HttpFlood", "PortScan", "OsScan", "PiiLeak", "PlainHttp", "MlAnomaly"};

inline constexpr std::string_view to_string(ThreatClass c) { return kThreatClassNames[static_cast<std::size_t>(c)]; }

inline std::optional<ThreatClass> parse_threat_class(std::string_view s) {
    for (std::size_t i = 0; i < kThreatClassNames.size(); ++i)
        if (kThreatClassNames[i] == s) return static_cast<ThreatClass>(i);
    return std::nullopt;
}

// Built-in sids are allocated in blocks of 100 per class starting at 1001000:
// 10010xx SynFlood, 10011xx UdpFlood, ... 10017xx PlainHttp.
inline constexpr std::uint32_t kBuiltinSidBase = 1001000;

inline constexpr std::optional<ThreatClass> threat_class_for_sid(std::uint32_t sid) {
    if (sid < kBuiltinSidBase) return std::nullopt;
    const std::uint32_t block = (sid - kBuiltinSidBase) / 100;
    if (block > static_cast<std::uint32_t>(ThreatClass::PlainHttp)) return std::nullopt;
    return static_cast<ThreatClass>(block);
}

enum class EventAction : std::uint8_t { alert, block };

inline constexpr std::string_view to_string(EventAction a) { return a == EventAction::block ? "block" : "alert"; }

struct ThreatEvent {
    Timestamp ts;
    ThreatClass threat_class = ThreatClass::MlAnomaly;
    Ipv4Addr source;
    std::string detail;
    EventAction action = EventAction::alert;

    friend bool operator==(const ThreatEvent&, const ThreatEvent&) = default;
};

// One tab-separated line: ts, threat_class, source, action, detail.
inline std::string format_event(const ThreatEvent& e) {
    std::string line = format_ts(e.ts);
    line += '\t';
    line += to_string(e.threat_class);
    line += '\t';
    line += e.source.to_string();
    line += '\t';
    line += to_string(e.action);
    line += '\t';
    line += e.detail;
    return line;
}

inline void write_event(std::ostream& out, const ThreatEvent& e) { out << format_event(e) << '\n' << std::flush; }

}  // namespace sunblock
