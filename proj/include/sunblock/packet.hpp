#pragma once

#include <sunblock/time.hpp>

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sunblock {

class Ipv4Addr {
public:
    constexpr Ipv4Addr() = default;
    constexpr explicit Ipv4Addr(std::uint32_t host_order) : value_(host_order) {}
    constexpr Ipv4Addr(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

    constexpr std::uint32_t value() const { return value_; }

    static bool try_parse(std::string_view s, Ipv4Addr& out) {
        std::uint32_t v = 0;
        const char* p = s.data();
        const char* end = s.data() + s.size();
        for (int octet = 0; octet < 4; ++octet) {
            unsigned part = 0;
            auto [next, ec] = std::from_chars(p, end, part);
            if (ec != std::errc{} || next == p || part > 255 || next - p > 3) return false;
            v = (v << 8) | part;
            p = next;
            if (octet < 3) {
                if (p == end || *p != '.') return false;
                ++p;
            }
        }
        if (p != end) return false;
        out = Ipv4Addr{v};
        return true;
    }

    static Ipv4Addr parse(std::string_view s) {
        Ipv4Addr a;
        if (!try_parse(s, a)) throw std::invalid_argument("invalid IPv4 address '" + std::string(s) + "'");
        return a;
    }

    std::string to_string() const {
        return std::to_string(value_ >> 24) + '.' + std::to_string((value_ >> 16) & 0xff) + '.' +
               std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
    }

    friend constexpr auto operator<=>(Ipv4Addr, Ipv4Addr) = default;

private:
    std::uint32_t value_ = 0;
};

struct Cidr {
    Ipv4Addr base;
    int prefix = 32;

    constexpr std::uint32_t mask() const { return prefix == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix); }
    constexpr bool contains(Ipv4Addr a) const { return (a.value() & mask()) == (base.value() & mask()); }

    // Accepts "a.b.c.d" (a /32) or "a.b.c.d/n". Host bits must be zero.
    static bool try_parse(std::string_view s, Cidr& out) {
        const auto slash = s.find('/');
        Cidr c;
        if (!Ipv4Addr::try_parse(s.substr(0, slash), c.base)) return false;
        if (slash != std::string_view::npos) {
            const auto bits = s.substr(slash + 1);
            int n = -1;
            auto [next, ec] = std::from_chars(bits.data(), bits.data() + bits.size(), n);
            if (ec != std::errc{} || next != bits.data() + bits.size() || n < 0 || n > 32) return false;
            c.prefix = n;
            if ((c.base.value() & ~c.mask()) != 0) return false;
        }
        out = c;
        return true;
    }

    static Cidr parse(std::string_view s) {
        Cidr c;
        if (!try_parse(s, c)) throw std::invalid_argument("invalid CIDR '" + std::string(s) + "'");
        return c;
    }

    std::string to_string() const {
        return prefix == 32 ? base.to_string() : base.to_string() + '/' + std::to_string(prefix);
    }

    friend constexpr bool operator==(const Cidr&, const Cidr&) = default;
};

enum class Protocol : std::uint8_t { TCP, UDP, ICMP, OTHER };

inline constexpr std::uint8_t ip_proto_number(Protocol p) {
    switch (p) {
        case Protocol::TCP: return 6;
        case Protocol::UDP: return 17;
        case Protocol::ICMP: return 1;
        case Protocol::OTHER: break;
    }
    return 255;
}

inline constexpr std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::TCP: return "tcp";
        case Protocol::UDP: return "udp";
        case Protocol::ICMP: return "icmp";
        case Protocol::OTHER: break;
    }
    return "other";
}

// TCP control bits, using the on-wire bit positions.
class TcpFlags {
public:
    enum Bit : std::uint8_t { FIN = 0x01, SYN = 0x02, RST = 0x04, PSH = 0x08, ACK = 0x10, URG = 0x20 };
    static constexpr std::uint8_t kAll = FIN | SYN | RST | PSH | ACK | URG;

    constexpr TcpFlags() = default;
    constexpr explicit TcpFlags(std::uint8_t bits) : bits_(bits & kAll) {}

    constexpr std::uint8_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool has(Bit b) const { return (bits_ & b) != 0; }
    constexpr TcpFlags operator|(TcpFlags o) const { return TcpFlags(bits_ | o.bits_); }

    friend constexpr bool operator==(TcpFlags, TcpFlags) = default;

private:
    std::uint8_t bits_ = 0;
};

inline constexpr TcpFlags kSyn{TcpFlags::SYN};
inline constexpr TcpFlags kPshAck{TcpFlags::PSH | TcpFlags::ACK};

inline std::string flags_to_string(TcpFlags f) {
    static constexpr std::array<std::pair<TcpFlags::Bit, char>, 6> kLetters{
        {{TcpFlags::FIN, 'F'}, {TcpFlags::SYN, 'S'}, {TcpFlags::RST, 'R'},
         {TcpFlags::PSH, 'P'}, {TcpFlags::ACK, 'A'}, {TcpFlags::URG, 'U'}}};
    std::string s;
    for (auto [bit, c] : kLetters)
        if (f.has(bit)) s += c;
    return s.empty() ? "0" : s;
}

inline constexpr std::size_t kEthernetHeader = 14;
inline constexpr std::size_t kIpv4Header = 20;

inline constexpr std::size_t l4_header_size(Protocol p) {
    switch (p) {
        case Protocol::TCP: return 20;
        case Protocol::UDP: return 8;
        case Protocol::ICMP: return 8;
        case Protocol::OTHER: break;
    }
    return 0;
}

inline constexpr std::size_t header_size(Protocol p) { return kEthernetHeader + kIpv4Header + l4_header_size(p); }

struct Packet {
    Timestamp ts;
    Ipv4Addr src_ip;
    Ipv4Addr dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::OTHER;
    TcpFlags tcp_flags;
    std::uint8_t icmp_type = 0;  // ICMP only; 8 = echo request
    std::vector<std::uint8_t> payload;
    // Bytes on the wire, Ethernet header included. May exceed the captured
    // headers + payload when the payload was not retained.
    std::uint32_t length = 0;

    std::string_view payload_view() const {
        return {reinterpret_cast<const char*>(payload.data()), payload.size()};
    }

    friend bool operator==(const Packet&, const Packet&) = default;
};

// Checks the structural invariants of a packet; returns an empty string when valid.
inline std::string packet_violation(const Packet& p) {
    const bool ported = p.protocol == Protocol::TCP || p.protocol == Protocol::UDP;
    if (!ported && (p.src_port != 0 || p.dst_port != 0)) return "ports set on portless protocol";
    if (p.protocol != Protocol::TCP && !p.tcp_flags.empty()) return "tcp flags on non-TCP packet";
    if (p.protocol != Protocol::ICMP && p.icmp_type != 0) return "icmp type on non-ICMP packet";
    if (p.length < header_size(p.protocol) + p.payload.size()) return "length below headers + payload";
    return {};
}

inline Packet make_packet(Timestamp ts, Protocol proto, Ipv4Addr src, std::uint16_t sport, Ipv4Addr dst,
                          std::uint16_t dport, TcpFlags flags = {}, std::vector<std::uint8_t> payload = {},
                          std::uint32_t extra_bytes = 0) {
    Packet p;
    p.ts = ts;
    p.protocol = proto;
    p.src_ip = src;
    p.dst_ip = dst;
    if (proto == Protocol::TCP || proto == Protocol::UDP) {
        p.src_port = sport;
        p.dst_port = dport;
    }
    if (proto == Protocol::TCP) p.tcp_flags = flags;
    p.length = static_cast<std::uint32_t>(header_size(proto) + payload.size() + extra_bytes);
    p.payload = std::move(payload);
    return p;
}

inline constexpr std::uint8_t kIcmpEchoRequest = 8;

inline Packet make_icmp(Timestamp ts, Ipv4Addr src, Ipv4Addr dst, std::uint8_t type,
                        std::vector<std::uint8_t> payload = {}) {
    Packet p = make_packet(ts, Protocol::ICMP, src, 0, dst, 0, {}, std::move(payload));
    p.icmp_type = type;
    return p;
}

inline std::vector<std::uint8_t> to_bytes(std::string_view s) { return {s.begin(), s.end()}; }

struct FiveTuple {
    Ipv4Addr src_ip;
    Ipv4Addr dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::OTHER;

    friend constexpr auto operator<=>(const FiveTuple&, const FiveTuple&) = default;

    std::string to_string() const {
        return src_ip.to_string() + ':' + std::to_string(src_port) + "->" + dst_ip.to_string() + ':' +
               std::to_string(dst_port) + '/' + std::string(protocol_name(protocol));
    }
};

inline constexpr FiveTuple five_tuple(const Packet& p) {
    return {p.src_ip, p.dst_ip, p.src_port, p.dst_port, p.protocol};
}

struct FiveTupleHash {
    std::size_t operator()(const FiveTuple& t) const noexcept {
        std::uint64_t h = (std::uint64_t{t.src_ip.value()} << 32) | t.dst_ip.value();
        h ^= (std::uint64_t{t.src_port} << 24 | std::uint64_t{t.dst_port} << 8 | static_cast<std::uint8_t>(t.protocol)) *
             0x9e3779b97f4a7c15ULL;
        h ^= h >> 29;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

}  // namespace sunblock

template <>
struct std::hash<sunblock::Ipv4Addr> {
    std::size_t operator()(sunblock::Ipv4Addr a) const noexcept { return std::hash<std::uint32_t>{}(a.value()); }
};
