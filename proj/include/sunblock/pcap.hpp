#pragma once

// Classic (non-ng) pcap reader and writer for Ethernet captures.

#include <sunblock/packet.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sunblock {

class CaptureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CaptureResult {
    std::vector<Packet> packets;
    std::size_t truncated = 0;     // trailing partial record (reading stopped)
    std::size_t malformed = 0;     // IPv4 frames whose headers could not be decoded
    std::size_t skipped_non_ip = 0;
    std::size_t skipped_ipv6 = 0;

    std::size_t warnings() const { return truncated + malformed; }
};

namespace pcap_detail {

inline constexpr std::uint32_t kMagicMicro = 0xa1b2c3d4;
inline constexpr std::uint32_t kMagicNano = 0xa1b23c4d;
inline constexpr std::uint32_t kLinkEthernet = 1;
inline constexpr std::uint32_t kSnapLen = 262144;
inline constexpr std::size_t kGlobalHeader = 24;
inline constexpr std::size_t kRecordHeader = 16;

inline std::uint32_t rd32(const std::uint8_t* p, bool swap) {
    return swap ? (std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3])
                : (std::uint32_t{p[3]} << 24 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[1]} << 8 | p[0]);
}

inline std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }
inline std::uint32_t be32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
}

inline void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_be16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}
inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint16_t inet_checksum(std::span<const std::uint8_t> bytes) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) sum += static_cast<std::uint32_t>(bytes[i] << 8 | bytes[i + 1]);
    if (bytes.size() % 2) sum += static_cast<std::uint32_t>(bytes.back() << 8);
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum);
}

enum class FrameStatus { ok, non_ip, ipv6, malformed };

// Decodes one Ethernet frame; `frame` holds the captured bytes only.
inline FrameStatus decode_frame(std::span<const std::uint8_t> frame, Packet& out) {
    if (frame.size() < kEthernetHeader) return FrameStatus::malformed;
    std::size_t off = 12;
    std::uint16_t ethertype = be16(&frame[off]);
    off += 2;
    while (ethertype == 0x8100 || ethertype == 0x88a8) {  // VLAN tags
        if (frame.size() < off + 4) return FrameStatus::malformed;
        ethertype = be16(&frame[off + 2]);
        off += 4;
    }
    if (ethertype == 0x86dd) return FrameStatus::ipv6;
    if (ethertype != 0x0800) return FrameStatus::non_ip;

    const auto ip = frame.subspan(off);
    if (ip.size() < kIpv4Header || (ip[0] >> 4) != 4) return FrameStatus::malformed;
    const std::size_t ihl = std::size_t{ip[0] & 0x0fu} * 4;
    if (ihl < kIpv4Header || ip.size() < ihl) return FrameStatus::malformed;
    const std::size_t total_len = be16(&ip[2]);
    // Trailing Ethernet padding is not part of the datagram.
    const std::size_t ip_end = total_len >= ihl ? std::min(ip.size(), total_len) : ip.size();
    const bool later_fragment = (be16(&ip[6]) & 0x1fff) != 0;
    out.src_ip = Ipv4Addr{be32(&ip[12])};
    out.dst_ip = Ipv4Addr{be32(&ip[16])};
    out.src_port = out.dst_port = 0;
    out.tcp_flags = {};
    out.icmp_type = 0;

    std::size_t l4_len = 0;
    switch (later_fragment ? 0 : ip[9]) {
        case 6: {
            if (ip_end < ihl + 20) return FrameStatus::malformed;
            const std::size_t doff = std::size_t{static_cast<std::uint8_t>(ip[ihl + 12] >> 4)} * 4;
            if (doff < 20 || ip_end < ihl + doff) return FrameStatus::malformed;
            out.protocol = Protocol::TCP;
            out.src_port = be16(&ip[ihl]);
            out.dst_port = be16(&ip[ihl + 2]);
            out.tcp_flags = TcpFlags(ip[ihl + 13]);
            l4_len = doff;
            break;
        }
        case 17:
            if (ip_end < ihl + 8) return FrameStatus::malformed;
            out.protocol = Protocol::UDP;
            out.src_port = be16(&ip[ihl]);
            out.dst_port = be16(&ip[ihl + 2]);
            l4_len = 8;
            break;
        case 1:
            if (ip_end < ihl + 8) return FrameStatus::malformed;
            out.protocol = Protocol::ICMP;
            out.icmp_type = ip[ihl];
            l4_len = 8;
            break;
        default:
            out.protocol = Protocol::OTHER;
            break;
    }
    out.payload.assign(ip.begin() + static_cast<std::ptrdiff_t>(ihl + l4_len),
                       ip.begin() + static_cast<std::ptrdiff_t>(ip_end));
    return FrameStatus::ok;
}

inline void encode_frame(const Packet& p, std::vector<std::uint8_t>& out) {
    static constexpr std::uint8_t kDstMac[6] = {0x02, 0, 0, 0, 0, 0x01};
    static constexpr std::uint8_t kSrcMac[6] = {0x02, 0, 0, 0, 0, 0x02};
    out.insert(out.end(), std::begin(kDstMac), std::end(kDstMac));
    out.insert(out.end(), std::begin(kSrcMac), std::end(kSrcMac));
    put_be16(out, 0x0800);

    const std::size_t ip_start = out.size();
    const std::size_t wire_ip_len = p.length > kEthernetHeader ? p.length - kEthernetHeader : 0;
    out.push_back(0x45);
    out.push_back(0);
    put_be16(out, static_cast<std::uint16_t>(std::min<std::size_t>(wire_ip_len, 0xffff)));
    put_be16(out, 0);       // id
    put_be16(out, 0x4000);  // DF
    out.push_back(64);
    out.push_back(ip_proto_number(p.protocol));
    put_be16(out, 0);  // checksum, patched below
    put_be32(out, p.src_ip.value());
    put_be32(out, p.dst_ip.value());
    const std::uint16_t csum = inet_checksum(std::span(out).subspan(ip_start, kIpv4Header));
    out[ip_start + 10] = static_cast<std::uint8_t>(csum >> 8);
    out[ip_start + 11] = static_cast<std::uint8_t>(csum);

    const std::size_t l4_wire = wire_ip_len > kIpv4Header ? wire_ip_len - kIpv4Header : 0;
    switch (p.protocol) {
        case Protocol::TCP:
            put_be16(out, p.src_port);
            put_be16(out, p.dst_port);
            put_be32(out, 0);
            put_be32(out, 0);
            out.push_back(0x50);
            out.push_back(p.tcp_flags.bits());
            put_be16(out, 0xffff);
            put_be16(out, 0);
            put_be16(out, 0);
            break;
        case Protocol::UDP:
            put_be16(out, p.src_port);
            put_be16(out, p.dst_port);
            put_be16(out, static_cast<std::uint16_t>(std::min<std::size_t>(l4_wire, 0xffff)));
            put_be16(out, 0);
            break;
        case Protocol::ICMP:
            out.push_back(p.icmp_type);
            out.push_back(0);
            put_be16(out, 0);
            put_be32(out, 0);
            break;
        case Protocol::OTHER:
            break;
    }
    out.insert(out.end(), p.payload.begin(), p.payload.end());
}

}  // namespace pcap_detail

// Decodes an in-memory capture. Never throws once the global header is valid.
inline CaptureResult decode_capture(std::span<const std::uint8_t> data) {
    using namespace pcap_detail;
    if (data.size() < kGlobalHeader) throw CaptureError("unreadable capture: global header too short");
    const std::uint32_t magic_le = rd32(data.data(), false);
    bool swap = false;
    bool nanos = false;
    if (magic_le == kMagicMicro || magic_le == kMagicNano) {
        nanos = magic_le == kMagicNano;
    } else if (rd32(data.data(), true) == kMagicMicro || rd32(data.data(), true) == kMagicNano) {
        swap = true;
        nanos = rd32(data.data(), true) == kMagicNano;
    } else {
        throw CaptureError("unreadable capture: bad magic");
    }
    const std::uint32_t link = rd32(data.data() + 20, swap) & 0x0fffffff;
    if (link != kLinkEthernet) throw CaptureError("unreadable capture: link type " + std::to_string(link) + " is not Ethernet");

    CaptureResult result;
    std::size_t off = kGlobalHeader;
    while (off < data.size()) {
        if (data.size() - off < kRecordHeader) {
            ++result.truncated;
            break;
        }
        const std::uint8_t* rh = data.data() + off;
        const std::uint32_t sec = rd32(rh, swap);
        const std::uint32_t frac = rd32(rh + 4, swap);
        const std::uint32_t incl = rd32(rh + 8, swap);
        const std::uint32_t orig = rd32(rh + 12, swap);
        off += kRecordHeader;
        if (incl > kSnapLen || incl > data.size() - off) {
            ++result.truncated;
            break;
        }
        const auto frame = data.subspan(off, incl);
        off += incl;

        Packet p;
        p.ts = at_micros(std::int64_t{sec} * 1000000 + (nanos ? frac / 1000 : frac));
        p.length = std::max(orig, incl);
        switch (decode_frame(frame, p)) {
            case FrameStatus::ok: result.packets.push_back(std::move(p)); break;
            case FrameStatus::non_ip: ++result.skipped_non_ip; break;
            case FrameStatus::ipv6: ++result.skipped_ipv6; break;
            case FrameStatus::malformed: ++result.malformed; break;
        }
    }
    return result;
}

inline CaptureResult read_capture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CaptureError("unreadable capture: cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_capture(data);
}

inline std::vector<std::uint8_t> encode_capture(std::span<const Packet> packets) {
    using namespace pcap_detail;
    std::vector<std::uint8_t> out;
    put_le32(out, kMagicMicro);
    put_le16(out, 2);
    put_le16(out, 4);
    put_le32(out, 0);
    put_le32(out, 0);
    put_le32(out, kSnapLen);
    put_le32(out, kLinkEthernet);
    std::vector<std::uint8_t> frame;
    for (const Packet& p : packets) {
        if (auto why = packet_violation(p); !why.empty())
            throw std::invalid_argument("cannot encode packet: " + why);
        if (micros(p.ts) < 0) throw std::invalid_argument("cannot encode packet: negative timestamp");
        frame.clear();
        encode_frame(p, frame);
        const std::int64_t us = micros(p.ts);
        put_le32(out, static_cast<std::uint32_t>(us / 1000000));
        put_le32(out, static_cast<std::uint32_t>(us % 1000000));
        put_le32(out, static_cast<std::uint32_t>(frame.size()));
        put_le32(out, std::max<std::uint32_t>(p.length, static_cast<std::uint32_t>(frame.size())));
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

inline void write_capture(const std::filesystem::path& path, std::span<const Packet> packets) {
    const auto bytes = encode_capture(packets);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CaptureError("cannot write capture: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CaptureError("cannot write capture: " + path.string());
}

}  // namespace sunblock
