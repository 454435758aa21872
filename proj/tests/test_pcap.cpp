#include <sunblock/pcap.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace sunblock;
using Bytes = std::vector<std::uint8_t>;

namespace {

// Fixture bytes are laid out by hand from the pcap and IPv4 header formats,
// independent of the library's encoder.
void le32(Bytes& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void be32(Bytes& b, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

Bytes global_header(bool big_endian = false) {
    Bytes b;
    auto w32 = [&](std::uint32_t v) { big_endian ? be32(b, v) : le32(b, v); };
    w32(0xA1B2C3D4);
    if (big_endian) b.insert(b.end(), {0, 2, 0, 4});
    else b.insert(b.end(), {2, 0, 4, 0});
    w32(0);
    w32(0);
    w32(65535);
    w32(1);
    return b;
}

void record(Bytes& b, std::uint32_t sec, std::uint32_t usec, const Bytes& frame, bool big_endian = false) {
    auto w32 = [&](std::uint32_t v) { big_endian ? be32(b, v) : le32(b, v); };
    w32(sec);
    w32(usec);
    w32(static_cast<std::uint32_t>(frame.size()));
    w32(static_cast<std::uint32_t>(frame.size()));
    b.insert(b.end(), frame.begin(), frame.end());
}

const Bytes kMacs = {0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0x02, 0x00, 0x00, 0x00, 0x00, 0x07};

Bytes arp_frame() {
    Bytes f = kMacs;
    f.insert(f.end(), {0x08, 0x06});
    f.insert(f.end(), {0x00, 0x01, 0x08, 0x00, 0x06, 0x04, 0x00, 0x01});
    f.insert(f.end(), {0x02, 0, 0, 0, 0, 0x07, 10, 0, 0, 2, 0, 0, 0, 0, 0, 0, 10, 0, 0, 1});
    return f;  // 42 bytes
}

Bytes tcp_syn_frame() {
    Bytes f = kMacs;
    f.insert(f.end(), {0x08, 0x00});
    // IPv4: ver/ihl, tos, total len 40, id, flags, ttl 64, proto 6, csum, src, dst
    f.insert(f.end(), {0x45, 0x00, 0x00, 0x28, 0x12, 0x34, 0x40, 0x00, 0x40, 0x06, 0x00, 0x00});
    f.insert(f.end(), {10, 0, 0, 2, 10, 0, 0, 1});
    // TCP: sport 40000 (0x9c40), dport 80, seq, ack, doff 5, flags SYN, window, csum, urg
    f.insert(f.end(), {0x9c, 0x40, 0x00, 0x50, 0, 0, 0, 1, 0, 0, 0, 0, 0x50, 0x02, 0x72, 0x10, 0, 0, 0, 0});
    return f;  // 54 bytes
}

Bytes udp_dns_frame() {
    Bytes f = kMacs;
    f.insert(f.end(), {0x08, 0x00});
    // total length 20 + 8 + 40 = 68 = 0x44, proto 17
    f.insert(f.end(), {0x45, 0x00, 0x00, 0x44, 0, 0, 0, 0, 0x40, 0x11, 0, 0});
    f.insert(f.end(), {10, 0, 0, 2, 10, 0, 0, 1});
    f.insert(f.end(), {0x14, 0xe9, 0x00, 0x35, 0x00, 0x30, 0, 0});  // 5353 -> 53, len 48
    for (int i = 0; i < 40; ++i) f.push_back(static_cast<std::uint8_t>('a' + i % 26));
    return f;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("sunblock_test_" + name);
}

Packet random_packet(std::mt19937_64& rng, Timestamp ts) {
    static constexpr Protocol kProtos[] = {Protocol::TCP, Protocol::UDP, Protocol::ICMP, Protocol::OTHER};
    const Protocol proto = kProtos[rng() % 4];
    Bytes payload(rng() % 64);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    Packet p = make_packet(ts, proto, Ipv4Addr(static_cast<std::uint32_t>(rng())), static_cast<std::uint16_t>(rng()),
                           Ipv4Addr(static_cast<std::uint32_t>(rng())), static_cast<std::uint16_t>(rng()),
                           TcpFlags(static_cast<std::uint8_t>(rng())), std::move(payload),
                           rng() % 3 == 0 ? static_cast<std::uint32_t>(rng() % 1400) : 0);
    if (proto == Protocol::ICMP) p.icmp_type = static_cast<std::uint8_t>(rng());
    return p;
}

}  // namespace

TEST(Pcap, DecodesUdpDatagram) {
    Bytes file = global_header();
    record(file, 1, 250000, udp_dns_frame());
    const auto r = decode_capture(file);
    ASSERT_EQ(r.packets.size(), 1u);
    const Packet& p = r.packets[0];
    EXPECT_EQ(p.protocol, Protocol::UDP);
    EXPECT_EQ(p.src_ip, Ipv4Addr::parse("10.0.0.2"));
    EXPECT_EQ(p.dst_ip, Ipv4Addr::parse("10.0.0.1"));
    EXPECT_EQ(p.src_port, 5353);
    EXPECT_EQ(p.dst_port, 53);
    EXPECT_EQ(p.payload.size(), 40u);
    EXPECT_EQ(micros(p.ts), 1250000);
    EXPECT_EQ(p.length, 82u);
    EXPECT_EQ(r.warnings(), 0u);
}

TEST(Pcap, EmptyCapture) {
    const auto r = decode_capture(global_header());
    EXPECT_TRUE(r.packets.empty());
    EXPECT_EQ(r.warnings(), 0u);

    const auto path = temp_file("empty.pcap");
    write_capture(path, std::vector<Packet>{});
    EXPECT_EQ(std::filesystem::file_size(path), 24u);
    EXPECT_TRUE(read_capture(path).packets.empty());
    std::filesystem::remove(path);
}

TEST(Pcap, SkipsArpKeepsSyn) {
    for (bool big : {false, true}) {
        Bytes file = global_header(big);
        record(file, 10, 0, arp_frame(), big);
        record(file, 10, 1, tcp_syn_frame(), big);
        const auto r = decode_capture(file);
        ASSERT_EQ(r.packets.size(), 1u);
        EXPECT_EQ(r.skipped_non_ip, 1u);
        const Packet& p = r.packets[0];
        EXPECT_EQ(p.protocol, Protocol::TCP);
        EXPECT_EQ(p.tcp_flags, kSyn);
        EXPECT_EQ(p.src_port, 40000);
        EXPECT_EQ(p.dst_port, 80);
        EXPECT_TRUE(p.payload.empty());
        EXPECT_EQ(micros(p.ts), 10000001);
    }
}

TEST(Pcap, SkipsIpv6) {
    Bytes frame = kMacs;
    frame.insert(frame.end(), {0x86, 0xdd});
    frame.resize(14 + 40, 0);
    Bytes file = global_header();
    record(file, 0, 0, frame);
    const auto r = decode_capture(file);
    EXPECT_TRUE(r.packets.empty());
    EXPECT_EQ(r.skipped_ipv6, 1u);
}

TEST(Pcap, MalformedGlobalHeader) {
    EXPECT_THROW(decode_capture(Bytes(10, 0)), CaptureError);
    Bytes bad = global_header();
    bad[0] = 0;
    EXPECT_THROW(decode_capture(bad), CaptureError);
    Bytes raw = global_header();
    raw[20] = 101;  // raw IP link type
    EXPECT_THROW(decode_capture(raw), CaptureError);
    EXPECT_THROW(read_capture(temp_file("does_not_exist.pcap")), CaptureError);
}

TEST(Pcap, TruncatedRecordKeepsPrefix) {
    Bytes file = global_header();
    record(file, 1, 0, tcp_syn_frame());
    record(file, 2, 0, udp_dns_frame());
    file.resize(file.size() - 5);
    const auto r = decode_capture(file);
    EXPECT_EQ(r.packets.size(), 1u);
    EXPECT_EQ(r.truncated, 1u);
    EXPECT_EQ(r.warnings(), 1u);
}

TEST(Pcap, RoundTripThreeMixed) {
    const auto a = Ipv4Addr::parse("192.168.1.10"), b = Ipv4Addr::parse("52.94.233.10");
    std::vector<Packet> pkts = {
        make_packet(at_seconds(0.5), Protocol::TCP, a, 50000, b, 443, kPshAck, to_bytes("hello"), 900),
        make_packet(at_seconds(0.75), Protocol::UDP, a, 16384, Ipv4Addr::parse("192.168.1.1"), 53, {}, to_bytes("q")),
        make_packet(at_seconds(1.0), Protocol::TCP, b, 443, a, 50000, TcpFlags(TcpFlags::ACK)),
    };
    const auto path = temp_file("three.pcap");
    write_capture(path, pkts);
    const auto r = read_capture(path);
    EXPECT_EQ(r.packets, pkts);
    std::filesystem::remove(path);
}

TEST(Pcap, RoundTripRandomPackets) {
    std::mt19937_64 rng(12345);
    std::vector<Packet> pkts;
    std::int64_t us = 0;
    for (int i = 0; i < 10000; ++i) {
        us += static_cast<std::int64_t>(rng() % 5000);
        pkts.push_back(random_packet(rng, at_micros(us)));
    }
    const auto r = decode_capture(encode_capture(pkts));
    EXPECT_EQ(r.warnings(), 0u);
    ASSERT_EQ(r.packets.size(), pkts.size());
    for (std::size_t i = 0; i < pkts.size(); ++i) ASSERT_EQ(r.packets[i], pkts[i]) << "packet " << i;
}

TEST(Pcap, EncoderRejectsInvalidPacket) {
    Packet p = make_packet(kEpoch, Protocol::TCP, Ipv4Addr(1), 1, Ipv4Addr(2), 2);
    p.length = 3;
    EXPECT_THROW(encode_capture(std::vector<Packet>{p}), std::invalid_argument);
}

TEST(Pcap, DecoderIsTotalOnArbitraryBytes) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        Bytes file = global_header();
        const std::size_t n = rng() % 400;
        if (trial % 2 == 0) {
            for (std::size_t i = 0; i < n; ++i) file.push_back(static_cast<std::uint8_t>(rng()));
        } else {
            // Plausible record headers with garbage frames exercise the frame decoder.
            Bytes frame(rng() % 80);
            for (auto& x : frame) x = static_cast<std::uint8_t>(rng());
            if (frame.size() >= 14) {
                frame[12] = 0x08;
                frame[13] = 0x00;
            }
            if (frame.size() >= 15) frame[14] = static_cast<std::uint8_t>(0x40 | (rng() % 16));
            record(file, 0, 0, frame);
            if (rng() % 2) file.resize(file.size() - std::min<std::size_t>(file.size() - 24, rng() % 8));
        }
        CaptureResult r;
        ASSERT_NO_THROW(r = decode_capture(file));
        for (const auto& p : r.packets) EXPECT_GE(p.length, p.payload.size());
    }
}

TEST(Pcap, UnwritablePath) {
    EXPECT_THROW(write_capture("/nonexistent_dir_xyz/out.pcap", std::vector<Packet>{}), CaptureError);
}
