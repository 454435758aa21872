#pragma once

// Deterministic synthetic traffic: benign IoT device profiles, the nine
// threat scripts, and scenario scheduling with ground-truth labels.

#include <sunblock/events.hpp>
#include <sunblock/packet.hpp>
#include <sunblock/time.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sunblock {

enum class DeviceKind : std::uint8_t { speaker, camera, plug, bulb, thermostat, tv };

inline constexpr std::array<std::string_view, 6> kDeviceKindNames{"speaker", "camera", "plug",
                                                                  "bulb",    "thermostat", "tv"};

inline constexpr std::string_view to_string(DeviceKind k) { return kDeviceKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<DeviceKind> parse_device_kind(std::string_view s) {
    for (std::size_t i = 0; i < kDeviceKindNames.size(); ++i)
        if (kDeviceKindNames[i] == s) return static_cast<DeviceKind>(i);
    return std::nullopt;
}

struct Endpoint {
    Ipv4Addr ip;
    std::uint16_t port = 443;
    Protocol protocol = Protocol::TCP;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct DeviceProfile {
    std::string name;
    Ipv4Addr ip;
    DeviceKind kind = DeviceKind::plug;
    double heartbeat_period = 10.0;   // seconds between heartbeat sessions
    std::uint32_t heartbeat_packets = 3;
    double heartbeat_spacing = 0.2;   // seconds between packets of one session
    std::uint32_t heartbeat_bytes = 120;
    double dns_rate = 0.05;           // queries per second, Poisson
    std::uint32_t burst_size = 0;     // bytes per upstream burst; 0 disables bursts
    double burst_period = 0.0;
    double burst_spacing = 0.05;
    std::vector<Endpoint> endpoints;
    double jitter = 0.1;              // relative, uniform
    Ipv4Addr dns_server{192, 168, 1, 1};

    void validate() const {
        auto bad = [&](const std::string& what) { throw std::invalid_argument("device '" + name + "': " + what); };
        if (name.empty()) throw std::invalid_argument("device without a name");
        if (!(heartbeat_period > 0.0)) bad("heartbeat_period must be positive");
        if (heartbeat_packets == 0) bad("heartbeat_packets must be positive");
        if (!(heartbeat_spacing > 0.0)) bad("heartbeat_spacing must be positive");
        if (!(dns_rate > 0.0)) bad("dns_rate must be positive");
        if (burst_size > 0 && !(burst_period > 0.0 && burst_spacing > 0.0)) bad("bursts need a positive period and spacing");
        if (!(jitter >= 0.0 && jitter < 1.0)) bad("jitter must lie in [0, 1)");
        if (endpoints.empty()) bad("at least one endpoint is required");
    }

    // Mean packets per second, used for the rate-separation check.
    double mean_rate() const {
        double r = heartbeat_packets / heartbeat_period + dns_rate;
        if (burst_size > 0) r += static_cast<double>(burst_packet_count()) / burst_period;
        return r;
    }

    static constexpr std::uint32_t kBurstMtu = 1400;
    std::uint32_t burst_packet_count() const { return (burst_size + kBurstMtu - 1) / kBurstMtu; }
};

enum class AttackKind : std::uint8_t {
    SynFlood,
    UdpFlood,
    DnsFlood,
    HttpFlood,
    PortScan,
    OsScan,
    PiiLeak,
    AnomalousTraffic,
    AnomalousUpload,
};

inline constexpr std::array<std::string_view, 9> kAttackKindNames{
    "SynFlood", "UdpFlood", "DnsFlood",         "HttpFlood",      "PortScan",
    "OsScan",   "PiiLeak",  "AnomalousTraffic", "AnomalousUpload"};

inline constexpr std::string_view to_string(AttackKind k) { return kAttackKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<AttackKind> parse_attack_kind(std::string_view s) {
    for (std::size_t i = 0; i < kAttackKindNames.size(); ++i)
        if (kAttackKindNames[i] == s) return static_cast<AttackKind>(i);
    return std::nullopt;
}

// The event class that counts as detecting an attack.
inline constexpr ThreatClass expected_class(AttackKind k) {
    switch (k) {
        case AttackKind::AnomalousTraffic:
        case AttackKind::AnomalousUpload: return ThreatClass::MlAnomaly;
        default: return static_cast<ThreatClass>(k);
    }
}

// Attacks launched by the external attacker rather than by a LAN device.
inline constexpr bool attacker_sourced(AttackKind k) {
    return k != AttackKind::PiiLeak && k != AttackKind::AnomalousTraffic && k != AttackKind::AnomalousUpload;
}

struct AttackSpec {
    AttackKind kind = AttackKind::SynFlood;
    Ipv4Addr source;                       // attacker, or the victim/spoofed device
    Ipv4Addr target;
    std::uint16_t target_port = 0;
    double rate = 1000.0;                  // packets (or probes, requests) per second
    Timestamp start;
    double duration = 100.0;
    std::uint64_t seed = 0;
    std::uint32_t payload_bytes = 0;       // flood datagram / upload segment size
    std::uint32_t hosts = 3;               // OS scan: consecutive target addresses
    std::optional<DeviceProfile> imitate;  // AnomalousTraffic: whose pattern to replay

    Timestamp end() const { return start + seconds_to_duration(duration); }

    void validate() const {
        if (!(duration > 0.0)) throw std::invalid_argument("attack duration must be positive");
        if (kind != AttackKind::AnomalousTraffic && !(rate > 0.0))
            throw std::invalid_argument("attack rate must be positive");
        if (kind == AttackKind::AnomalousTraffic && !imitate)
            throw std::invalid_argument("AnomalousTraffic needs a device profile to imitate");
        if (kind == AttackKind::OsScan && hosts == 0) throw std::invalid_argument("OsScan needs at least one host");
    }
};

namespace gen_detail {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x51ed270b27f1c3a5ULL;
    for (auto p : parts) h = splitmix(h ^ p);
    return h;
}

inline constexpr std::int64_t kEpochMicros = 3600LL * 1000000;

class Jitter {
public:
    Jitter(std::mt19937_64& rng, double amount) : rng_(rng), amount_(amount) {}
    double operator()(double base) { return base * (1.0 + amount_ * (2.0 * unit_(rng_) - 1.0)); }
    double unit() { return unit_(rng_); }

private:
    std::mt19937_64& rng_;
    double amount_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline std::uint32_t extra_for(Protocol proto, std::uint32_t total) {
    const auto h = static_cast<std::uint32_t>(header_size(proto));
    return total > h ? total - h : 0;
}

// All sessions that start inside one hour-long epoch. Seeded per epoch, so
// any time range can be regenerated without replaying earlier history.
inline void gen_epoch(const DeviceProfile& d, std::int64_t epoch, std::uint64_t seed, std::vector<Packet>& out) {
    std::mt19937_64 rng(mix({seed, d.ip.value(), static_cast<std::uint64_t>(epoch)}));
    Jitter jit(rng, d.jitter);
    const double e0 = static_cast<double>(epoch) * 3600.0;
    const double e1 = e0 + 3600.0;
    const auto uepoch = static_cast<std::uint64_t>(epoch);

    std::uint64_t k = 0;
    for (double t = e0 + d.heartbeat_period * jit.unit(); t < e1; t += jit(d.heartbeat_period), ++k) {
        const Endpoint& ep = d.endpoints[k % d.endpoints.size()];
        const auto sport = static_cast<std::uint16_t>(32768 + (uepoch * 4096 + k) % 16384);
        double ts = t;
        for (std::uint32_t i = 0; i < d.heartbeat_packets; ++i) {
            if (i > 0) ts += jit(d.heartbeat_spacing);
            out.push_back(make_packet(at_seconds(ts), ep.protocol, d.ip, sport, ep.ip, ep.port,
                                      ep.protocol == Protocol::TCP ? kPshAck : TcpFlags{}, {},
                                      extra_for(ep.protocol, d.heartbeat_bytes)));
        }
    }

    if (d.burst_size > 0) {
        const Endpoint& ep = d.endpoints.front();
        k = 0;
        for (double t = e0 + d.burst_period * jit.unit(); t < e1; t += jit(d.burst_period), ++k) {
            const auto sport = static_cast<std::uint16_t>(49152 + (uepoch * 4096 + k) % 16384);
            std::uint32_t left = d.burst_size;
            double ts = t;
            for (std::uint32_t i = 0; left > 0; ++i) {
                if (i > 0) ts += jit(d.burst_spacing);
                const std::uint32_t chunk = std::min(left, DeviceProfile::kBurstMtu);
                left -= chunk;
                out.push_back(make_packet(at_seconds(ts), ep.protocol, d.ip, sport, ep.ip, ep.port,
                                          ep.protocol == Protocol::TCP ? kPshAck : TcpFlags{}, {},
                                          extra_for(ep.protocol, chunk)));
            }
        }
    }

    std::exponential_distribution<double> gap(d.dns_rate);
    k = 0;
    for (double t = e0 + gap(rng); t < e1; t += gap(rng), ++k) {
        const auto sport = static_cast<std::uint16_t>(16384 + (uepoch * 4096 + k) % 16384);
        out.push_back(make_packet(at_seconds(t), Protocol::UDP, d.ip, sport, d.dns_server, 53, {}, {}, 40));
    }
}

inline void sort_by_time(std::vector<Packet>& v) {
    std::stable_sort(v.begin(), v.end(), [](const Packet& a, const Packet& b) { return a.ts < b.ts; });
}

inline std::vector<std::uint8_t> dns_query(std::string_view name, std::uint16_t id) {
    std::vector<std::uint8_t> q{static_cast<std::uint8_t>(id >> 8), static_cast<std::uint8_t>(id), 0x01, 0x00, 0, 1, 0, 0,
                                0, 0, 0, 0};
    std::size_t start = 0;
    while (start <= name.size()) {
        const std::size_t dot = std::min(name.find('.', start), name.size());
        q.push_back(static_cast<std::uint8_t>(dot - start));
        q.insert(q.end(), name.begin() + static_cast<std::ptrdiff_t>(start), name.begin() + static_cast<std::ptrdiff_t>(dot));
        start = dot + 1;
    }
    q.insert(q.end(), {0, 0, 1, 0, 1});
    return q;
}

}  // namespace gen_detail

// Benign traffic of one device over [t0, t1), time-sorted.
inline std::vector<Packet> gen_benign(const DeviceProfile& d, Timestamp t0, Timestamp t1, std::uint64_t seed) {
    d.validate();
    std::vector<Packet> out;
    if (!(t0 < t1)) return out;
    const std::int64_t first = std::max<std::int64_t>(0, micros(t0) / gen_detail::kEpochMicros - 1);
    const std::int64_t last = (micros(t1) - 1) / gen_detail::kEpochMicros;
    std::vector<Packet> raw;
    for (std::int64_t e = first; e <= last; ++e) gen_detail::gen_epoch(d, e, seed, raw);
    for (auto& p : raw)
        if (p.ts >= t0 && p.ts < t1) out.push_back(std::move(p));
    gen_detail::sort_by_time(out);
    return out;
}

// Packets of one attack instance, all within [start, start + duration).
inline std::vector<Packet> gen_attack(const AttackSpec& a) {
    a.validate();
    using gen_detail::mix;
    std::vector<Packet> out;
    const Timestamp end = a.end();
    std::mt19937_64 rng(mix({a.seed, static_cast<std::uint64_t>(a.kind), a.source.value()}));

    if (a.kind == AttackKind::AnomalousTraffic) {
        out = gen_benign(*a.imitate, a.start, end, a.seed);
        for (auto& p : out) p.src_ip = a.source;
        return out;
    }

    const auto n = static_cast<std::uint64_t>(std::llround(a.duration * a.rate));
    out.reserve(n);
    auto time_of = [&](std::uint64_t k) {
        return a.start + Duration{static_cast<std::int64_t>(std::llround(static_cast<double>(k) * 1e6 / a.rate))};
    };
    auto ephemeral = [](std::uint64_t k) { return static_cast<std::uint16_t>(1024 + k % 64000); };
    const std::uint16_t port = a.target_port;

    for (std::uint64_t k = 0; k < n; ++k) {
        const Timestamp ts = time_of(k);
        if (ts >= end) break;
        switch (a.kind) {
            case AttackKind::SynFlood:
                out.push_back(make_packet(ts, Protocol::TCP, a.source, ephemeral(k), a.target, port ? port : 80, kSyn,
                                          {}, 6));
                break;
            case AttackKind::UdpFlood: {
                std::uniform_int_distribution<int> pick(1, 65534);
                int dport = pick(rng);
                if (dport >= 53) ++dport;
                out.push_back(make_packet(ts, Protocol::UDP, a.source, ephemeral(k), a.target,
                                          static_cast<std::uint16_t>(dport), {}, {},
                                          a.payload_bytes ? a.payload_bytes : 512));
                break;
            }
            case AttackKind::DnsFlood: {
                static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyz0123456789";
                std::uniform_int_distribution<int> pick(0, 35);
                std::string name(12, 'a');
                for (auto& c : name) c = kAlpha[pick(rng)];
                name += ".victim-domain.example";
                out.push_back(make_packet(ts, Protocol::UDP, a.source, ephemeral(k), a.target, port ? port : 53, {},
                                          gen_detail::dns_query(name, static_cast<std::uint16_t>(k))));
                break;
            }
            case AttackKind::HttpFlood:
                out.push_back(make_packet(ts, Protocol::TCP, a.source, ephemeral(k), a.target, port ? port : 80,
                                          kPshAck,
                                          to_bytes("GET / HTTP/1.1\r\nHost: " + a.target.to_string() +
                                                   "\r\nUser-Agent: Mozilla/5.0\r\nAccept: */*\r\n\r\n")));
                break;
            case AttackKind::PortScan:
                out.push_back(make_packet(ts, Protocol::TCP, a.source, 40000, a.target,
                                          static_cast<std::uint16_t>(1 + k % 1024), kSyn, {}, 4));
                break;
            case AttackKind::OsScan: {
                const Ipv4Addr host{a.target.value() + static_cast<std::uint32_t>((k / 4) % a.hosts)};
                const std::uint16_t dport = port ? port : 80;
                switch (k % 4) {
                    case 0:
                        out.push_back(make_packet(ts, Protocol::TCP, a.source, 40001, host, dport, TcpFlags{TcpFlags::FIN}));
                        break;
                    case 1: out.push_back(make_packet(ts, Protocol::TCP, a.source, 40002, host, dport, TcpFlags{})); break;
                    case 2:
                        out.push_back(make_packet(ts, Protocol::TCP, a.source, 40003, host, dport,
                                                  TcpFlags{TcpFlags::FIN | TcpFlags::PSH | TcpFlags::URG}));
                        break;
                    default:
                        out.push_back(make_icmp(ts, a.source, host, kIcmpEchoRequest, to_bytes("probe-echo-payload")));
                        break;
                }
                break;
            }
            case AttackKind::PiiLeak: {
                const std::string body = "email=resident" + std::to_string(k % 97) +
                                         "%40home-mail.example&password=Sunny" + std::to_string(1000 + k % 9000);
                out.push_back(make_packet(ts, Protocol::TCP, a.source, ephemeral(k), a.target, port ? port : 80,
                                          kPshAck,
                                          to_bytes("POST /account/sync HTTP/1.1\r\nHost: " + a.target.to_string() +
                                                   "\r\nContent-Type: application/x-www-form-urlencoded\r\n"
                                                   "Content-Length: " +
                                                   std::to_string(body.size()) + "\r\n\r\n" + body)));
                break;
            }
            case AttackKind::AnomalousUpload: {
                const std::uint32_t total = a.payload_bytes ? a.payload_bytes : 1000;
                out.push_back(make_packet(ts, Protocol::TCP, a.source, static_cast<std::uint16_t>(50000 + a.seed % 1000),
                                          a.target, port ? port : 8080, kPshAck, {},
                                          gen_detail::extra_for(Protocol::TCP, total)));
                break;
            }
            case AttackKind::AnomalousTraffic: break;
        }
    }
    return out;
}

struct ScenarioAttack {
    AttackKind kind = AttackKind::SynFlood;
    std::string device;                  // victim / spoofed device name (PII, anomaly threats)
    std::string imitate;                 // AnomalousTraffic: device whose pattern is replayed
    std::optional<Ipv4Addr> target;
    std::uint16_t target_port = 0;
    double rate = 0.0;                   // 0 selects the default for the kind
    double duration = 0.0;               // 0 selects the default duration
    std::optional<double> offset;        // start within the iteration; default is after the previous attack
    std::uint32_t payload_bytes = 0;
    std::uint32_t hosts = 3;
};

struct AttackDefaults {
    double flood_rate = 1000.0;
    double scan_rate = 200.0;
    double pii_rate = 1.0;
    double upload_rate = 500.0;
    std::uint32_t upload_bytes = 1000;
    double duration = 100.0;

    double rate_for(AttackKind k) const {
        switch (k) {
            case AttackKind::PortScan:
            case AttackKind::OsScan: return scan_rate;
            case AttackKind::PiiLeak: return pii_rate;
            case AttackKind::AnomalousUpload: return upload_rate;
            case AttackKind::AnomalousTraffic: return 0.0;
            default: return flood_rate;
        }
    }
};

struct ScenarioSpec {
    std::uint64_t seed = 1;
    std::vector<Cidr> home_net{Cidr::parse("192.168.1.0/24")};
    double warmup = 7200.0;
    std::size_t iterations = 10;
    double reset_gap = 60.0;
    Ipv4Addr attacker_ip{203, 0, 113, 66};
    double total_duration = 0.0;  // 0: end of the last iteration plus one reset gap
    std::vector<DeviceProfile> devices;
    std::vector<ScenarioAttack> attacks;
};

struct GroundTruth {
    AttackKind kind = AttackKind::SynFlood;
    std::size_t iteration = 0;
    Timestamp start;
    Timestamp end;
    Ipv4Addr source;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A validated, fully scheduled scenario. Packets are produced on demand per
// time segment so that week-long runs stay within bounded memory.
class ScenarioPlan {
public:
    const ScenarioSpec& spec() const { return spec_; }
    const std::vector<AttackSpec>& attacks() const { return attacks_; }
    const std::vector<GroundTruth>& labels() const { return labels_; }
    Timestamp end() const { return end_; }

    std::vector<Packet> segment(Timestamp t0, Timestamp t1) const {
        std::vector<Packet> out;
        for (const auto& d : spec_.devices) {
            auto v = gen_benign(d, t0, t1, spec_.seed);
            out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
        }
        for (const auto& a : attacks_) {
            if (a.end() <= t0 || a.start >= t1) continue;
            for (auto& p : gen_attack(a))
                if (p.ts >= t0 && p.ts < t1) out.push_back(std::move(p));
        }
        gen_detail::sort_by_time(out);
        return out;
    }

    std::vector<Packet> packets() const { return segment(kEpoch, end_); }

private:
    friend ScenarioPlan plan_scenario(const ScenarioSpec&, const AttackDefaults&);
    ScenarioSpec spec_;
    std::vector<AttackSpec> attacks_;
    std::vector<GroundTruth> labels_;
    Timestamp end_;
};

inline ScenarioPlan plan_scenario(const ScenarioSpec& spec, const AttackDefaults& defaults = {}) {
    if (spec.iterations == 0) throw ScenarioError("iterations must be at least 1");
    if (!(spec.warmup >= 0.0) || !(spec.reset_gap >= 0.0)) throw ScenarioError("warmup and reset_gap must be non-negative");
    if (spec.devices.empty()) throw ScenarioError("scenario has no devices");
    for (std::size_t i = 0; i < spec.devices.size(); ++i) {
        spec.devices[i].validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (spec.devices[j].ip == spec.devices[i].ip)
                throw ScenarioError("devices '" + spec.devices[j].name + "' and '" + spec.devices[i].name +
                                    "' share ip " + spec.devices[i].ip.to_string());
            if (spec.devices[j].name == spec.devices[i].name)
                throw ScenarioError("duplicate device name '" + spec.devices[i].name + "'");
        }
    }
    auto find = [&](const std::string& name, AttackKind k) -> const DeviceProfile& {
        for (const auto& d : spec.devices)
            if (d.name == name) return d;
        throw ScenarioError(std::string(to_string(k)) + ": unknown device '" + name + "'");
    };

    ScenarioPlan plan;
    plan.spec_ = spec;
    double iter_start = spec.warmup;
    for (std::size_t it = 0; it < spec.iterations; ++it) {
        double cursor = 0.0, iter_len = 0.0;
        for (std::size_t ai = 0; ai < spec.attacks.size(); ++ai) {
            const ScenarioAttack& sa = spec.attacks[ai];
            AttackSpec a;
            a.kind = sa.kind;
            a.duration = sa.duration > 0.0 ? sa.duration : defaults.duration;
            a.rate = sa.rate > 0.0 ? sa.rate : defaults.rate_for(sa.kind);
            a.target_port = sa.target_port;
            a.payload_bytes = sa.payload_bytes;
            if (sa.kind == AttackKind::AnomalousUpload && !a.payload_bytes) a.payload_bytes = defaults.upload_bytes;
            a.hosts = sa.hosts;
            a.seed = gen_detail::mix({spec.seed, ai, it, 0xa77ac4});
            if (attacker_sourced(sa.kind)) {
                a.source = spec.attacker_ip;
            } else {
                if (sa.device.empty()) throw ScenarioError(std::string(to_string(sa.kind)) + " needs a device");
                a.source = find(sa.device, sa.kind).ip;
            }
            if (sa.kind == AttackKind::AnomalousTraffic) {
                if (sa.imitate.empty()) throw ScenarioError("AnomalousTraffic needs an imitate device");
                a.imitate = find(sa.imitate, sa.kind);
            } else if (!sa.target) {
                throw ScenarioError(std::string(to_string(sa.kind)) + " needs a target");
            }
            a.target = sa.target.value_or(Ipv4Addr{});
            const double offset = sa.offset.value_or(cursor);
            a.start = at_seconds(iter_start + offset);
            try {
                a.validate();
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(std::string(to_string(sa.kind)) + ": " + e.what());
            }
            cursor = offset + a.duration + spec.reset_gap;
            iter_len = std::max(iter_len, cursor);
            plan.labels_.push_back({a.kind, it, a.start, a.end(), a.source});
            plan.attacks_.push_back(std::move(a));
        }
        iter_start += iter_len;
    }

    for (std::size_t i = 0; i < plan.attacks_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const auto& a = plan.attacks_[i];
            const auto& b = plan.attacks_[j];
            if (a.source == b.source && a.start < b.end() && b.start < a.end())
                throw ScenarioError("overlapping attacks from " + a.source.to_string() + ": " +
                                    std::string(to_string(b.kind)) + " and " + std::string(to_string(a.kind)));
        }

    const Timestamp scheduled = at_seconds(iter_start);
    if (spec.total_duration > 0.0) {
        plan.end_ = at_seconds(spec.total_duration);
        for (const auto& a : plan.attacks_)
            if (a.end() > plan.end_) throw ScenarioError("attacks do not fit within total_duration");
    } else {
        plan.end_ = scheduled;
    }
    if (plan.end_ <= kEpoch) throw ScenarioError("scenario has zero length");
    return plan;
}

struct BuiltScenario {
    std::vector<Packet> packets;
    std::vector<GroundTruth> labels;
};

inline BuiltScenario build_scenario(const ScenarioSpec& spec, const AttackDefaults& defaults = {}) {
    const ScenarioPlan plan = plan_scenario(spec, defaults);
    return {plan.packets(), plan.labels()};
}

}  // namespace sunblock
