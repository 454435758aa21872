#pragma once

// Scenario files: global keys, then repeated [device] and [attack] sections.
//
//   seed = 42
//   [device]
//   name = echo_spot
//   ip = 192.168.1.10
//   endpoints = 52.94.233.10:443/tcp, 52.94.233.11:443/tcp
//   [attack]
//   kind = SynFlood
//   target = 192.168.1.20

#include <sunblock/config.hpp>
#include <sunblock/kv.hpp>
#include <sunblock/threatgen.hpp>

#include <filesystem>
#include <string>

namespace sunblock {

namespace scenario_detail {

inline Ipv4Addr ip(const KvEntry& e) {
    Ipv4Addr a;
    if (!Ipv4Addr::try_parse(e.value, a)) throw KvError(e.line, e.key + ": invalid IPv4 address '" + e.value + "'");
    return a;
}

inline std::uint16_t port(const KvEntry& e) { return static_cast<std::uint16_t>(kv_uint(e, 65535)); }

// "a.b.c.d:port/tcp" or "/udp"; protocol defaults to tcp.
inline Endpoint endpoint(const KvEntry& e, const std::string& item) {
    auto fail = [&] { throw KvError(e.line, "endpoints: invalid endpoint '" + item + "'"); };
    std::string_view s = item;
    Endpoint ep;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto proto = s.substr(slash + 1);
        if (proto == "tcp")
            ep.protocol = Protocol::TCP;
        else if (proto == "udp")
            ep.protocol = Protocol::UDP;
        else
            fail();
        s = s.substr(0, slash);
    }
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) fail();
    if (!Ipv4Addr::try_parse(s.substr(0, colon), ep.ip)) fail();
    KvEntry p{"endpoints", std::string(s.substr(colon + 1)), e.line};
    try {
        ep.port = port(p);
    } catch (const KvError&) {
        fail();
    }
    return ep;
}

inline double positive(const KvEntry& e) {
    const double v = kv_double(e);
    if (!(v > 0.0) || std::isinf(v)) throw KvError(e.line, e.key + ": must be positive");
    return v;
}

inline double non_negative(const KvEntry& e) {
    const double v = kv_double(e);
    if (v < 0.0 || std::isinf(v)) throw KvError(e.line, e.key + ": must be non-negative");
    return v;
}

inline void set_global(ScenarioSpec& s, const KvEntry& e) {
    if (e.key == "seed")
        s.seed = kv_uint(e);
    else if (e.key == "home_net")
        s.home_net = config_detail::parse_cidr_list(e);
    else if (e.key == "warmup")
        s.warmup = non_negative(e);
    else if (e.key == "iterations")
        s.iterations = kv_uint(e, 1u << 20);
    else if (e.key == "reset_gap")
        s.reset_gap = non_negative(e);
    else if (e.key == "attacker_ip")
        s.attacker_ip = ip(e);
    else if (e.key == "total_duration")
        s.total_duration = non_negative(e);
    else
        throw KvError(e.line, "unknown scenario key '" + e.key + "'");
}

inline void set_device(DeviceProfile& d, const KvEntry& e) {
    if (e.key == "name")
        d.name = e.value;
    else if (e.key == "ip")
        d.ip = ip(e);
    else if (e.key == "kind") {
        const auto k = parse_device_kind(e.value);
        if (!k) throw KvError(e.line, "kind: unknown device kind '" + e.value + "'");
        d.kind = *k;
    } else if (e.key == "heartbeat_period")
        d.heartbeat_period = positive(e);
    else if (e.key == "heartbeat_packets")
        d.heartbeat_packets = static_cast<std::uint32_t>(kv_uint(e, 10000));
    else if (e.key == "heartbeat_spacing")
        d.heartbeat_spacing = positive(e);
    else if (e.key == "heartbeat_bytes")
        d.heartbeat_bytes = static_cast<std::uint32_t>(kv_uint(e, 65535));
    else if (e.key == "dns_rate")
        d.dns_rate = positive(e);
    else if (e.key == "burst_size")
        d.burst_size = static_cast<std::uint32_t>(kv_uint(e, 1u << 30));
    else if (e.key == "burst_period")
        d.burst_period = positive(e);
    else if (e.key == "burst_spacing")
        d.burst_spacing = positive(e);
    else if (e.key == "jitter")
        d.jitter = non_negative(e);
    else if (e.key == "dns_server")
        d.dns_server = ip(e);
    else if (e.key == "endpoints") {
        d.endpoints.clear();
        for (const auto& item : split_list(e.value)) d.endpoints.push_back(endpoint(e, item));
    } else
        throw KvError(e.line, "unknown device key '" + e.key + "'");
}

inline void set_attack(ScenarioAttack& a, const KvEntry& e) {
    if (e.key == "kind") {
        const auto k = parse_attack_kind(e.value);
        if (!k) throw KvError(e.line, "kind: unknown attack '" + e.value + "'");
        a.kind = *k;
    } else if (e.key == "device")
        a.device = e.value;
    else if (e.key == "imitate")
        a.imitate = e.value;
    else if (e.key == "target")
        a.target = ip(e);
    else if (e.key == "target_port")
        a.target_port = port(e);
    else if (e.key == "rate")
        a.rate = positive(e);
    else if (e.key == "duration")
        a.duration = positive(e);
    else if (e.key == "offset")
        a.offset = non_negative(e);
    else if (e.key == "payload_bytes")
        a.payload_bytes = static_cast<std::uint32_t>(kv_uint(e, 65535));
    else if (e.key == "hosts")
        a.hosts = static_cast<std::uint32_t>(kv_uint(e, 256));
    else
        throw KvError(e.line, "unknown attack key '" + e.key + "'");
}

}  // namespace scenario_detail

inline ScenarioSpec parse_scenario(std::string_view text) {
    ScenarioSpec spec;
    const auto sections = parse_kv(text);
    for (const auto& e : sections.front().entries) scenario_detail::set_global(spec, e);
    for (std::size_t i = 1; i < sections.size(); ++i) {
        const KvSection& s = sections[i];
        if (s.name == "device") {
            DeviceProfile d;
            for (const auto& e : s.entries) scenario_detail::set_device(d, e);
            try {
                d.validate();
            } catch (const std::invalid_argument& err) {
                throw KvError(s.line, err.what());
            }
            spec.devices.push_back(std::move(d));
        } else if (s.name == "attack") {
            ScenarioAttack a;
            bool has_kind = false;
            for (const auto& e : s.entries) {
                scenario_detail::set_attack(a, e);
                has_kind |= e.key == "kind";
            }
            if (!has_kind) throw KvError(s.line, "attack section without kind");
            spec.attacks.push_back(std::move(a));
        } else {
            throw KvError(s.line, "unknown section [" + s.name + "]");
        }
    }
    return spec;
}

inline ScenarioSpec load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text_file(path)); }

}  // namespace sunblock
