#pragma once

// Engine and harness configuration. Every default is overridable from a flat
// key = value file and from SUNBLOCK_<KEY> environment variables.

#include <sunblock/kv.hpp>
#include <sunblock/pipeline.hpp>
#include <sunblock/rules.hpp>
#include <sunblock/threatgen.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sunblock {

struct Config {
    PipelineConfig pipeline;
    RuleThresholds thresholds;
    AttackDefaults attacks;
    double detection_grace = 10.0;
    double segment_seconds = 600.0;
    bool unblock_between_attacks = true;
    std::string rules_file;  // empty: built-in rules
};

namespace config_detail {

inline std::string num(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string secs(Duration d) { return num(to_seconds(d)); }

inline Duration positive_seconds(const KvEntry& e) {
    const double v = kv_double(e);
    if (!(v > 0.0) || std::isinf(v)) throw KvError(e.line, e.key + ": expected a positive number of seconds");
    return seconds_to_duration(v);
}

struct Key {
    const char* name;
    std::function<void(Config&, const KvEntry&)> set;
    std::function<std::string(const Config&)> get;
};

inline std::string cidr_list(const std::vector<Cidr>& v) {
    std::string s;
    for (const auto& c : v) s += (s.empty() ? "" : ",") + c.to_string();
    return s;
}

inline std::vector<Cidr> parse_cidr_list(const KvEntry& e) {
    std::vector<Cidr> out;
    for (const auto& item : split_list(e.value)) {
        Cidr c;
        if (!Cidr::try_parse(item, c)) throw KvError(e.line, e.key + ": invalid CIDR '" + item + "'");
        out.push_back(c);
    }
    if (out.empty()) throw KvError(e.line, e.key + ": empty list");
    return out;
}

inline Key rate_key(const char* name, RuleThresholds::Rate RuleThresholds::*field, bool count) {
    if (count)
        return {name,
                [field](Config& c, const KvEntry& e) {
                    const auto v = kv_uint(e, 1u << 30);
                    if (v == 0) throw KvError(e.line, e.key + ": must be positive");
                    (c.thresholds.*field).count = static_cast<std::uint32_t>(v);
                },
                [field](const Config& c) { return std::to_string((c.thresholds.*field).count); }};
    return {name,
            [field](Config& c, const KvEntry& e) { (c.thresholds.*field).seconds = to_seconds(positive_seconds(e)); },
            [field](const Config& c) { return num((c.thresholds.*field).seconds); }};
}

inline const std::vector<Key>& keys() {
    static const std::vector<Key> k = [] {
        std::vector<Key> v;
        v.push_back({"batch_size",
                     [](Config& c, const KvEntry& e) { c.pipeline.batch_size = kv_uint(e, 1u << 24); },
                     [](const Config& c) { return std::to_string(c.pipeline.batch_size); }});
        v.push_back({"training_window",
                     [](Config& c, const KvEntry& e) { c.pipeline.training_window = positive_seconds(e); },
                     [](const Config& c) { return secs(c.pipeline.training_window); }});
        v.push_back({"retrain_interval",
                     [](Config& c, const KvEntry& e) { c.pipeline.retrain_interval = positive_seconds(e); },
                     [](const Config& c) { return secs(c.pipeline.retrain_interval); }});
        v.push_back({"block_duration",
                     [](Config& c, const KvEntry& e) {
                         if (std::isinf(kv_double(e)))
                             c.pipeline.block_duration.reset();
                         else
                             c.pipeline.block_duration = positive_seconds(e);
                     },
                     [](const Config& c) {
                         return c.pipeline.block_duration ? secs(*c.pipeline.block_duration) : std::string("inf");
                     }});
        v.push_back({"anomaly_vote_threshold",
                     [](Config& c, const KvEntry& e) { c.pipeline.vote_threshold = kv_double(e); },
                     [](const Config& c) { return num(c.pipeline.vote_threshold); }});
        v.push_back({"warmup_min_batches",
                     [](Config& c, const KvEntry& e) { c.pipeline.warmup_min_batches = kv_uint(e, 1u << 24); },
                     [](const Config& c) { return std::to_string(c.pipeline.warmup_min_batches); }});
        v.push_back({"max_training_vectors",
                     [](Config& c, const KvEntry& e) { c.pipeline.max_training_vectors = kv_uint(e, 1u << 24); },
                     [](const Config& c) { return std::to_string(c.pipeline.max_training_vectors); }});
        v.push_back({"feature_dim",
                     [](Config& c, const KvEntry& e) { c.pipeline.features.dim = kv_uint(e, 4096); },
                     [](const Config& c) { return std::to_string(c.pipeline.features.dim); }});
        v.push_back({"flow_timeout",
                     [](Config& c, const KvEntry& e) { c.pipeline.features.flow_timeout = positive_seconds(e); },
                     [](const Config& c) { return secs(c.pipeline.features.flow_timeout); }});
        v.push_back({"min_packets",
                     [](Config& c, const KvEntry& e) { c.pipeline.features.min_packets = kv_uint(e, 1u << 20); },
                     [](const Config& c) { return std::to_string(c.pipeline.features.min_packets); }});
        v.push_back({"nu", [](Config& c, const KvEntry& e) { c.pipeline.svm.nu = kv_double(e); },
                     [](const Config& c) { return num(c.pipeline.svm.nu); }});
        v.push_back({"gamma",
                     [](Config& c, const KvEntry& e) {
                         const double g = kv_double(e);
                         if (g < 0.0) throw KvError(e.line, "gamma: must be positive, or 0 for 1/dim");
                         c.pipeline.svm.gamma = g;
                     },
                     [](const Config& c) { return num(c.pipeline.svm.gamma); }});
        v.push_back({"tol",
                     [](Config& c, const KvEntry& e) {
                         const double t = kv_double(e);
                         if (!(t > 0.0)) throw KvError(e.line, "tol: must be positive");
                         c.pipeline.svm.tol = t;
                     },
                     [](const Config& c) { return num(c.pipeline.svm.tol); }});
        v.push_back({"max_iter", [](Config& c, const KvEntry& e) { c.pipeline.svm.max_iter = kv_uint(e); },
                     [](const Config& c) { return std::to_string(c.pipeline.svm.max_iter); }});
        v.push_back({"home_net", [](Config& c, const KvEntry& e) { c.pipeline.home_net = parse_cidr_list(e); },
                     [](const Config& c) { return cidr_list(c.pipeline.home_net); }});
        v.push_back(rate_key("syn_flood_count", &RuleThresholds::syn_flood, true));
        v.push_back(rate_key("syn_flood_seconds", &RuleThresholds::syn_flood, false));
        v.push_back(rate_key("udp_flood_count", &RuleThresholds::udp_flood, true));
        v.push_back(rate_key("udp_flood_seconds", &RuleThresholds::udp_flood, false));
        v.push_back(rate_key("dns_flood_count", &RuleThresholds::dns_flood, true));
        v.push_back(rate_key("dns_flood_seconds", &RuleThresholds::dns_flood, false));
        v.push_back(rate_key("http_flood_count", &RuleThresholds::http_flood, true));
        v.push_back(rate_key("http_flood_seconds", &RuleThresholds::http_flood, false));
        v.push_back(rate_key("port_scan_count", &RuleThresholds::port_scan, true));
        v.push_back(rate_key("port_scan_seconds", &RuleThresholds::port_scan, false));
        v.push_back(rate_key("os_scan_count", &RuleThresholds::os_scan, true));
        v.push_back(rate_key("os_scan_seconds", &RuleThresholds::os_scan, false));
        auto positive = [](double AttackDefaults::*field) {
            return [field](Config& c, const KvEntry& e) {
                const double v = kv_double(e);
                if (!(v > 0.0) || std::isinf(v)) throw KvError(e.line, e.key + ": must be positive");
                c.attacks.*field = v;
            };
        };
        auto show = [](double AttackDefaults::*field) { return [field](const Config& c) { return num(c.attacks.*field); }; };
        v.push_back({"flood_rate", positive(&AttackDefaults::flood_rate), show(&AttackDefaults::flood_rate)});
        v.push_back({"scan_rate", positive(&AttackDefaults::scan_rate), show(&AttackDefaults::scan_rate)});
        v.push_back({"pii_rate", positive(&AttackDefaults::pii_rate), show(&AttackDefaults::pii_rate)});
        v.push_back({"upload_rate", positive(&AttackDefaults::upload_rate), show(&AttackDefaults::upload_rate)});
        v.push_back({"attack_duration", positive(&AttackDefaults::duration), show(&AttackDefaults::duration)});
        v.push_back({"upload_bytes",
                     [](Config& c, const KvEntry& e) {
                         c.attacks.upload_bytes = static_cast<std::uint32_t>(kv_uint(e, 65535));
                     },
                     [](const Config& c) { return std::to_string(c.attacks.upload_bytes); }});
        v.push_back({"detection_grace",
                     [](Config& c, const KvEntry& e) {
                         const double v = kv_double(e);
                         if (v < 0.0 || std::isinf(v)) throw KvError(e.line, "detection_grace: must be non-negative");
                         c.detection_grace = v;
                     },
                     [](const Config& c) { return num(c.detection_grace); }});
        v.push_back({"segment_seconds",
                     [](Config& c, const KvEntry& e) { c.segment_seconds = to_seconds(positive_seconds(e)); },
                     [](const Config& c) { return num(c.segment_seconds); }});
        v.push_back({"unblock_between_attacks",
                     [](Config& c, const KvEntry& e) { c.unblock_between_attacks = kv_bool(e); },
                     [](const Config& c) { return std::string(c.unblock_between_attacks ? "true" : "false"); }});
        v.push_back({"rules_file", [](Config& c, const KvEntry& e) { c.rules_file = e.value; },
                     [](const Config& c) { return c.rules_file; }});
        return v;
    }();
    return k;
}

inline const Key* find_key(std::string_view name) {
    for (const auto& k : keys())
        if (name == k.name) return &k;
    return nullptr;
}

}  // namespace config_detail

inline std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : config_detail::keys()) out.emplace_back(k.name);
    return out;
}

inline void set_config_value(Config& c, const KvEntry& e) {
    const auto* k = config_detail::find_key(e.key);
    if (!k) throw KvError(e.line, "unknown config key '" + e.key + "'");
    k->set(c, e);
}

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

inline std::string env_name(std::string_view key) {
    std::string s = "SUNBLOCK_";
    for (char c : key) s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// File values first, then environment overrides, then validation.
inline Config parse_config(std::string_view text, const EnvLookup& env = process_env) {
    Config c;
    const auto sections = parse_kv(text);
    if (sections.size() > 1) throw KvError(sections[1].line, "config files take no sections");
    for (const auto& e : sections.front().entries) set_config_value(c, e);
    if (env)
        for (const auto& k : config_detail::keys()) {
            const std::string name = env_name(k.name);
            if (auto v = env(name)) {
                try {
                    k.set(c, KvEntry{k.name, std::string(trim(*v)), 0});
                } catch (const KvError& err) {
                    throw KvError(0, name + ": " + err.what());
                }
            }
        }
    try {
        c.pipeline.validate();
    } catch (const std::invalid_argument& err) {
        throw KvError(0, std::string("invalid config: ") + err.what());
    }
    return c;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline Config load_config(const std::filesystem::path& path, const EnvLookup& env = process_env) {
    Config c = parse_config(read_text_file(path), env);
    if (!c.rules_file.empty() && std::filesystem::path(c.rules_file).is_relative())
        c.rules_file = (path.parent_path() / c.rules_file).string();
    return c;
}

// Canonical key = value rendering of every setting, in key order.
inline std::string config_echo(const Config& c) {
    std::string out;
    for (const auto& k : config_detail::keys()) out += std::string(k.name) + " = " + k.get(c) + "\n";
    return out;
}

inline RuleSet load_rules(const Config& c, const std::vector<Cidr>& home_net) {
    const VarBindings vars = VarBindings::for_home_net(home_net);
    const std::string text = c.rules_file.empty() ? builtin_rules_text(c.thresholds) : read_text_file(c.rules_file);
    return parse_ruleset(text, vars);
}

}  // namespace sunblock
