#pragma once

// Flow assembly and inter-arrival-time (IAT) features.

#include <sunblock/packet.hpp>
#include <sunblock/time.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sunblock {

struct FeatureConfig {
    std::size_t dim = 10;
    Duration flow_timeout = std::chrono::seconds{10};
    std::size_t min_packets = 2;
};

struct Flow {
    FiveTuple key;
    std::vector<Timestamp> timestamps;
    std::vector<std::uint32_t> sizes;

    Timestamp first_ts() const { return timestamps.front(); }
    Timestamp last_ts() const { return timestamps.back(); }
    std::size_t packets() const { return timestamps.size(); }
};

struct FeatureVector {
    std::vector<double> values;
    FiveTuple source_flow;
    Timestamp window_ts;
};

class InsufficientPackets : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Groups time-sorted packets by directional five-tuple. A silence longer than
// the flow timeout closes the open flow for that tuple. Flows are returned in
// order of their first packet; short flows are kept for diagnostics.
inline std::vector<Flow> assemble_flows(std::span<const Packet> packets, const FeatureConfig& cfg) {
    std::vector<Flow> flows;
    std::unordered_map<FiveTuple, std::size_t, FiveTupleHash> open;
    for (const Packet& p : packets) {
        const FiveTuple key = five_tuple(p);
        auto it = open.find(key);
        if (it == open.end() || p.ts - flows[it->second].last_ts() > cfg.flow_timeout) {
            const std::size_t idx = flows.size();
            flows.push_back(Flow{key, {}, {}});
            if (it == open.end())
                open.emplace(key, idx);
            else
                it->second = idx;
            it = open.find(key);
        }
        Flow& f = flows[it->second];
        f.timestamps.push_back(p.ts);
        f.sizes.push_back(p.length);
    }
    return flows;
}

inline bool usable(const Flow& f, const FeatureConfig& cfg) { return f.packets() >= std::max<std::size_t>(cfg.min_packets, 2); }

// First `dim` successive inter-arrival times in seconds, zero-padded on the right.
inline FeatureVector iat_vector(const Flow& flow, std::size_t dim) {
    if (flow.packets() < 2) throw InsufficientPackets("IAT vector needs a flow with at least 2 packets");
    if (dim == 0) throw std::invalid_argument("feature dimension must be positive");
    FeatureVector v;
    v.source_flow = flow.key;
    v.window_ts = flow.first_ts();
    v.values.assign(dim, 0.0);
    const std::size_t n = std::min(dim, flow.packets() - 1);
    for (std::size_t i = 0; i < n; ++i) v.values[i] = to_seconds(flow.timestamps[i + 1] - flow.timestamps[i]);
    return v;
}

// Vectors for every usable flow in a packet batch.
inline std::vector<FeatureVector> extract_features(std::span<const Packet> packets, const FeatureConfig& cfg) {
    std::vector<FeatureVector> out;
    for (const Flow& f : assemble_flows(packets, cfg))
        if (usable(f, cfg)) out.push_back(iat_vector(f, cfg.dim));
    return out;
}

inline constexpr double kStdFloor = 1e-6;

// Per-dimension z-score. Population standard deviation, clamped below.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> std;

    std::size_t dim() const { return mean.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != dim()) throw std::invalid_argument("scaler dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / std[i];
        return out;
    }

    friend bool operator==(const Scaler&, const Scaler&) = default;
};

inline Scaler fit_scaler(std::span<const std::vector<double>> rows) {
    if (rows.empty()) throw std::invalid_argument("cannot fit a scaler on an empty training set");
    const std::size_t d = rows.front().size();
    Scaler s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (const auto& r : rows) {
        if (r.size() != d) throw std::invalid_argument("ragged training rows");
        for (std::size_t i = 0; i < d; ++i) s.mean[i] += r[i];
    }
    const double n = static_cast<double>(rows.size());
    for (auto& m : s.mean) m /= n;
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i) s.std[i] += (r[i] - s.mean[i]) * (r[i] - s.mean[i]);
    for (auto& v : s.std) v = std::max(std::sqrt(v / n), kStdFloor);
    return s;
}

inline Scaler fit_scaler(std::span<const FeatureVector> vectors) {
    std::vector<std::vector<double>> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) rows.push_back(v.values);
    return fit_scaler(std::span<const std::vector<double>>(rows));
}

inline FeatureVector apply_scaler(const Scaler& s, const FeatureVector& v) {
    FeatureVector out = v;
    out.values = s.apply(v.values);
    return out;
}

// Debug dump: window_ts, five-tuple, v1..v_dim, tab separated.
inline void write_feature_dump(std::ostream& out, std::span<const FeatureVector> vectors) {
    char buf[32];
    for (const auto& v : vectors) {
        out << format_ts(v.window_ts) << '\t' << v.source_flow.to_string();
        for (double x : v.values) {
            std::snprintf(buf, sizeof buf, "%.9g", x);
            out << '\t' << buf;
        }
        out << '\n';
    }
}

}  // namespace sunblock
