#pragma once

// End-to-end runs: scenario simulation, pcap replay and offline training,
// plus the report files they produce.

#include <sunblock/config.hpp>
#include <sunblock/model_io.hpp>
#include <sunblock/pcap.hpp>
#include <sunblock/pipeline.hpp>
#include <sunblock/scenario_file.hpp>
#include <sunblock/threatgen.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sunblock {

enum ExitCode : int { kExitOk = 0, kExitInputError = 2, kExitInvariant = 3 };

struct AttackOutcome {
    GroundTruth label;
    std::optional<double> latency;  // seconds from attack start to the matching block event
};

struct KindReport {
    AttackKind kind = AttackKind::SynFlood;
    std::size_t total = 0;
    std::size_t detected = 0;
    std::vector<double> latencies;  // detected iterations, in label order

    // Median over all iterations; a missed iteration counts as infinitely late.
    double median_latency() const {
        std::vector<double> v = latencies;
        v.resize(total, std::numeric_limits<double>::infinity());
        if (v.empty()) return std::numeric_limits<double>::infinity();
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    }
};

struct RunReport {
    std::uint64_t seed = 0;
    std::string config;
    std::vector<AttackOutcome> outcomes;
    std::vector<KindReport> kinds;
    std::size_t false_positives = 0;
    std::size_t block_events = 0;
    std::size_t alert_events = 0;
    std::map<ThreatClass, std::size_t> events_by_class;
    PipelineCounters counters;
    std::vector<TrainingSummary> trainings;
    double simulated_seconds = 0.0;
    double wall_seconds = 0.0;

    const KindReport* kind(AttackKind k) const {
        for (const auto& r : kinds)
            if (r.kind == k) return &r;
        return nullptr;
    }
};

// Joins events with ground truth. An attack is detected by the first block
// event of its expected class from its source within [start, end + grace].
// Block events that fall inside no attack window of their source are false
// positives.
inline void evaluate(std::span<const ThreatEvent> events, std::span<const GroundTruth> labels, double grace,
                     RunReport& r) {
    const Duration g = seconds_to_duration(grace);
    r.outcomes.clear();
    r.kinds.clear();
    r.events_by_class.clear();
    r.block_events = r.alert_events = r.false_positives = 0;
    for (const auto& label : labels) {
        AttackOutcome o{label, std::nullopt};
        for (const auto& e : events) {
            if (e.ts < label.start) continue;
            if (e.ts > label.end + g) break;
            if (e.action == EventAction::block && e.source == label.source && e.threat_class == expected_class(label.kind)) {
                o.latency = to_seconds(e.ts - label.start);
                break;
            }
        }
        r.outcomes.push_back(o);
    }
    for (std::size_t k = 0; k < kAttackKindNames.size(); ++k) {
        KindReport kr{static_cast<AttackKind>(k), 0, 0, {}};
        for (const auto& o : r.outcomes) {
            if (o.label.kind != kr.kind) continue;
            ++kr.total;
            if (o.latency) {
                ++kr.detected;
                kr.latencies.push_back(*o.latency);
            }
        }
        if (kr.total) r.kinds.push_back(std::move(kr));
    }
    for (const auto& e : events) {
        ++r.events_by_class[e.threat_class];
        if (e.action == EventAction::alert) {
            ++r.alert_events;
            continue;
        }
        ++r.block_events;
        const bool explained = std::any_of(labels.begin(), labels.end(), [&](const GroundTruth& l) {
            return l.source == e.source && e.ts >= l.start && e.ts <= l.end + g;
        });
        if (!explained) ++r.false_positives;
    }
}

namespace harness_detail {

inline std::string fixed(double v) {
    if (std::isinf(v)) return "inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    return out;
}

}  // namespace harness_detail

// Deterministic summary: no wall-clock values.
inline std::string format_report(const RunReport& r) {
    using harness_detail::fixed;
    std::string s = "# run report\nseed\t" + std::to_string(r.seed) + "\n";
    s += "simulated_seconds\t" + fixed(r.simulated_seconds) + "\n";
    s += "packets\t" + std::to_string(r.counters.ingested) + "\n";
    s += "dropped_by_block\t" + std::to_string(r.counters.dropped_block) + "\n";
    s += "dropped_by_rule\t" + std::to_string(r.counters.dropped_rule) + "\n";
    s += "passed\t" + std::to_string(r.counters.passed) + "\n";
    s += "batches\t" + std::to_string(r.counters.batches) + "\n";
    s += "retrains\t" + std::to_string(r.counters.retrains) + "\n";
    s += "retrains_skipped\t" + std::to_string(r.counters.retrains_skipped) + "\n";
    s += "block_events\t" + std::to_string(r.block_events) + "\n";
    s += "alert_events\t" + std::to_string(r.alert_events) + "\n";
    s += "false_positives\t" + std::to_string(r.false_positives) + "\n";
    for (const auto& [cls, n] : r.events_by_class)
        s += "events_" + std::string(to_string(cls)) + "\t" + std::to_string(n) + "\n";
    s += "\n# threat\tdetected\ttotal\tmedian_latency_s\tmax_latency_s\n";
    for (const auto& k : r.kinds) {
        const double mx = k.latencies.empty() ? std::numeric_limits<double>::infinity()
                                              : *std::max_element(k.latencies.begin(), k.latencies.end());
        s += std::string(to_string(k.kind)) + "\t" + std::to_string(k.detected) + "\t" + std::to_string(k.total) + "\t" +
             fixed(k.median_latency()) + "\t" + fixed(mx) + "\n";
    }
    s += "\n# iteration\tthreat\tsource\tstart\tend\tlatency_s\n";
    for (const auto& o : r.outcomes)
        s += std::to_string(o.label.iteration) + "\t" + std::string(to_string(o.label.kind)) + "\t" +
             o.label.source.to_string() + "\t" + format_ts(o.label.start) + "\t" + format_ts(o.label.end) + "\t" +
             (o.latency ? fixed(*o.latency) : std::string("none")) + "\n";
    s += "\n# config\n" + r.config;
    return s;
}

// Sorted latencies with their empirical CDF value i/n.
inline std::string format_ecdf(std::vector<double> latencies) {
    std::sort(latencies.begin(), latencies.end());
    std::string s = "# latency_s\tecdf\n";
    for (std::size_t i = 0; i < latencies.size(); ++i)
        s += harness_detail::fixed(latencies[i]) + "\t" +
             harness_detail::fixed(static_cast<double>(i + 1) / static_cast<double>(latencies.size())) + "\n";
    return s;
}

inline std::string format_timing(const RunReport& r) {
    std::string s = "# device\tvectors\tsupport_vectors\twall_seconds\tconverged\n";
    for (const auto& t : r.trainings)
        s += t.device.to_string() + "\t" + std::to_string(t.vectors) + "\t" + std::to_string(t.support_vectors) + "\t" +
             harness_detail::fixed(t.wall_seconds) + "\t" + (t.converged ? "yes" : "no") + "\n";
    s += "training_wall_seconds\t" + harness_detail::fixed(r.counters.training_seconds) + "\n";
    s += "run_wall_seconds\t" + harness_detail::fixed(r.wall_seconds) + "\n";
    return s;
}

inline void write_reports(const std::filesystem::path& dir, const RunReport& r) {
    harness_detail::open_out(dir / "report.tsv") << format_report(r);
    for (const auto& k : r.kinds)
        harness_detail::open_out(dir / ("latency_" + std::string(to_string(k.kind)) + ".tsv")) << format_ecdf(k.latencies);
    harness_detail::open_out(dir / "timing.tsv") << format_timing(r);
}

inline PipelineConfig pipeline_config(const Config& c, const std::vector<Cidr>& home_net) {
    PipelineConfig p = c.pipeline;
    p.home_net = home_net;
    return p;
}

// Streams a scenario through a fresh pipeline segment by segment.
inline RunReport simulate(const ScenarioPlan& plan, const Config& cfg, const Pipeline::EventSink& sink = {}) {
    const auto started = std::chrono::steady_clock::now();
    const auto& home = plan.spec().home_net;
    Pipeline pipe(pipeline_config(cfg, home), load_rules(cfg, home), sink);

    std::vector<Timestamp> resets;
    if (cfg.unblock_between_attacks)
        for (const auto& a : plan.attacks()) resets.push_back(a.start);
    std::sort(resets.begin(), resets.end());
    std::size_t next_reset = 0;

    const Duration step = seconds_to_duration(cfg.segment_seconds);
    for (Timestamp t = kEpoch; t < plan.end(); t += step) {
        const Timestamp t1 = std::min(plan.end(), t + step);
        for (const Packet& p : plan.segment(t, t1)) {
            while (next_reset < resets.size() && resets[next_reset] <= p.ts) {
                pipe.unblock_all();
                ++next_reset;
            }
            pipe.ingest(p);
        }
    }
    pipe.check_conservation();

    RunReport r;
    r.seed = plan.spec().seed;
    r.config = config_echo(cfg);
    r.counters = pipe.counters();
    r.trainings = pipe.trainings();
    r.simulated_seconds = to_seconds(plan.end());
    evaluate(pipe.events(), plan.labels(), cfg.detection_grace, r);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
}

// Runs a packet sequence with no ground truth.
inline RunReport replay(std::span<const Packet> packets, const Config& cfg, const Pipeline::EventSink& sink = {}) {
    const auto started = std::chrono::steady_clock::now();
    Pipeline pipe(cfg.pipeline, load_rules(cfg, cfg.pipeline.home_net), sink);
    for (const Packet& p : packets) pipe.ingest(p);
    pipe.check_conservation();
    RunReport r;
    r.config = config_echo(cfg);
    r.counters = pipe.counters();
    r.trainings = pipe.trainings();
    if (!packets.empty()) r.simulated_seconds = to_seconds(packets.back().ts - packets.front().ts);
    evaluate(pipe.events(), {}, cfg.detection_grace, r);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
}

struct DeviceTraining {
    Ipv4Addr device;
    std::size_t packets = 0;
    std::size_t batches = 0;
    std::size_t vectors = 0;
    std::optional<DetectorModel> model;
    std::optional<TrainingSummary> summary;
    std::string skipped;  // reason when no model was trained
};

// Offline counterpart of the pipeline's warm-up: every LAN device's packets
// are cut into batches, IAT vectors extracted per batch, and the vectors
// inside the training window ending at the device's last packet are fitted.
inline std::vector<DeviceTraining> train_offline(std::span<const Packet> packets, const PipelineConfig& cfg) {
    auto is_lan = [&](Ipv4Addr a) {
        return std::any_of(cfg.home_net.begin(), cfg.home_net.end(), [&](const Cidr& c) { return c.contains(a); });
    };
    std::map<Ipv4Addr, std::vector<Packet>> per_device;
    for (const Packet& p : packets)
        if (is_lan(p.src_ip)) per_device[p.src_ip].push_back(p);

    std::vector<DeviceTraining> out;
    for (auto& [ip, pkts] : per_device) {
        DeviceTraining d;
        d.device = ip;
        d.packets = pkts.size();
        std::vector<FeatureVector> vectors;
        std::size_t batches_with_vectors = 0;
        for (std::size_t i = 0; i + cfg.batch_size <= pkts.size(); i += cfg.batch_size) {
            ++d.batches;
            auto v = extract_features(std::span<const Packet>(pkts).subspan(i, cfg.batch_size), cfg.features);
            if (!v.empty()) ++batches_with_vectors;
            vectors.insert(vectors.end(), v.begin(), v.end());
        }
        const Timestamp now = pkts.back().ts;
        std::erase_if(vectors, [&](const FeatureVector& v) { return v.window_ts <= now - cfg.training_window; });
        d.vectors = vectors.size();
        const std::size_t need = std::max<std::size_t>(cfg.warmup_min_batches, 1);
        if (batches_with_vectors < need || vectors.size() < need) {
            d.skipped = "insufficient data: " + std::to_string(d.batches) + " batches, " + std::to_string(d.vectors) +
                        " vectors (need " + std::to_string(need) + ")";
            out.push_back(std::move(d));
            continue;
        }
        std::vector<std::vector<double>> raw;
        raw.reserve(vectors.size());
        for (auto& v : vectors) raw.push_back(std::move(v.values));
        double wall = 0.0;
        d.model = fit_detector(raw, cfg, now, &wall);
        d.summary = TrainingSummary{ip, std::min(raw.size(), cfg.max_training_vectors), d.model->svm.alphas.size(), wall,
                                    d.model->svm.converged};
        out.push_back(std::move(d));
    }
    return out;
}

inline std::string device_file_stem(Ipv4Addr ip) {
    std::string s = ip.to_string();
    std::replace(s.begin(), s.end(), '.', '_');
    return s;
}

inline std::string format_training_summary(std::span<const DeviceTraining> results) {
    std::string s = "# device\tpackets\tbatches\tvectors_used\tsupport_vectors\tsv_fraction\twall_seconds\tstatus\n";
    for (const auto& d : results) {
        s += d.device.to_string() + "\t" + std::to_string(d.packets) + "\t" + std::to_string(d.batches) + "\t";
        if (d.summary) {
            const double frac = static_cast<double>(d.summary->support_vectors) / static_cast<double>(d.summary->vectors);
            s += std::to_string(d.summary->vectors) + "\t" + std::to_string(d.summary->support_vectors) + "\t" +
                 harness_detail::fixed(frac) + "\t" + harness_detail::fixed(d.summary->wall_seconds) + "\t" +
                 (d.summary->converged ? "trained" : "trained-unconverged") + "\n";
        } else {
            s += std::to_string(d.vectors) + "\t0\t-\t-\t" + d.skipped + "\n";
        }
    }
    return s;
}

// Command entry points. Each returns an exit code and reports problems on `err`.

inline int cmd_run(const std::filesystem::path& scenario_path, const std::filesystem::path& config_path,
                   const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed, std::ostream& err) {
    ScenarioPlan plan;
    Config cfg;
    std::ofstream events;
    try {
        cfg = load_config(config_path);
        ScenarioSpec spec = load_scenario(scenario_path);
        if (seed) spec.seed = *seed;
        plan = plan_scenario(spec, cfg.attacks);
        std::filesystem::create_directories(out_dir);
        events = harness_detail::open_out(out_dir / "events.log");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    try {
        const RunReport r = simulate(plan, cfg, [&](const ThreatEvent& e) { write_event(events, e); });
        write_reports(out_dir, r);
        err << "run: " << r.counters.ingested << " packets, " << r.block_events << " block events, "
            << r.false_positives << " false positives, " << harness_detail::fixed(r.wall_seconds) << " s wall\n";
        for (const auto& k : r.kinds)
            err << "  " << to_string(k.kind) << ": " << k.detected << "/" << k.total << " detected, median "
                << harness_detail::fixed(k.median_latency()) << " s\n";
    } catch (const InvariantViolation& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

inline int cmd_replay(const std::filesystem::path& pcap_path, const std::filesystem::path& config_path,
                      const std::filesystem::path& out_dir, std::ostream& err) {
    Config cfg;
    CaptureResult cap;
    std::ofstream events;
    try {
        cfg = load_config(config_path);
        cap = read_capture(pcap_path);
        std::filesystem::create_directories(out_dir);
        events = harness_detail::open_out(out_dir / "events.log");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    if (cap.truncated || cap.malformed) err << "warning: " << cap.warnings() << " unreadable records in capture\n";
    if (!std::is_sorted(cap.packets.begin(), cap.packets.end(), [](const Packet& a, const Packet& b) { return a.ts < b.ts; })) {
        err << "warning: capture is not time-ordered; packets were sorted by timestamp\n";
        gen_detail::sort_by_time(cap.packets);
    }
    try {
        const RunReport r = replay(cap.packets, cfg, [&](const ThreatEvent& e) { write_event(events, e); });
        write_reports(out_dir, r);
        err << "replay: " << r.counters.ingested << " packets, " << r.block_events << " block events, "
            << r.alert_events << " alerts\n";
    } catch (const InvariantViolation& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

inline int cmd_train(const std::filesystem::path& pcap_path, const std::filesystem::path& config_path,
                     const std::filesystem::path& model_dir, std::ostream& err) {
    Config cfg;
    CaptureResult cap;
    try {
        cfg = load_config(config_path);
        cap = read_capture(pcap_path);
        std::filesystem::create_directories(model_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    gen_detail::sort_by_time(cap.packets);
    try {
        const auto results = train_offline(cap.packets, cfg.pipeline);
        std::size_t trained = 0;
        for (const auto& d : results) {
            if (!d.model) {
                err << "skipped " << d.device.to_string() << ": " << d.skipped << "\n";
                continue;
            }
            ++trained;
            const std::string stem = device_file_stem(d.device);
            save_model(d.model->svm, model_dir / (stem + ".model"));
            save_scaler(d.model->scaler, model_dir / (stem + ".scaler"));
            if (!d.model->svm.warning.empty()) err << "warning: " << d.device.to_string() << ": " << d.model->svm.warning << "\n";
            err << "trained " << d.device.to_string() << ": " << d.summary->vectors << " vectors, "
                << d.summary->support_vectors << " support vectors, " << harness_detail::fixed(d.summary->wall_seconds)
                << " s wall\n";
        }
        harness_detail::open_out(model_dir / "summary.tsv") << format_training_summary(results);
        if (trained == 0) {
            err << "error: no trainable devices in capture\n";
            return kExitInputError;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

inline int cmd_generate(const std::filesystem::path& scenario_path, const std::filesystem::path& config_path,
                        const std::filesystem::path& pcap_path, std::optional<std::uint64_t> seed,
                        const std::filesystem::path& labels_path, std::ostream& err) {
    try {
        const Config cfg = load_config(config_path);
        ScenarioSpec spec = load_scenario(scenario_path);
        if (seed) spec.seed = *seed;
        const ScenarioPlan plan = plan_scenario(spec, cfg.attacks);
        const auto packets = plan.packets();
        write_capture(pcap_path, packets);
        if (!labels_path.empty()) {
            auto out = harness_detail::open_out(labels_path);
            out << "# iteration\tthreat\tsource\tstart\tend\n";
            for (const auto& l : plan.labels())
                out << l.iteration << '\t' << to_string(l.kind) << '\t' << l.source.to_string() << '\t'
                    << format_ts(l.start) << '\t' << format_ts(l.end) << '\n';
        }
        err << "generated " << packets.size() << " packets\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

}  // namespace sunblock
