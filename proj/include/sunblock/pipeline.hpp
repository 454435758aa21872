#pragma once

// The inline engine. Every packet passes, in order:
//   block table -> rule session -> per-device batch buffer (LAN sources only)
// and every full batch is scored against that device's one-class model.

#include <sunblock/events.hpp>
#include <sunblock/features.hpp>
#include <sunblock/ocsvm.hpp>
#include <sunblock/rule_engine.hpp>
#include <sunblock/rules.hpp>

#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sunblock {

class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct PipelineConfig {
    std::size_t batch_size = 200;
    Duration training_window = std::chrono::hours{24 * 7};
    Duration retrain_interval = std::chrono::hours{24};
    std::optional<Duration> block_duration = std::chrono::hours{1};  // nullopt blocks forever
    double vote_threshold = 0.5;
    std::size_t warmup_min_batches = 20;
    // Training sets larger than this are thinned to evenly spaced samples.
    std::size_t max_training_vectors = 2000;
    FeatureConfig features;
    OcsvmParams svm;
    std::vector<Cidr> home_net{Cidr::parse("192.168.1.0/24")};

    void validate() const {
        if (batch_size < 2) throw std::invalid_argument("batch_size must be at least 2");
        if (!(vote_threshold > 0.0 && vote_threshold <= 1.0))
            throw std::invalid_argument("anomaly_vote_threshold must lie in (0, 1]");
        if (features.dim == 0) throw std::invalid_argument("feature dim must be positive");
        if (features.flow_timeout.count() <= 0) throw std::invalid_argument("flow_timeout must be positive");
        if (training_window.count() <= 0 || retrain_interval.count() < 0)
            throw std::invalid_argument("training window must be positive");
        if (block_duration && block_duration->count() <= 0) throw std::invalid_argument("block_duration must be positive");
        if (max_training_vectors == 0) throw std::invalid_argument("max_training_vectors must be positive");
        if (!(svm.nu > 0.0 && svm.nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
    }
};

struct DetectorModel {
    Scaler scaler;
    OcsvmModel svm;
    Timestamp trained_at;
};

// Scoring always sees a model and scaler trained together.
class ModelSlot {
public:
    std::shared_ptr<const DetectorModel> load() const {
        std::lock_guard lock(mu_);
        return model_;
    }
    void store(std::shared_ptr<const DetectorModel> m) {
        std::lock_guard lock(mu_);
        model_ = std::move(m);
    }

private:
    mutable std::mutex mu_;
    std::shared_ptr<const DetectorModel> model_;
};

struct TrainingEntry {
    FeatureVector vector;
    std::uint64_t batch = 0;
};

struct DeviceState {
    explicit DeviceState(Ipv4Addr ip) : device(ip) {}

    Ipv4Addr device;
    std::vector<Packet> batch;
    std::deque<TrainingEntry> training;
    std::uint64_t batches_completed = 0;
    ModelSlot model;
    std::optional<Timestamp> last_trained;
};

class BlockTable {
public:
    bool blocked(Ipv4Addr src, Timestamp now) const {
        auto it = expiry_.find(src);
        return it != expiry_.end() && it->second > now;
    }

    void block(Ipv4Addr src, Timestamp until) {
        auto& e = expiry_[src];
        e = std::max(e, until);
    }

    void clear() { expiry_.clear(); }
    std::size_t size() const { return expiry_.size(); }

private:
    std::unordered_map<Ipv4Addr, Timestamp> expiry_;
};

struct PipelineCounters {
    std::uint64_t ingested = 0;
    std::uint64_t dropped_block = 0;
    std::uint64_t dropped_rule = 0;
    std::uint64_t passed = 0;
    std::uint64_t batches = 0;
    std::uint64_t retrains = 0;
    std::uint64_t retrains_skipped = 0;
    double training_seconds = 0.0;  // wall clock, not simulated
};

struct TrainingSummary {
    Ipv4Addr device;
    std::size_t vectors = 0;
    std::size_t support_vectors = 0;
    double wall_seconds = 0.0;
    bool converged = true;
};

// Deterministic thinning: indices floor(k * n / limit), k < limit.
template <class T>
std::vector<T> thin_evenly(const std::vector<T>& items, std::size_t limit) {
    if (items.size() <= limit) return items;
    std::vector<T> out;
    out.reserve(limit);
    for (std::size_t k = 0; k < limit; ++k) out.push_back(items[k * items.size() / limit]);
    return out;
}

// Fits scaler + model on raw (unscaled) IAT vectors.
inline DetectorModel fit_detector(const std::vector<std::vector<double>>& raw, const PipelineConfig& cfg, Timestamp now,
                                  double* wall_seconds = nullptr) {
    const auto started = std::chrono::steady_clock::now();
    const auto sample = thin_evenly(raw, cfg.max_training_vectors);
    DetectorModel d;
    d.scaler = fit_scaler(std::span<const std::vector<double>>(sample));
    std::vector<std::vector<double>> scaled;
    scaled.reserve(sample.size());
    for (const auto& r : sample) scaled.push_back(d.scaler.apply(r));
    d.svm = train(scaled, cfg.svm);
    d.trained_at = now;
    if (wall_seconds)
        *wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return d;
}

class Pipeline {
public:
    using EventSink = std::function<void(const ThreatEvent&)>;

    Pipeline(PipelineConfig cfg, RuleSet rules, EventSink sink = {})
        : cfg_(std::move(cfg)), rules_(std::move(rules)), sink_(std::move(sink)) {
        cfg_.validate();
    }

    Decision ingest(const Packet& p) {
        if (last_ts_ && p.ts < *last_ts_)
            throw InvariantViolation("packet timestamps went backwards at " + format_ts(p.ts));
        last_ts_ = p.ts;
        ++counters_.ingested;

        if (blocks_.blocked(p.src_ip, p.ts)) {
            ++counters_.dropped_block;
            return Decision::drop;
        }

        const MatchResult verdicts = rules_.inspect(p);
        for (const RuleVerdict& v : verdicts.verdicts) {
            const auto cls = threat_class_for_sid(v.sid);
            if (!cls) continue;
            const bool blocking = v.action == RuleAction::drop;
            emit({p.ts, *cls, p.src_ip, "sid:" + std::to_string(v.sid) + " " + v.msg,
                  blocking ? EventAction::block : EventAction::alert});
            if (blocking) block(p.src_ip, p.ts);
        }
        if (verdicts.decision == Decision::drop) {
            ++counters_.dropped_rule;
            return Decision::drop;
        }

        ++counters_.passed;
        if (is_lan(p.src_ip)) {
            DeviceState& dev = device_state(p.src_ip);
            dev.batch.push_back(p);
            if (dev.batch.size() >= cfg_.batch_size) {
                process_batch(dev, p.ts);
                maybe_retrain(dev, p.ts);
            }
        }
        return Decision::pass;
    }

    // Scores a full batch. Without a model the batch only feeds training.
    std::optional<ThreatEvent> process_batch(DeviceState& dev, Timestamp now) {
        ++counters_.batches;
        const std::uint64_t batch_id = dev.batches_completed++;
        std::vector<FeatureVector> vectors = extract_features(dev.batch, cfg_.features);
        dev.batch.clear();

        std::optional<ThreatEvent> event;
        if (const auto model = dev.model.load(); model && !vectors.empty()) {
            std::size_t anomalous = 0;
            for (const auto& v : vectors)
                if (is_anomalous(model->svm, model->scaler.apply(v.values))) ++anomalous;
            const double fraction = static_cast<double>(anomalous) / static_cast<double>(vectors.size());
            if (fraction >= cfg_.vote_threshold) {
                char detail[96];
                std::snprintf(detail, sizeof detail, "vote %.2f (%zu/%zu)", fraction, anomalous, vectors.size());
                event = ThreatEvent{now, ThreatClass::MlAnomaly, dev.device, detail, EventAction::block};
                emit(*event);
                block(dev.device, now);
                return event;
            }
        }
        for (auto& v : vectors) dev.training.push_back({std::move(v), batch_id});
        evict_training(dev, now);
        return event;
    }

    // Refits the device model on its training window. Returns false (and
    // counts a skip) when the window holds too little data.
    bool retrain(DeviceState& dev, Timestamp now) {
        evict_training(dev, now);
        std::size_t batches = 0;
        std::optional<std::uint64_t> prev;
        for (const auto& e : dev.training) {
            if (prev != e.batch) ++batches;
            prev = e.batch;
        }
        const std::size_t need = std::max<std::size_t>(cfg_.warmup_min_batches, 1);
        if (batches < need || dev.training.size() < need) {
            ++counters_.retrains_skipped;
            return false;
        }
        std::vector<std::vector<double>> raw;
        raw.reserve(dev.training.size());
        for (const auto& e : dev.training) raw.push_back(e.vector.values);
        double wall = 0.0;
        dev.model.store(std::make_shared<const DetectorModel>(fit_detector(raw, cfg_, now, &wall)));
        dev.last_trained = now;
        ++counters_.retrains;
        counters_.training_seconds += wall;
        const auto current = dev.model.load();
        trainings_.push_back({dev.device, std::min(raw.size(), cfg_.max_training_vectors), current->svm.alphas.size(),
                              wall, current->svm.converged});
        return true;
    }

    bool retrain(Ipv4Addr device, Timestamp now) { return retrain(device_state(device), now); }

    void install_model(Ipv4Addr device, DetectorModel model) {
        DeviceState& dev = device_state(device);
        dev.last_trained = model.trained_at;
        dev.model.store(std::make_shared<const DetectorModel>(std::move(model)));
    }

    // Explicit unblock, used to restore normal operation between experiments.
    void unblock_all() { blocks_.clear(); }

    bool is_lan(Ipv4Addr a) const {
        for (const Cidr& c : cfg_.home_net)
            if (c.contains(a)) return true;
        return false;
    }

    const std::vector<ThreatEvent>& events() const { return events_; }
    const PipelineCounters& counters() const { return counters_; }
    const std::vector<TrainingSummary>& trainings() const { return trainings_; }
    const BlockTable& blocks() const { return blocks_; }
    const PipelineConfig& config() const { return cfg_; }
    const RuleSession& rules() const { return rules_; }

    const DeviceState* device(Ipv4Addr ip) const {
        auto it = devices_.find(ip);
        return it == devices_.end() ? nullptr : it->second.get();
    }
    DeviceState& device_state(Ipv4Addr ip) {
        auto& slot = devices_[ip];
        if (!slot) slot = std::make_unique<DeviceState>(ip);
        return *slot;
    }

    // Every ingested packet is accounted for exactly once.
    void check_conservation() const {
        if (counters_.dropped_block + counters_.dropped_rule + counters_.passed != counters_.ingested)
            throw InvariantViolation("packet conservation violated");
    }

private:
    void emit(ThreatEvent e) {
        if (!events_.empty() && e.ts < events_.back().ts) throw InvariantViolation("event stream went backwards");
        if (sink_) sink_(e);
        events_.push_back(std::move(e));
    }

    void block(Ipv4Addr src, Timestamp now) {
        blocks_.block(src, cfg_.block_duration ? now + *cfg_.block_duration : kNever);
    }

    void evict_training(DeviceState& dev, Timestamp now) {
        while (!dev.training.empty() && dev.training.front().vector.window_ts <= now - cfg_.training_window)
            dev.training.pop_front();
    }

    void maybe_retrain(DeviceState& dev, Timestamp now) {
        if (dev.last_trained && now - *dev.last_trained < cfg_.retrain_interval) return;
        retrain(dev, now);
    }

    PipelineConfig cfg_;
    RuleSession rules_;
    EventSink sink_;
    BlockTable blocks_;
    std::map<Ipv4Addr, std::unique_ptr<DeviceState>> devices_;
    std::vector<ThreatEvent> events_;
    std::vector<TrainingSummary> trainings_;
    PipelineCounters counters_;
    std::optional<Timestamp> last_ts_;
};

// Seconds from attack start to the first blocking event of the class, if any.
inline std::optional<double> prevention_latency(std::span<const ThreatEvent> events, Timestamp attack_start,
                                                ThreatClass cls) {
    for (const auto& e : events)
        if (e.ts >= attack_start && e.threat_class == cls && e.action == EventAction::block)
            return to_seconds(e.ts - attack_start);
    return std::nullopt;
}

}  // namespace sunblock
