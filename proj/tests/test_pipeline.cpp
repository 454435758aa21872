#include <sunblock/pipeline.hpp>
#include <sunblock/scenario_file.hpp>
#include <sunblock/threatgen.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace sunblock;

namespace {

const Ipv4Addr kAttacker = Ipv4Addr::parse("203.0.113.66");
const Ipv4Addr kCamera = Ipv4Addr::parse("192.168.1.20");
const Ipv4Addr kCloud = Ipv4Addr::parse("52.94.233.10");

RuleSet builtin() { return parse_ruleset(builtin_rules_text(), VarBindings::for_home_net({Cidr::parse("192.168.1.0/24")})); }

Packet syn(double t, Ipv4Addr src = kAttacker) {
    return make_packet(at_seconds(t), Protocol::TCP, src, 40000, kCamera, 80, kSyn);
}

Packet lan(double t, std::uint16_t sport, Ipv4Addr src = kCamera) {
    return make_packet(at_seconds(t), Protocol::TCP, src, sport, kCloud, 443, kPshAck, {}, 100);
}

// Two-packet flows with the given inter-arrival gaps, one flow per source port,
// returned time-sorted.
std::vector<Packet> two_packet_flows(double t0, const std::vector<double>& gaps, Ipv4Addr src = kCamera) {
    std::vector<Packet> out;
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        const double start = t0 + 0.01 * static_cast<double>(k);
        const auto port = static_cast<std::uint16_t>(50000 + k);
        out.push_back(lan(start, port, src));
        out.push_back(lan(start + gaps[k], port, src));
    }
    gen_detail::sort_by_time(out);
    return out;
}

// One-dimensional model trained on gaps spread over [0.9, 1.1] seconds.
DetectorModel one_second_model(const PipelineConfig& cfg) {
    std::vector<std::vector<double>> raw;
    for (int i = 0; i < 200; ++i) raw.push_back({0.9 + 0.001 * i});
    return fit_detector(raw, cfg, kEpoch);
}

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.features.dim = 1;
    cfg.batch_size = 24;
    cfg.warmup_min_batches = 1000000;  // no automatic training unless a test asks
    return cfg;
}

}  // namespace

TEST(Pipeline, SynFloodBlocksThenSilences) {
    std::vector<ThreatEvent> sunk;
    Pipeline p(PipelineConfig{}, builtin(), [&](const ThreatEvent& e) { sunk.push_back(e); });
    for (int i = 1; i <= 300; ++i) {
        const Decision d = p.ingest(syn(10.0 + (i - 1) * 0.001));
        if (i <= 100) EXPECT_EQ(d, Decision::pass) << i;
        else EXPECT_EQ(d, Decision::drop) << i;
    }
    ASSERT_EQ(p.events().size(), 1u);
    const ThreatEvent& e = p.events()[0];
    EXPECT_EQ(e.threat_class, ThreatClass::SynFlood);
    EXPECT_EQ(e.action, EventAction::block);
    EXPECT_EQ(e.source, kAttacker);
    EXPECT_EQ(e.ts, at_seconds(10.1));
    EXPECT_EQ(e.detail, "sid:1001001 SYN flood");
    EXPECT_EQ(sunk, p.events());
    EXPECT_EQ(p.counters().dropped_rule, 1u);
    EXPECT_EQ(p.counters().dropped_block, 199u);
    EXPECT_EQ(p.counters().passed, 100u);
    p.check_conservation();
}

TEST(Pipeline, BlockedSourceDropsWithoutEvent) {
    Pipeline p(PipelineConfig{}, builtin());
    for (int i = 0; i < 101; ++i) p.ingest(syn(i * 0.001));
    const auto before = p.events().size();
    const auto trackers = p.rules().trackers().size();
    const auto q = make_packet(at_seconds(5), Protocol::UDP, kAttacker, 1, kCamera, 9999);
    EXPECT_EQ(p.ingest(q), Decision::drop);
    EXPECT_EQ(p.events().size(), before);
    EXPECT_EQ(p.rules().trackers().size(), trackers);  // the blocked packet reached no tracker
}

TEST(Pipeline, BlockExpiresAfterDuration) {
    Pipeline p(PipelineConfig{}, builtin());
    for (int i = 0; i < 101; ++i) p.ingest(syn(i * 0.001));
    EXPECT_TRUE(p.blocks().blocked(kAttacker, at_seconds(3600.0)));
    EXPECT_FALSE(p.blocks().blocked(kAttacker, at_seconds(3600.1)));
    EXPECT_EQ(p.ingest(syn(3600.2)), Decision::pass);
}

TEST(Pipeline, InfiniteBlock) {
    PipelineConfig cfg;
    cfg.block_duration.reset();
    Pipeline p(cfg, builtin());
    for (int i = 0; i < 101; ++i) p.ingest(syn(i * 0.001));
    EXPECT_EQ(p.ingest(syn(1e7)), Decision::drop);
    p.unblock_all();
    EXPECT_EQ(p.ingest(syn(1e7 + 1)), Decision::pass);
}

TEST(Pipeline, BenignPacketIsBuffered) {
    Pipeline p(PipelineConfig{}, builtin());
    EXPECT_EQ(p.ingest(lan(1.0, 50000)), Decision::pass);
    ASSERT_NE(p.device(kCamera), nullptr);
    EXPECT_EQ(p.device(kCamera)->batch.size(), 1u);
    EXPECT_TRUE(p.events().empty());
    // WAN sources are never batched.
    p.ingest(make_packet(at_seconds(2), Protocol::TCP, kCloud, 443, kCamera, 50000, kPshAck));
    EXPECT_EQ(p.device(kCloud), nullptr);
}

TEST(Pipeline, AlertOnlyRuleDoesNotBlock) {
    Pipeline p(PipelineConfig{}, builtin());
    const auto http = make_packet(at_seconds(1), Protocol::TCP, kCamera, 50000, kAttacker, 80, kPshAck, to_bytes("hello"));
    EXPECT_EQ(p.ingest(http), Decision::pass);
    ASSERT_EQ(p.events().size(), 1u);
    EXPECT_EQ(p.events()[0].threat_class, ThreatClass::PlainHttp);
    EXPECT_EQ(p.events()[0].action, EventAction::alert);
    EXPECT_FALSE(p.blocks().blocked(kCamera, at_seconds(2)));
}

TEST(Pipeline, UnmappedSidDropsWithoutEvent) {
    Pipeline p(PipelineConfig{}, parse_ruleset("drop udp any any -> any 9 (msg:\"discard\"; sid:5;)"));
    EXPECT_EQ(p.ingest(make_packet(kEpoch, Protocol::UDP, kAttacker, 1, kCamera, 9)), Decision::drop);
    EXPECT_TRUE(p.events().empty());
    EXPECT_FALSE(p.blocks().blocked(kAttacker, kEpoch));
}

TEST(Pipeline, TimestampsMustNotGoBackwards) {
    Pipeline p(PipelineConfig{}, builtin());
    p.ingest(lan(5, 1));
    EXPECT_THROW(p.ingest(lan(4, 1)), InvariantViolation);
}

TEST(Pipeline, WarmupBatchesOnlyTrain) {
    PipelineConfig cfg = small_config();
    cfg.warmup_min_batches = 3;
    Pipeline p(cfg, builtin());
    std::vector<double> gaps(12, 1.0);
    for (int b = 0; b < 2; ++b)
        for (const auto& pk : two_packet_flows(100.0 * b, gaps)) p.ingest(pk);
    const DeviceState* d = p.device(kCamera);
    EXPECT_EQ(d->batches_completed, 2u);
    EXPECT_EQ(d->training.size(), 24u);
    EXPECT_EQ(d->model.load(), nullptr);
    EXPECT_TRUE(p.events().empty());
    EXPECT_EQ(p.counters().retrains_skipped, 2u);

    for (const auto& pk : two_packet_flows(200.0, gaps)) p.ingest(pk);
    EXPECT_NE(d->model.load(), nullptr);
    EXPECT_EQ(p.counters().retrains, 1u);
    ASSERT_EQ(p.trainings().size(), 1u);
    EXPECT_EQ(p.trainings()[0].vectors, 36u);
}

TEST(Pipeline, OutlierBatchBlocksDevice) {
    const PipelineConfig cfg = small_config();
    Pipeline p(cfg, builtin());
    p.install_model(kCamera, one_second_model(cfg));
    const auto pkts = two_packet_flows(50.0, std::vector<double>(12, 0.001));
    for (const auto& pk : pkts) p.ingest(pk);
    ASSERT_EQ(p.events().size(), 1u);
    const ThreatEvent& e = p.events()[0];
    EXPECT_EQ(e.threat_class, ThreatClass::MlAnomaly);
    EXPECT_EQ(e.action, EventAction::block);
    EXPECT_EQ(e.detail, "vote 1.00 (12/12)");
    EXPECT_EQ(e.ts, pkts.back().ts);  // emitted when the batch filled
    EXPECT_TRUE(p.device(kCamera)->training.empty());
    EXPECT_EQ(p.ingest(lan(60.0, 1)), Decision::drop);
}

TEST(Pipeline, OneOfTwelveBelowThreshold) {
    const PipelineConfig cfg = small_config();
    Pipeline p(cfg, builtin());
    p.install_model(kCamera, one_second_model(cfg));
    std::vector<double> gaps(12, 1.0);
    gaps[5] = 0.001;
    for (const auto& pk : two_packet_flows(50.0, gaps)) p.ingest(pk);
    EXPECT_TRUE(p.events().empty());
    EXPECT_EQ(p.device(kCamera)->training.size(), 12u);
    EXPECT_EQ(p.device(kCamera)->batches_completed, 1u);
}

TEST(Pipeline, VotesAtThresholdBlock) {
    PipelineConfig cfg = small_config();
    Pipeline p(cfg, builtin());
    p.install_model(kCamera, one_second_model(cfg));
    std::vector<double> gaps(12, 1.0);
    for (int k = 0; k < 6; ++k) gaps[static_cast<std::size_t>(k)] = 0.001;
    for (const auto& pk : two_packet_flows(50.0, gaps)) p.ingest(pk);
    ASSERT_EQ(p.events().size(), 1u);
    EXPECT_EQ(p.events()[0].detail, "vote 0.50 (6/12)");
}

TEST(Pipeline, TrainingWindowEviction) {
    PipelineConfig cfg = small_config();
    cfg.batch_size = 2;
    Pipeline p(cfg, builtin());
    // One two-packet flow per hour for eight days.
    const double hour = 3600.0;
    Timestamp last;
    for (int h = 0; h < 8 * 24; ++h) {
        const double t = h * hour;
        p.ingest(lan(t, static_cast<std::uint16_t>(1000 + h)));
        p.ingest(lan(t + 0.5 + 0.01 * (h % 7), static_cast<std::uint16_t>(1000 + h)));
        last = at_seconds(t + 0.5 + 0.01 * (h % 7));
        for (const auto& e : p.device(kCamera)->training) ASSERT_GT(e.vector.window_ts, last - cfg.training_window);
    }
    const DeviceState* d = p.device(kCamera);
    EXPECT_EQ(d->batches_completed, 192u);
    EXPECT_LT(d->training.size(), 192u);
    EXPECT_LE(d->training.back().vector.window_ts - d->training.front().vector.window_ts, cfg.training_window);

    PipelineConfig trainable = cfg;
    trainable.warmup_min_batches = 1;
    Pipeline q(trainable, builtin());
    DeviceState& dev = q.device_state(kCamera);
    dev.training = d->training;
    dev.training.push_front({FeatureVector{{9.0}, {}, at_seconds(0)}, 999});
    ASSERT_TRUE(q.retrain(dev, last));
    EXPECT_EQ(dev.training.size(), d->training.size());
    EXPECT_GT(dev.training.front().vector.window_ts, last - cfg.training_window);
}

TEST(Pipeline, RetrainSkipsWithTooLittleData) {
    PipelineConfig cfg = small_config();
    cfg.warmup_min_batches = 5;
    Pipeline p(cfg, builtin());
    EXPECT_FALSE(p.retrain(kCamera, at_seconds(1)));
    EXPECT_EQ(p.counters().retrains_skipped, 1u);
}

TEST(Pipeline, RetrainIsDeterministic) {
    PipelineConfig cfg = small_config();
    cfg.warmup_min_batches = 1;
    Pipeline p(cfg, builtin());
    std::mt19937_64 rng(3);
    std::vector<double> gaps;
    for (int i = 0; i < 12; ++i) gaps.push_back(0.5 + static_cast<double>(rng() % 1000) / 1000.0);
    for (int b = 0; b < 10; ++b)
        for (const auto& pk : two_packet_flows(100.0 * b, gaps)) p.ingest(pk);
    ASSERT_TRUE(p.retrain(kCamera, at_seconds(2000)));
    const auto a = p.device(kCamera)->model.load();
    ASSERT_TRUE(p.retrain(kCamera, at_seconds(2000)));
    const auto b = p.device(kCamera)->model.load();
    EXPECT_NE(a, b);
    EXPECT_EQ(a->svm.alphas, b->svm.alphas);
    EXPECT_EQ(a->svm.rho, b->svm.rho);
    EXPECT_EQ(a->scaler, b->scaler);
}

TEST(Pipeline, ThinningIsEvenlySpaced) {
    std::vector<int> v(10);
    for (int i = 0; i < 10; ++i) v[static_cast<std::size_t>(i)] = i;
    EXPECT_EQ(thin_evenly(v, 4), (std::vector<int>{0, 2, 5, 7}));
    EXPECT_EQ(thin_evenly(v, 20), v);
}

TEST(Pipeline, ConservationOnMixedTraffic) {
    ScenarioSpec spec = load_scenario(SUNBLOCK_SOURCE_DIR "/scenarios/default.scn");
    spec.warmup = 600;
    spec.iterations = 1;
    spec.reset_gap = 10;
    for (auto& a : spec.attacks) a.duration = 5;
    const auto built = build_scenario(spec);
    PipelineConfig cfg;
    cfg.warmup_min_batches = 2;
    cfg.retrain_interval = std::chrono::seconds(120);
    Pipeline p(cfg, builtin());
    std::size_t drops = 0;
    for (const auto& pk : built.packets) drops += p.ingest(pk) == Decision::drop;
    p.check_conservation();
    const auto& c = p.counters();
    EXPECT_EQ(c.ingested, built.packets.size());
    EXPECT_EQ(c.dropped_block + c.dropped_rule, drops);
    EXPECT_TRUE(std::is_sorted(p.events().begin(), p.events().end(),
                               [](const ThreatEvent& a, const ThreatEvent& b) { return a.ts < b.ts; }));
    EXPECT_GT(c.retrains, 0u);
}

TEST(Pipeline, SelfConsistentBenignWeek) {
    const ScenarioSpec spec = load_scenario(SUNBLOCK_SOURCE_DIR "/scenarios/default.scn");
    PipelineConfig cfg;
    cfg.warmup_min_batches = 1;
    cfg.retrain_interval = std::chrono::hours(1000);
    const Timestamp end = at_seconds(7 * 86400);
    for (const DeviceProfile& d : spec.devices) {
        const auto week = gen_benign(d, kEpoch, end, spec.seed);
        Pipeline learn(cfg, builtin());
        for (const auto& pk : week) learn.ingest(pk);
        ASSERT_TRUE(learn.retrain(d.ip, end)) << d.name;
        Pipeline replay(cfg, builtin());
        replay.install_model(d.ip, *learn.device(d.ip)->model.load());
        for (const auto& pk : week)
            if (pk.ts >= end - std::chrono::hours(24)) replay.ingest(pk);
        EXPECT_GT(replay.device(d.ip)->batches_completed, 0u) << d.name;
        std::size_t anomalies = 0;
        for (const auto& e : replay.events()) anomalies += e.threat_class == ThreatClass::MlAnomaly;
        EXPECT_EQ(anomalies, 0u) << d.name;
    }
}

TEST(PreventionLatency, Subtraction) {
    std::vector<ThreatEvent> ev = {
        {at_seconds(50), ThreatClass::SynFlood, kAttacker, "", EventAction::block},
        {at_seconds(101), ThreatClass::PlainHttp, kCamera, "", EventAction::alert},
        {at_seconds(103.2), ThreatClass::SynFlood, kAttacker, "", EventAction::block},
    };
    const auto l = prevention_latency(ev, at_seconds(100), ThreatClass::SynFlood);
    ASSERT_TRUE(l);
    EXPECT_NEAR(*l, 3.2, 1e-9);
    EXPECT_FALSE(prevention_latency(ev, at_seconds(100), ThreatClass::UdpFlood));
    EXPECT_FALSE(prevention_latency(ev, at_seconds(100), ThreatClass::PlainHttp));
    EXPECT_FALSE(prevention_latency(ev, at_seconds(200), ThreatClass::SynFlood));
}

TEST(PipelineConfig, Validation) {
    PipelineConfig cfg;
    cfg.batch_size = 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.vote_threshold = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.vote_threshold = 1.0;
    EXPECT_NO_THROW(cfg.validate());
}
