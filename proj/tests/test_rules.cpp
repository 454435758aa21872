#include <sunblock/rules.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace sunblock;

TEST(ParseRule, PlainHttpDrop) {
    const Rule r = parse_rule(R"(drop tcp any any -> any 80 (msg:"plain HTTP"; sid:1000001;))");
    EXPECT_EQ(r.action, RuleAction::drop);
    EXPECT_EQ(r.protocol, RuleProtocol::tcp);
    EXPECT_FALSE(r.dst_port.any);
    EXPECT_EQ(r.dst_port.lo, 80);
    EXPECT_EQ(r.dst_port.hi, 80);
    EXPECT_TRUE(r.src_port.any);
    EXPECT_EQ(r.sid, 1000001u);
    EXPECT_EQ(r.msg, "plain HTTP");
    EXPECT_FALSE(r.detection);
}

TEST(ParseRule, SynFlood) {
    const Rule r = parse_rule(
        R"(drop tcp any any -> $HOME_NET any (msg:"SYN flood"; flags:S; detection_filter: track by_dst, count 100, seconds 1; sid:1000002;))");
    ASSERT_TRUE(r.flags);
    EXPECT_EQ(r.flags->mask, TcpFlags::SYN);
    EXPECT_EQ(r.flags->mode, FlagMatch::Mode::exact);
    ASSERT_TRUE(r.detection);
    EXPECT_EQ(r.detection->track, Track::by_dst);
    EXPECT_EQ(r.detection->count, 100u);
    EXPECT_EQ(r.detection->seconds, std::chrono::seconds(1));
    EXPECT_EQ(r.dst_addr.kind, AddrSpec::Kind::variable);
    EXPECT_TRUE(r.dst_addr.matches(Ipv4Addr::parse("192.168.1.20")));
    EXPECT_FALSE(r.dst_addr.matches(Ipv4Addr::parse("8.8.8.8")));
}

TEST(ParseRule, BadDirectionReportsToken) {
    try {
        parse_rule(R"(drop tcp any any > any 80 (msg:"x"; sid:1;))");
        FAIL() << "expected a syntax error";
    } catch (const RuleSyntaxError& e) {
        EXPECT_EQ(e.token(), ">");
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 18u);
    }
}

TEST(ParseRule, StrictErrors) {
    const char* bad[] = {
        R"(drop tcp any any -> any 80 (msg:"x"; sid:1; bogus:1;))",          // unknown keyword
        R"(drop tcp any any -> any 80 (msg:"x"; msg:"y"; sid:1;))",          // duplicate option
        R"(drop tcp any any -> any 80 (sid:1;))",                            // no msg
        R"(drop tcp any any -> any 80 (msg:"x";))",                          // no sid
        R"(drop tcp any any -> any 90:80 (msg:"x"; sid:1;))",                // reversed range
        R"(drop tcp 10.0.0.1/33 any -> any 80 (msg:"x"; sid:1;))",           // bad CIDR
        R"(drop tcp any any -> any 70000 (msg:"x"; sid:1;))",                // bad port
        R"(block tcp any any -> any 80 (msg:"x"; sid:1;))",                  // bad action
        R"(drop sctp any any -> any 80 (msg:"x"; sid:1;))",                  // bad protocol
        R"(drop tcp any any -> any 80 (msg:"x"; sid:0;))",                   // sid must be positive
        R"(drop icmp any any -> any 80 (msg:"x"; sid:1;))",                  // port on icmp
        R"(drop udp any any -> any any (msg:"x"; flags:S; sid:1;))",         // flags on udp
        R"(drop tcp any any -> any any (msg:"x"; flags:Q; sid:1;))",         // flag letter
        R"(drop tcp any any -> $NOPE any (msg:"x"; sid:1;))",                // unknown variable
        R"(drop tcp any any -> any any (msg:"x"; sid:1;)) trailing)",        // trailing text
        R"(drop tcp any any -> any any (msg:"x"; detection_filter: track by_dst, count 1, seconds 1; detection_filter: track by_src, count 2, seconds 1; sid:1;))",
        R"(drop tcp any any -> any any (msg:"x"; detection_filter: track by_dst, count 0, seconds 1; sid:1;))",
        R"(drop tcp any any -> any any (msg:"x"; detection_filter: track sideways, count 1, seconds 1; sid:1;))",
        R"(drop tcp any any -> any any (msg:"x"; scan_filter: track by_src, distinct hosts, count 1, seconds 1; sid:1;))",
        R"(drop tcp any any -> any any (msg:"x"; detection_filter: track by_src, count 3; sid:1;))",
        R"(drop tcp any any -> any any (msg:"x"; nocase; sid:1;))",  // nocase without content
    };
    for (const char* line : bad) EXPECT_THROW(parse_rule(line), RuleSyntaxError) << line;
}

TEST(ParseRule, ContentEscapesAndModifiers) {
    const Rule r = parse_rule(
        R"(alert tcp any any <> any 80 (msg:"semi\;colon"; content:"pass|3D|word"; nocase; content:"x"; flags:+PA; sid:5; rev:2;))");
    ASSERT_EQ(r.contents.size(), 2u);
    EXPECT_EQ(r.contents[0].bytes, "pass=word");
    EXPECT_TRUE(r.contents[0].nocase);
    EXPECT_FALSE(r.contents[1].nocase);
    EXPECT_EQ(r.msg, "semi;colon");
    EXPECT_EQ(r.direction, Direction::both);
    EXPECT_EQ(r.flags->mode, FlagMatch::Mode::all_plus_any);
    EXPECT_EQ(r.rev, 2u);
}

TEST(ParseRuleset, PreservesOrder) {
    const auto set = parse_ruleset(
        "# header\n\n"
        "alert udp any any -> any 53 (msg:\"first\"; sid:2;)\n"
        "   # indented comment\n"
        "drop tcp any any -> any 80 (msg:\"second\"; sid:1;)\n");
    ASSERT_EQ(set.rules.size(), 2u);
    EXPECT_EQ(set.rules[0].msg, "first");
    EXPECT_EQ(set.rules[1].msg, "second");
}

TEST(ParseRuleset, DuplicateSidNamesBothLines) {
    try {
        parse_ruleset(
            "alert udp any any -> any 53 (msg:\"a\"; sid:7;)\n"
            "# gap\n"
            "alert udp any any -> any 54 (msg:\"b\"; sid:7;)\n");
        FAIL() << "expected duplicate sid";
    } catch (const RuleSetError& e) {
        ASSERT_EQ(e.diagnostics().size(), 1u);
        const std::string& d = e.diagnostics()[0];
        EXPECT_NE(d.find("sid 7"), std::string::npos) << d;
        EXPECT_NE(d.find("lines 1 and 3"), std::string::npos) << d;
    }
}

TEST(ParseRuleset, AggregatesDiagnostics) {
    try {
        parse_ruleset("bad line one\nalert udp any any -> any 53 (msg:\"ok\"; sid:1;)\nbad line three\n");
        FAIL();
    } catch (const RuleSetError& e) {
        ASSERT_EQ(e.diagnostics().size(), 2u);
        EXPECT_EQ(e.diagnostics()[0].rfind("line 1,", 0), 0u);
        EXPECT_EQ(e.diagnostics()[1].rfind("line 3,", 0), 0u);
    }
}

TEST(ParseRuleset, VariablesResolveFromBindings) {
    const auto vars = VarBindings::for_home_net({Cidr::parse("10.1.0.0/16")});
    const auto set = parse_ruleset("alert tcp $HOME_NET any -> $EXTERNAL_NET 80 (msg:\"x\"; sid:1;)", vars);
    const Rule& r = set.rules[0];
    EXPECT_TRUE(r.src_addr.matches(Ipv4Addr::parse("10.1.2.3")));
    EXPECT_FALSE(r.src_addr.matches(Ipv4Addr::parse("10.2.0.1")));
    EXPECT_TRUE(r.dst_addr.matches(Ipv4Addr::parse("10.2.0.1")));
    EXPECT_FALSE(r.dst_addr.matches(Ipv4Addr::parse("10.1.0.1")));
}

TEST(BuiltinRules, ParseCleanAndRoundTrip) {
    const auto set = parse_ruleset(builtin_rules_text());
    EXPECT_EQ(set.rules.size(), 11u);
    for (const Rule& r : set.rules) {
        const std::string text = to_string(r);
        EXPECT_EQ(parse_rule(text), r) << text;
        EXPECT_EQ(to_string(parse_rule(text)), text);
    }
}

TEST(BuiltinRules, ThresholdsSubstituted) {
    RuleThresholds t;
    t.syn_flood = {250, 0.5};
    const auto set = parse_ruleset(builtin_rules_text(t));
    const Rule& syn = set.rules.front();
    EXPECT_EQ(syn.detection->count, 250u);
    EXPECT_EQ(syn.detection->seconds, std::chrono::milliseconds(500));
}

namespace {

std::string random_addr(std::mt19937_64& rng) {
    switch (rng() % 5) {
        case 0: return "any";
        case 1: return Ipv4Addr(static_cast<std::uint32_t>(rng())).to_string();
        case 2: return "$HOME_NET";
        case 3: return "!$EXTERNAL_NET";
        default: {
            const int prefix = static_cast<int>(rng() % 33);
            const Cidr c{Ipv4Addr(static_cast<std::uint32_t>(rng()) & Cidr{{}, prefix}.mask()), prefix};
            return rng() % 2 ? "[" + c.to_string() + ",1.2.3.4]" : c.to_string();
        }
    }
}

std::string random_port(std::mt19937_64& rng) {
    switch (rng() % 3) {
        case 0: return "any";
        case 1: return std::to_string(rng() % 65536);
        default: {
            const auto a = rng() % 65536, b = rng() % 65536;
            return std::to_string(std::min(a, b)) + ":" + std::to_string(std::max(a, b));
        }
    }
}

std::string random_rule(std::mt19937_64& rng, std::uint32_t sid) {
    const bool tcp = rng() % 2;
    std::string s = std::string(rng() % 2 ? "drop " : "alert ") + (tcp ? "tcp " : "udp ");
    s += random_addr(rng) + " " + random_port(rng) + (rng() % 2 ? " -> " : " <> ") + random_addr(rng) + " " +
         random_port(rng) + " (msg:\"rule " + std::to_string(sid) + "\";";
    if (tcp && rng() % 2) s += " flags:" + std::string(rng() % 2 ? "*" : "") + "SA;";
    for (int i = static_cast<int>(rng() % 3); i > 0; --i) {
        std::string bytes;
        for (int j = 1 + static_cast<int>(rng() % 6); j > 0; --j) bytes += "abc=|;\"\x01"[rng() % 8];
        s += " content:\"";
        for (char c : bytes) {
            if (c == '|' || c == '\x01') {
                char hex[8];
                std::snprintf(hex, sizeof hex, "|%02X|", static_cast<unsigned char>(c));
                s += hex;
            } else if (c == ';' || c == '"') {
                s += '\\';
                s += c;
            } else {
                s += c;
            }
        }
        s += "\";";
        if (rng() % 2) s += " nocase;";
    }
    if (rng() % 2)
        s += " detection_filter: track by_src, count " + std::to_string(1 + rng() % 500) + ", seconds " +
             std::to_string(1 + rng() % 10) + "." + std::to_string(rng() % 1000) + ";";
    if (rng() % 2) s += " scan_filter: track by_dst, distinct dst_ports, count " + std::to_string(1 + rng() % 50) + ", seconds 5;";
    s += " sid:" + std::to_string(sid) + ";)";
    return s;
}

}  // namespace

TEST(RuleRoundTrip, RandomRules) {
    std::mt19937_64 rng(2024);
    for (std::uint32_t sid = 1; sid <= 2000; ++sid) {
        const std::string line = random_rule(rng, sid);
        Rule r;
        ASSERT_NO_THROW(r = parse_rule(line)) << line;
        const std::string printed = to_string(r);
        Rule again;
        ASSERT_NO_THROW(again = parse_rule(printed)) << printed;
        EXPECT_EQ(again, r) << line << "\n" << printed;
    }
}
