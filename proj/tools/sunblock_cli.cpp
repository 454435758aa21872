#include <sunblock/harness.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"sunblock: inline IoT protection engine and evaluation harness"};
    app.require_subcommand(1);

    std::string scenario, config, out, pcap, model_out, labels;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "simulate a scenario end to end and write reports");
    run->add_option("--scenario", scenario, "scenario file")->required();
    run->add_option("--config", config, "config file")->required();
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--seed", seed, "override the scenario seed");

    auto* rep = app.add_subcommand("replay", "run a pcap capture through the engine");
    rep->add_option("--pcap", pcap, "capture file")->required();
    rep->add_option("--config", config, "config file")->required();
    rep->add_option("--out", out, "output directory")->required();

    auto* train = app.add_subcommand("train", "train per-device models offline from a capture");
    train->add_option("--pcap", pcap, "capture file")->required();
    train->add_option("--config", config, "config file")->required();
    train->add_option("--model-out", model_out, "model output directory")->required();

    auto* gen = app.add_subcommand("generate", "write a scenario's packet timeline as pcap");
    gen->add_option("--scenario", scenario, "scenario file")->required();
    gen->add_option("--config", config, "config file")->required();
    gen->add_option("--pcap", pcap, "output capture")->required();
    gen->add_option("--labels", labels, "optional ground-truth label file");
    gen->add_option("--seed", seed, "override the scenario seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? sunblock::kExitOk : sunblock::kExitInputError;
    }

    if (*run) return sunblock::cmd_run(scenario, config, out, seed, std::cerr);
    if (*rep) return sunblock::cmd_replay(pcap, config, out, std::cerr);
    if (*train) return sunblock::cmd_train(pcap, config, model_out, std::cerr);
    return sunblock::cmd_generate(scenario, config, pcap, seed, labels, std::cerr);
}
