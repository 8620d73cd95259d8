// Command-line front end: ingest, synth, train, baseline, ablate, report.
#include <CLI11.hpp>
#include <iostream>

#include "burstcast/cli/commands.hpp"

using namespace burstcast::cli;

namespace {

void add_run_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--config", opt.config, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", opt.seed, "Override the run seed (beats BURSTCAST_SEED and the config)");
    cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
    cmd->add_flag("-v,--verbose", opt.verbose, "Log every training epoch");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"burstcast: weekly conflict-incident forecasting"};
    app.set_version_flag("--version", BURSTCAST_VERSION);
    app.require_subcommand(1);

    std::string input, grain = "region";
    std::filesystem::path ingest_out = "out";
    auto* ingest = app.add_subcommand("ingest", "Validate raw incident CSV and build the weekly panel");
    ingest->add_option("--input", input, "Raw incident CSV")->required();
    ingest->add_option("--grain", grain, "region or country")->capture_default_str();
    ingest->add_option("--out", ingest_out, "Output directory")->capture_default_str();

    RunOptions train_opt, base_opt, ablate_opt, synth_opt, report_opt;
    add_run_options(app.add_subcommand("train", "Train the deep models listed in the config"), train_opt);
    add_run_options(app.add_subcommand("baseline", "Fit and evaluate the baseline models"), base_opt);
    add_run_options(app.add_subcommand("ablate", "Run the configured experiment families"), ablate_opt);
    add_run_options(app.add_subcommand("synth", "Generate a synthetic panel"), synth_opt);

    std::vector<std::filesystem::path> extra;
    auto* report = app.add_subcommand("report", "Merge result tables into report.md and report.csv");
    report->add_option("--config", report_opt.config, "Config used for the runs (recorded in the manifest)");
    report->add_option("--out", report_opt.out, "Directory holding *_results.json; receives the report")
        ->capture_default_str();
    report->add_option("--include", extra, "Additional result directories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kBadConfig;
    }

    auto& log = std::cerr;
    if (app.got_subcommand("ingest")) return cmd_ingest(input, grain, ingest_out, log);
    if (app.got_subcommand("train")) return cmd_train(train_opt, log);
    if (app.got_subcommand("baseline")) return cmd_baseline(base_opt, log);
    if (app.got_subcommand("ablate")) return cmd_ablate(ablate_opt, log);
    if (app.got_subcommand("synth")) return cmd_synth(synth_opt, log);
    return cmd_report(report_opt, extra, log);
}
