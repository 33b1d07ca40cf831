// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include <iostream>

#include <CLI11.hpp>

#include "protopart/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = protopart::cli;
    CLI::App app{"Guarantee analysis, partitioning and execution of protocol models"};
    app.require_subcommand(1);
    cli::Streams io{std::cout, std::cerr};
    std::string model;
    int code = cli::exit_ok;

    auto* analyze = app.add_subcommand("analyze", "Solve the minimal guarantee assignment");
    cli::AnalyzeOptions analyze_opts;
    analyze->add_option("model", model, "Model file")->required();
    analyze->add_option("--dump", analyze_opts.dump_path, "Write the assignment dump here");
    analyze->add_option("--out", analyze_opts.out_path, "Write the annotated model here");
    analyze->callback([&] { code = cli::cmd_analyze(model, analyze_opts, io); });

    auto* part = app.add_subcommand("partition", "Group instances into protection domains");
    cli::PartitionOptions part_opts;
    long max_weight = -1;
    part->add_option("model", model, "Model file")->required();
    part->add_option("--strategy", part_opts.strategy, "none, basic, const or branch")->capture_default_str();
    part->add_option("--weights", part_opts.weights_path, "SLOC weight table");
    part->add_option("--out", part_opts.out_path, "Write the partitioned model here");
    auto* mw = part->add_option("--merge-max-weight", max_weight, "Merge any single-input instance up to this weight");
    part->callback([&] {
        if (mw->count() > 0) {
            part_opts.merge_max_weight = max_weight;
        }
        code = cli::cmd_partition(model, part_opts, io);
    });

    auto* check = app.add_subcommand("check", "Check model assertions against the solved guarantees");
    check->add_option("model", model, "Model file")->required();
    check->callback([&] { code = cli::cmd_check(model, io); });

    auto* run = app.add_subcommand("run", "Execute the model");
    cli::RunCliOptions run_opts;
    run->add_option("model", model, "Model file")->required();
    run->add_option("--seed", run_opts.seed, "Random seed")->capture_default_str();
    run->add_option("--max-steps", run_opts.max_steps, "Firing budget")->capture_default_str();
    run->add_option("--trace", run_opts.trace_path, "Write the execution trace here");
    run->callback([&] { code = cli::cmd_run(model, run_opts, io); });

    auto* render = app.add_subcommand("render", "Emit a Graphviz DOT view");
    cli::RenderCliOptions render_opts;
    render->add_option("model", model, "Model file")->required();
    render->add_flag("--solved", render_opts.solved, "Color nodes by solved guarantees");
    render->add_flag("--partitions", render_opts.partitions, "Draw protection domains as clusters");
    render->add_option("--strategy", render_opts.strategy, "Strategy used with --partitions")->capture_default_str();
    render->add_option("-o,--out", render_opts.out_path, "Output file");
    render->callback([&] { code = cli::cmd_render(model, render_opts, io); });

    auto* met = app.add_subcommand("metrics", "Report process, IPC and TCB figures");
    cli::MetricsOptions met_opts;
    met->add_option("model", model, "Model file")->required();
    met->add_option("--strategy", met_opts.strategy, "none, basic, const or branch")->capture_default_str();
    met->add_option("--weights", met_opts.weights_path, "SLOC weight table");
    met->callback([&] { code = cli::cmd_metrics(model, met_opts, io); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? cli::exit_ok : cli::exit_usage;
    }
    return code;
}
