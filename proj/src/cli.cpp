// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/cli.hpp"

#include <fstream>
#include <ostream>

#include "protopart/analysis.hpp"
#include "protopart/assertions.hpp"
#include "protopart/executor.hpp"
#include "protopart/partition.hpp"
#include "protopart/report.hpp"
#include "protopart/tcp.hpp"

namespace protopart::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
        throw ParseError("cannot write '" + path + "'");
    }
}

void emit(const std::string& path, const std::string& text, Streams io) {
    if (path.empty()) {
        io.out << text;
    } else {
        write_file(path, text);
    }
}

Strategy strategy_or_throw(const std::string& name) {
    auto s = parse_strategy(name);
    if (!s) {
        throw UsageError("unknown strategy '" + name + "' (expected none, basic, const or branch)");
    }
    return *s;
}

WeightTable load_weights(const std::string& path, Streams io) {
    if (path.empty()) {
        return default_weights();
    }
    auto table = parse_weights(read_file(path));
    for (const auto& w : table.warnings) {
        io.err << "warning: " << w << "\n";
    }
    return table;
}

/// Solved assignment, or nullopt after reporting the conflict.
std::optional<Assignment> solve_or_report(const ModelDocument& doc, Streams io) {
    auto cs = collect_constraints(doc);
    auto result = solve_lexmin(cs);
    if (auto* asg = std::get_if<Assignment>(&result)) {
        return *asg;
    }
    io.out << core_listing(cs, std::get<Conflict>(result));
    return std::nullopt;
}

/// Maps exceptions onto the exit-code contract.
template <typename F>
int guarded(Streams io, F&& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        io.err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ExecutionError& e) {
        io.err << "execution failed: " << e.what() << "\n";
        return exit_failure;
    } catch (const TransportError& e) {
        io.err << "execution failed: " << e.what() << "\n";
        return exit_failure;
    } catch (const ParseError& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const ModelError& e) {
        io.err << "invalid model: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return exit_input;
    }
}

}  // namespace

int cmd_analyze(const std::string& model_path, const AnalyzeOptions& options, Streams io) {
    return guarded(io, [&] {
        auto doc = load_model(model_path);
        auto cs = collect_constraints(doc);
        auto result = solve_lexmin(cs);
        if (auto* conflict = std::get_if<Conflict>(&result)) {
            io.out << core_listing(cs, *conflict);
            auto annotated = annotate_conflict(doc, *conflict);
            if (options.out_path.empty()) {
                io.out << annotated;
            } else {
                write_file(options.out_path, annotated);
            }
            return exit_failure;
        }
        const auto& asg = std::get<Assignment>(result);
        emit(options.dump_path, dump_assignment(asg), io);
        if (!options.out_path.empty()) {
            Annotations notes;
            notes.assignment = &asg;
            write_file(options.out_path, serialize_annotated(doc, notes));
        }
        return exit_ok;
    });
}

int cmd_partition(const std::string& model_path, const PartitionOptions& options, Streams io) {
    return guarded(io, [&] {
        auto strategy = strategy_or_throw(options.strategy);
        if (options.merge_max_weight && *options.merge_max_weight < 0) {
            throw UsageError("--merge-max-weight must be non-negative");
        }
        auto doc = load_model(model_path);
        auto weights = load_weights(options.weights_path, io);
        auto asg = solve_or_report(doc, io);
        if (!asg) {
            return exit_failure;
        }
        BranchOptions branch;
        branch.max_weight = options.merge_max_weight;
        branch.weights = &weights;
        auto domains = partition(doc.network, *asg, strategy, branch);
        emit(options.out_path, serialize_annotated(doc, *asg, domains), io);
        for (const auto& entry : communication_policy(doc.network, domains, *asg)) {
            io.out << format_policy_entry(entry) << "\n";
        }
        io.out << metrics_table(metrics(doc.network, monolithic(doc.network), *asg, weights),
                                metrics(doc.network, merge_none(doc.network, *asg), *asg, weights),
                                metrics(doc.network, domains, *asg, weights), to_string(strategy));
        return exit_ok;
    });
}

int cmd_check(const std::string& model_path, Streams io) {
    return guarded(io, [&] {
        auto doc = load_model(model_path);
        auto asg = solve_or_report(doc, io);
        if (!asg) {
            return exit_failure;
        }
        auto violations = check_assertions(doc, *asg);
        for (const auto& v : violations) {
            io.out << format_violation(v) << "\n";
        }
        if (!violations.empty()) {
            return exit_failure;
        }
        io.out << "OK: " << doc.assertions.size() << " assertion(s) hold\n";
        return exit_ok;
    });
}

int cmd_run(const std::string& model_path, const RunCliOptions& options, Streams io) {
    return guarded(io, [&] {
        if (options.max_steps == 0) {
            throw UsageError("--max-steps must be positive");
        }
        auto doc = load_model(model_path);
        RunOptions run;
        run.seed = options.seed;
        run.max_steps = options.max_steps;
        run.console_out = &io.out;
        auto result = run_network(doc, run);
        if (!options.trace_path.empty()) {
            write_file(options.trace_path, format_trace(result.trace));
        }
        for (const auto& m : result.mismatches) {
            io.out << "MISMATCH " << m << "\n";
        }
        io.out << "steps=" << result.steps << (result.ok() ? " ok" : " failed") << "\n";
        return result.ok() ? exit_ok : exit_failure;
    });
}

int cmd_render(const std::string& model_path, const RenderCliOptions& options, Streams io) {
    return guarded(io, [&] {
        auto strategy = strategy_or_throw(options.strategy);
        auto doc = load_model(model_path);
        RenderOptions render;
        std::optional<Assignment> asg;
        DomainSet domains;
        if (options.solved || options.partitions) {
            asg = solve_or_report(doc, io);
            if (!asg) {
                return exit_failure;
            }
            if (options.solved) {
                render.assignment = &*asg;
            }
            if (options.partitions) {
                domains = partition(doc.network, *asg, strategy);
                render.domains = &domains;
            }
        }
        emit(options.out_path, render_dot(doc.network, render), io);
        return exit_ok;
    });
}

int cmd_metrics(const std::string& model_path, const MetricsOptions& options, Streams io) {
    return guarded(io, [&] {
        auto strategy = strategy_or_throw(options.strategy);
        auto doc = load_model(model_path);
        auto weights = load_weights(options.weights_path, io);
        auto asg = solve_or_report(doc, io);
        if (!asg) {
            return exit_failure;
        }
        const auto& net = doc.network;
        auto part = metrics(net, partition(net, *asg, strategy), *asg, weights);
        io.out << metrics_table(metrics(net, monolithic(net), *asg, weights), metrics(net, merge_none(net, *asg), *asg, weights),
                                part, to_string(strategy));
        io.out << metrics_key_values(part);
        return exit_ok;
    });
}

}  // namespace protopart::cli
