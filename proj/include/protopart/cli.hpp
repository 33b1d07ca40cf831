// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace protopart::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;  // UNSAT, assertion failure, runtime mismatch
inline constexpr int exit_input = 2;    // unreadable or malformed input
inline constexpr int exit_usage = 3;

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

struct AnalyzeOptions {
    std::string dump_path;  // assignment dump; stdout when empty
    std::string out_path;   // annotated model
};

struct PartitionOptions {
    std::string strategy = "branch";
    std::string weights_path;
    std::string out_path;  // partitioned model; stdout when empty
    std::optional<long> merge_max_weight;
};

struct RunCliOptions {
    std::uint64_t seed = 0;
    std::size_t max_steps = 100000;
    std::string trace_path;
};

struct RenderCliOptions {
    bool solved = false;
    bool partitions = false;
    std::string strategy = "basic";
    std::string out_path;  // stdout when empty
};

struct MetricsOptions {
    std::string strategy = "branch";
    std::string weights_path;
};

int cmd_analyze(const std::string& model_path, const AnalyzeOptions& options, Streams io);
int cmd_partition(const std::string& model_path, const PartitionOptions& options, Streams io);
int cmd_check(const std::string& model_path, Streams io);
int cmd_run(const std::string& model_path, const RunCliOptions& options, Streams io);
int cmd_render(const std::string& model_path, const RenderCliOptions& options, Streams io);
int cmd_metrics(const std::string& model_path, const MetricsOptions& options, Streams io);

}  // namespace protopart::cli
