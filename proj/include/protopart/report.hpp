// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <string>

#include "protopart/model.hpp"
#include "protopart/partition.hpp"

namespace protopart {

struct RenderOptions {
    /// Solved guarantees; nodes are drawn as unknown (white) without one.
    const Assignment* assignment = nullptr;
    /// One cluster per domain when set.
    const DomainSet* domains = nullptr;
};

/// Graphviz digraph with one node per instance and one edge per channel.
/// Node and edge styles follow the guarantee class:
///   unknown white, none gray/solid, conf red/dashed, intg blue/dotted,
///   both purple/dashed,bold.
std::string render_dot(const Network& net, const RenderOptions& options = {});

/// Percentage 100 * (1 - part / whole) with one decimal, rounded half up.
/// "-" when `whole` is zero.
std::string reduction_percent(long part, long whole);

/// Aligned text table comparing the monolithic build, one process per
/// instance, and the chosen strategy. TCB reductions are relative to the
/// monolithic build; process and IPC reductions to one process per instance.
std::string metrics_table(const Metrics& monolithic, const Metrics& per_instance, const Metrics& partitioned,
                          std::string_view strategy_name);

/// process_count=, ipc_channels=, tcb_none=, tcb_intg=, tcb_conf_intg= lines.
std::string metrics_key_values(const Metrics& m);

}  // namespace protopart
