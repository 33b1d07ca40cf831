// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "protopart/model.hpp"
#include "protopart/model_io.hpp"

namespace protopart {

enum class Strategy { none, basic, merge_const, branch };

std::optional<Strategy> parse_strategy(std::string_view name);
std::string_view to_string(Strategy s);

/// One singleton domain per instance, K1..Kn in name order.
DomainSet merge_none(const Network& net, const Assignment& asg);

/// Connected instances with identical guarantees share a domain. Seeds are
/// taken in name order; each seed grows breadth-first over predecessors and
/// successors (ports in declaration order).
DomainSet merge_basic(const Network& net, const Assignment& asg);

/// Moves each const instance into the domain of its successor when that
/// domain's guarantees dominate the const's own.
DomainSet merge_const(const Network& net, const Assignment& asg, const DomainSet& domains);

struct BranchOptions {
    /// When set, the instance fed by a const may also be any single-input,
    /// non-env instance whose weight is at most this value.
    std::optional<long> max_weight;
    const WeightTable* weights = nullptr;
};

/// Domain id shared by the successors of every output of `inst`, if all
/// outputs are connected and land in one domain.
std::optional<std::string> samepart(const Network& net, const DomainSet& domains, const std::string& inst);

/// Moves const -> single-input transform pairs into the domain all of the
/// transform's outputs feed, when that domain dominates both instances.
DomainSet merge_branch(const Network& net, const Assignment& asg, const DomainSet& domains,
                       const BranchOptions& options = {});

/// Runs the strategy chain: const implies basic, branch implies const.
DomainSet partition(const Network& net, const Assignment& asg, Strategy strategy, const BranchOptions& options = {});

struct PolicyEntry {
    Channel channel;
    std::string src_domain;
    std::string dst_domain;
    Guarantee required;
};

/// One entry per channel crossing domains, sorted by channel.
std::vector<PolicyEntry> communication_policy(const Network& net, const DomainSet& domains, const Assignment& asg);

std::string format_policy_entry(const PolicyEntry& e);

/// TCB classes. A domain needing confidentiality counts as
/// confidentiality + integrity.
enum class GuaranteeClass { none, integrity, conf_intg };

GuaranteeClass classify(const Guarantee& g);

struct Metrics {
    std::size_t process_count = 0;
    std::size_t ipc_channel_count = 0;
    long tcb_none = 0;
    long tcb_intg = 0;
    long tcb_conf_intg = 0;

    /// Code that must be trusted for some guarantee.
    [[nodiscard]] long tcb() const { return tcb_intg + tcb_conf_intg; }
    [[nodiscard]] long total() const { return tcb_none + tcb_intg + tcb_conf_intg; }
};

Metrics metrics(const Network& net, const DomainSet& domains, const Assignment& asg, const WeightTable& weights);

/// Every instance in one domain.
DomainSet monolithic(const Network& net);

}  // namespace protopart
