// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protopart/rule.hpp"

namespace protopart {

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class PortDirection { input, output };

/// Node template: declared ports plus a rule over local port atoms.
struct PrimitiveSpec {
    std::string kind;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    RuleExpr rule_template;

    [[nodiscard]] std::optional<PortDirection> direction_of(const std::string& port) const;
};

/// Uniquely named instantiation of a primitive. Ports keep their local names;
/// the global atom for port p of instance n is (n, p).
struct Instance {
    std::string name;
    std::string kind;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    RuleExpr bound_rule;
    std::map<std::string, std::string> config;

    [[nodiscard]] std::optional<PortDirection> direction_of(const std::string& port) const;
    [[nodiscard]] bool has_input(const std::string& port) const;
    [[nodiscard]] bool has_output(const std::string& port) const;
    /// Conf and intg atoms of every port, inputs first, in declaration order.
    [[nodiscard]] std::vector<GuaranteeAtom> atoms() const;
};

struct Channel {
    std::string src;
    std::string out_port;
    std::string dst;
    std::string in_port;

    auto operator<=>(const Channel&) const = default;
    bool operator==(const Channel&) const = default;
};

/// "<src>.<out> -> <dst>.<in>"
std::string to_string(const Channel& ch);

/// Protection domain.
struct Domain {
    std::string id;
    std::vector<std::string> members;  // sorted

    bool operator==(const Domain&) const = default;
};

/// Domains in creation order. Ids are stable across moves.
using DomainSet = std::vector<Domain>;

struct Guarantee {
    bool conf = false;
    bool intg = false;

    bool operator==(const Guarantee&) const = default;
    /// Pointwise >=.
    [[nodiscard]] bool dominates(const Guarantee& other) const {
        return (conf || !other.conf) && (intg || !other.intg);
    }
    Guarantee& operator|=(const Guarantee& other) {
        conf = conf || other.conf;
        intg = intg || other.intg;
        return *this;
    }
};

/// Instances, channels and (optionally) protection domains. Immutable once
/// built; lookups are indexed on construction.
class Network {
  public:
    Network() = default;
    Network(std::string name, std::vector<Instance> instances, std::vector<Channel> channels,
            DomainSet domains = {});

    [[nodiscard]] const std::string& name() const { return name_; }
    /// Sorted by name.
    [[nodiscard]] const std::vector<Instance>& instances() const { return instances_; }
    /// Sorted.
    [[nodiscard]] const std::vector<Channel>& channels() const { return channels_; }
    [[nodiscard]] const DomainSet& domains() const { return domains_; }

    [[nodiscard]] const Instance* find(const std::string& name) const;
    /// Throws ModelError for unknown names.
    [[nodiscard]] const Instance& at(const std::string& name) const;

    [[nodiscard]] const Channel* channel_into(const std::string& inst, const std::string& in_port) const;
    [[nodiscard]] const Channel* channel_from(const std::string& inst, const std::string& out_port) const;

    /// Every atom of every instance, sorted.
    [[nodiscard]] std::vector<GuaranteeAtom> atoms() const;

  private:
    std::string name_;
    std::vector<Instance> instances_;
    std::vector<Channel> channels_;
    DomainSet domains_;
    std::map<std::string, std::size_t> by_name_;
    std::map<std::pair<std::string, std::string>, std::size_t> into_;
    std::map<std::pair<std::string, std::string>, std::size_t> from_;
};

/// Binds the rule template to `instance_name`. Throws ModelError for invalid
/// names or templates that reference undeclared ports.
Instance bind_instance(const PrimitiveSpec& spec, const std::string& instance_name);

/// Same as bind_instance, rejecting names already present in `net`.
Instance bind_instance(const Network& net, const PrimitiveSpec& spec, const std::string& instance_name);

std::optional<std::string> predecessor(const Network& net, const std::string& inst, const std::string& in_port);
std::optional<std::string> successor(const Network& net, const std::string& inst, const std::string& out_port);

/// Disjunction over all port atoms of the instance, per kind.
Guarantee instance_guarantee(const Instance& inst, const Assignment& asg);

const Domain* domain_of(const DomainSet& domains, const std::string& inst);
DomainSet move_instance(const DomainSet& domains, const std::string& inst, const std::string& target_id);
Guarantee domain_guarantee(const Domain& d, const Network& net, const Assignment& asg);

struct StructuralIssue {
    std::string instance;
    std::string message;
    bool warning = false;

    auto operator<=>(const StructuralIssue&) const = default;
};

/// Errors and warnings, sorted by instance name then message.
std::vector<StructuralIssue> validate_network(const Network& net);

}  // namespace protopart
