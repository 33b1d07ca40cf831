// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/model.hpp"

#include <algorithm>
#include <set>

namespace protopart {

namespace {

std::optional<PortDirection> find_direction(const std::vector<std::string>& inputs,
                                            const std::vector<std::string>& outputs, const std::string& port) {
    if (std::find(inputs.begin(), inputs.end(), port) != inputs.end()) {
        return PortDirection::input;
    }
    if (std::find(outputs.begin(), outputs.end(), port) != outputs.end()) {
        return PortDirection::output;
    }
    return std::nullopt;
}

}  // namespace

std::optional<PortDirection> PrimitiveSpec::direction_of(const std::string& port) const {
    return find_direction(inputs, outputs, port);
}

std::optional<PortDirection> Instance::direction_of(const std::string& port) const {
    return find_direction(inputs, outputs, port);
}

bool Instance::has_input(const std::string& port) const { return direction_of(port) == PortDirection::input; }

bool Instance::has_output(const std::string& port) const { return direction_of(port) == PortDirection::output; }

std::vector<GuaranteeAtom> Instance::atoms() const {
    std::vector<GuaranteeAtom> out;
    out.reserve(2 * (inputs.size() + outputs.size()));
    for (const auto* ports : {&inputs, &outputs}) {
        for (const auto& p : *ports) {
            out.push_back(conf_atom(name, p));
            out.push_back(intg_atom(name, p));
        }
    }
    return out;
}

std::string to_string(const Channel& ch) { return ch.src + "." + ch.out_port + " -> " + ch.dst + "." + ch.in_port; }

Network::Network(std::string name, std::vector<Instance> instances, std::vector<Channel> channels, DomainSet domains)
    : name_(std::move(name)), instances_(std::move(instances)), channels_(std::move(channels)),
      domains_(std::move(domains)) {
    std::sort(instances_.begin(), instances_.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    std::sort(channels_.begin(), channels_.end());
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        if (!by_name_.emplace(instances_[i].name, i).second) {
            throw ModelError("duplicate instance name '" + instances_[i].name + "'");
        }
    }
    // Duplicate endpoints are reported by validate_network; the index keeps the first.
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        into_.emplace(std::make_pair(channels_[i].dst, channels_[i].in_port), i);
        from_.emplace(std::make_pair(channels_[i].src, channels_[i].out_port), i);
    }
}

const Instance* Network::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &instances_[it->second];
}

const Instance& Network::at(const std::string& name) const {
    const auto* inst = find(name);
    if (inst == nullptr) {
        throw ModelError("unknown instance '" + name + "'");
    }
    return *inst;
}

const Channel* Network::channel_into(const std::string& inst, const std::string& in_port) const {
    auto it = into_.find({inst, in_port});
    return it == into_.end() ? nullptr : &channels_[it->second];
}

const Channel* Network::channel_from(const std::string& inst, const std::string& out_port) const {
    auto it = from_.find({inst, out_port});
    return it == from_.end() ? nullptr : &channels_[it->second];
}

std::vector<GuaranteeAtom> Network::atoms() const {
    std::vector<GuaranteeAtom> out;
    for (const auto& inst : instances_) {
        auto a = inst.atoms();
        out.insert(out.end(), a.begin(), a.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Instance bind_instance(const PrimitiveSpec& spec, const std::string& instance_name) {
    if (!is_valid_identifier(instance_name)) {
        throw ModelError("invalid instance name '" + instance_name + "'");
    }
    std::set<std::string> seen;
    for (const auto* ports : {&spec.inputs, &spec.outputs}) {
        for (const auto& p : *ports) {
            if (!is_valid_identifier(p)) {
                throw ModelError("instance '" + instance_name + "': invalid port name '" + p + "'");
            }
            // Global atoms are "<instance>.<port>", so names must be unique across directions.
            if (!seen.insert(p).second) {
                throw ModelError("instance '" + instance_name + "': port '" + p + "' declared twice");
            }
        }
    }
    for (const auto& a : free_atoms(spec.rule_template)) {
        if (!a.is_local()) {
            continue;
        }
        if (!spec.direction_of(a.port)) {
            throw ModelError("instance '" + instance_name + "' (" + spec.kind + "): rule references undeclared port '" +
                             a.port + "'");
        }
    }
    return Instance{instance_name, spec.kind, spec.inputs, spec.outputs, bind_atoms(spec.rule_template, instance_name),
                    {}};
}

Instance bind_instance(const Network& net, const PrimitiveSpec& spec, const std::string& instance_name) {
    if (net.find(instance_name) != nullptr) {
        throw ModelError("duplicate instance name '" + instance_name + "'");
    }
    return bind_instance(spec, instance_name);
}

std::optional<std::string> predecessor(const Network& net, const std::string& inst, const std::string& in_port) {
    if (!net.at(inst).has_input(in_port)) {
        throw ModelError("instance '" + inst + "' has no input port '" + in_port + "'");
    }
    const auto* ch = net.channel_into(inst, in_port);
    return ch ? std::optional(ch->src) : std::nullopt;
}

std::optional<std::string> successor(const Network& net, const std::string& inst, const std::string& out_port) {
    if (!net.at(inst).has_output(out_port)) {
        throw ModelError("instance '" + inst + "' has no output port '" + out_port + "'");
    }
    const auto* ch = net.channel_from(inst, out_port);
    return ch ? std::optional(ch->dst) : std::nullopt;
}

Guarantee instance_guarantee(const Instance& inst, const Assignment& asg) {
    Guarantee g;
    for (const auto& atom : inst.atoms()) {
        auto it = asg.find(atom);
        if (it == asg.end()) {
            throw ModelError("assignment has no value for " + std::string(to_string(atom.kind)) + "(" +
                             atom.port_name() + ")");
        }
        (atom.kind == GuaranteeKind::conf ? g.conf : g.intg) |= it->second;
    }
    return g;
}

const Domain* domain_of(const DomainSet& domains, const std::string& inst) {
    for (const auto& d : domains) {
        if (std::binary_search(d.members.begin(), d.members.end(), inst)) {
            return &d;
        }
    }
    return nullptr;
}

DomainSet move_instance(const DomainSet& domains, const std::string& inst, const std::string& target_id) {
    const auto* current = domain_of(domains, inst);
    if (current == nullptr) {
        throw ModelError("instance '" + inst + "' is not assigned to a domain");
    }
    auto target = std::find_if(domains.begin(), domains.end(), [&](const auto& d) { return d.id == target_id; });
    if (target == domains.end()) {
        throw ModelError("unknown domain '" + target_id + "'");
    }
    if (current->id == target_id) {
        return domains;
    }
    DomainSet out;
    out.reserve(domains.size());
    for (const auto& d : domains) {
        Domain next = d;
        if (d.id == current->id) {
            next.members.erase(std::find(next.members.begin(), next.members.end(), inst));
            if (next.members.empty()) {
                continue;
            }
        } else if (d.id == target_id) {
            next.members.insert(std::lower_bound(next.members.begin(), next.members.end(), inst), inst);
        }
        out.push_back(std::move(next));
    }
    return out;
}

Guarantee domain_guarantee(const Domain& d, const Network& net, const Assignment& asg) {
    Guarantee g;
    for (const auto& m : d.members) {
        g |= instance_guarantee(net.at(m), asg);
    }
    return g;
}

std::vector<StructuralIssue> validate_network(const Network& net) {
    std::vector<StructuralIssue> issues;
    auto error = [&](const std::string& inst, std::string msg) { issues.push_back({inst, std::move(msg), false}); };

    std::map<std::pair<std::string, std::string>, int> into_count;
    std::map<std::pair<std::string, std::string>, int> from_count;
    for (const auto& ch : net.channels()) {
        const auto* src = net.find(ch.src);
        const auto* dst = net.find(ch.dst);
        if (src == nullptr) {
            error(ch.src, "channel " + to_string(ch) + ": unknown source instance");
        } else if (!src->has_output(ch.out_port)) {
            error(ch.src, "channel " + to_string(ch) + ": '" + ch.out_port + "' is not an output port of " + src->kind);
        }
        if (dst == nullptr) {
            error(ch.dst, "channel " + to_string(ch) + ": unknown destination instance");
        } else if (!dst->has_input(ch.in_port)) {
            error(ch.dst, "channel " + to_string(ch) + ": '" + ch.in_port + "' is not an input port of " + dst->kind);
        }
        if (ch.src == ch.dst) {
            error(ch.src, "channel " + to_string(ch) + ": source and destination are the same instance");
        }
        if (++into_count[{ch.dst, ch.in_port}] == 2) {
            error(ch.dst, "input port '" + ch.in_port + "' has more than one incoming channel");
        }
        if (++from_count[{ch.src, ch.out_port}] == 2) {
            error(ch.src, "output port '" + ch.out_port + "' has more than one outgoing channel");
        }
    }

    for (const auto& inst : net.instances()) {
        for (const auto& p : inst.inputs) {
            if (inst.kind != "env" && net.channel_into(inst.name, p) == nullptr) {
                error(inst.name, "input port '" + p + "' is not connected");
            }
        }
        for (const auto& p : inst.outputs) {
            if (net.channel_from(inst.name, p) == nullptr) {
                issues.push_back({inst.name, "output port '" + p + "' is not connected", true});
            }
        }
    }

    if (!net.domains().empty()) {
        std::map<std::string, int> seen;
        for (const auto& d : net.domains()) {
            for (const auto& m : d.members) {
                if (net.find(m) == nullptr) {
                    error(m, "domain " + d.id + " lists unknown instance");
                }
                if (++seen[m] == 2) {
                    error(m, "instance is a member of more than one domain");
                }
            }
        }
        for (const auto& inst : net.instances()) {
            if (!seen.contains(inst.name)) {
                error(inst.name, "instance is not assigned to a domain");
            }
        }
    }

    std::sort(issues.begin(), issues.end());
    return issues;
}

}  // namespace protopart
