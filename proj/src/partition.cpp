// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/partition.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace protopart {

std::optional<Strategy> parse_strategy(std::string_view name) {
    if (name == "none") {
        return Strategy::none;
    }
    if (name == "basic") {
        return Strategy::basic;
    }
    if (name == "const") {
        return Strategy::merge_const;
    }
    if (name == "branch") {
        return Strategy::branch;
    }
    return std::nullopt;
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::none: return "none";
    case Strategy::basic: return "basic";
    case Strategy::merge_const: return "const";
    case Strategy::branch: return "branch";
    }
    return "?";
}

namespace {

std::string domain_id(std::size_t n) { return "K" + std::to_string(n); }

const Domain& domain_by_id(const DomainSet& domains, const std::string& id) {
    auto it = std::find_if(domains.begin(), domains.end(), [&](const auto& d) { return d.id == id; });
    if (it == domains.end()) {
        throw ModelError("unknown domain '" + id + "'");
    }
    return *it;
}

std::vector<std::string> neighbours(const Network& net, const Instance& inst) {
    std::vector<std::string> out;
    for (const auto& p : inst.inputs) {
        if (auto s = predecessor(net, inst.name, p)) {
            out.push_back(*s);
        }
    }
    for (const auto& p : inst.outputs) {
        if (auto d = successor(net, inst.name, p)) {
            out.push_back(*d);
        }
    }
    return out;
}

}  // namespace

DomainSet merge_none(const Network& net, const Assignment& /*asg*/) {
    DomainSet out;
    for (const auto& inst : net.instances()) {
        out.push_back({domain_id(out.size() + 1), {inst.name}});
    }
    return out;
}

DomainSet merge_basic(const Network& net, const Assignment& asg) {
    std::map<std::string, Guarantee> guarantee;
    for (const auto& inst : net.instances()) {
        guarantee[inst.name] = instance_guarantee(inst, asg);
    }
    std::set<std::string> assigned;
    DomainSet out;
    for (const auto& seed : net.instances()) {
        if (assigned.contains(seed.name)) {
            continue;
        }
        Domain d{domain_id(out.size() + 1), {}};
        const auto want = guarantee[seed.name];
        std::deque<std::string> queue{seed.name};
        assigned.insert(seed.name);
        while (!queue.empty()) {
            auto name = queue.front();
            queue.pop_front();
            d.members.push_back(name);
            for (const auto& n : neighbours(net, net.at(name))) {
                if (!assigned.contains(n) && guarantee[n] == want) {
                    assigned.insert(n);
                    queue.push_back(n);
                }
            }
        }
        std::sort(d.members.begin(), d.members.end());
        out.push_back(std::move(d));
    }
    return out;
}

DomainSet merge_const(const Network& net, const Assignment& asg, const DomainSet& domains) {
    DomainSet out = domains;
    for (const auto& inst : net.instances()) {
        if (inst.kind != "const" || inst.outputs.size() != 1) {
            continue;
        }
        auto succ = successor(net, inst.name, inst.outputs.front());
        if (!succ) {
            continue;
        }
        const auto* target = domain_of(out, *succ);
        const auto* current = domain_of(out, inst.name);
        if (target == nullptr || current == nullptr || target->id == current->id) {
            continue;
        }
        if (domain_guarantee(*target, net, asg).dominates(instance_guarantee(inst, asg))) {
            out = move_instance(out, inst.name, target->id);
        }
    }
    return out;
}

std::optional<std::string> samepart(const Network& net, const DomainSet& domains, const std::string& inst) {
    const auto& i = net.at(inst);
    std::optional<std::string> common;
    for (const auto& p : i.outputs) {
        auto succ = successor(net, inst, p);
        if (!succ) {
            return std::nullopt;
        }
        const auto* d = domain_of(domains, *succ);
        if (d == nullptr || (common && *common != d->id)) {
            return std::nullopt;
        }
        common = d->id;
    }
    return common;
}

DomainSet merge_branch(const Network& net, const Assignment& asg, const DomainSet& domains,
                       const BranchOptions& options) {
    auto is_simple = [&](const Instance& inst) {
        if (inst.inputs.size() != 1) {
            return false;
        }
        if (inst.kind == "transform") {
            return true;
        }
        if (options.max_weight && inst.kind != "env") {
            const auto w = options.weights ? options.weights->weight(inst.kind) : default_weights().weight(inst.kind);
            return w <= *options.max_weight;
        }
        return false;
    };

    DomainSet out = domains;
    for (const auto& c : net.instances()) {
        if (c.kind != "const" || c.outputs.size() != 1) {
            continue;
        }
        auto succ = successor(net, c.name, c.outputs.front());
        if (!succ) {
            continue;
        }
        const auto& t = net.at(*succ);
        if (!is_simple(t)) {
            continue;
        }
        auto target_id = samepart(net, out, t.name);
        if (!target_id) {
            continue;
        }
        const auto& target = domain_by_id(out, *target_id);
        const auto provided = domain_guarantee(target, net, asg);
        if (!provided.dominates(instance_guarantee(c, asg)) || !provided.dominates(instance_guarantee(t, asg))) {
            continue;
        }
        const auto target_name = target.id;
        out = move_instance(out, t.name, target_name);
        out = move_instance(out, c.name, target_name);
    }
    return out;
}

DomainSet partition(const Network& net, const Assignment& asg, Strategy strategy, const BranchOptions& options) {
    if (strategy == Strategy::none) {
        return merge_none(net, asg);
    }
    auto d = merge_basic(net, asg);
    if (strategy == Strategy::basic) {
        return d;
    }
    d = merge_const(net, asg, d);
    if (strategy == Strategy::merge_const) {
        return d;
    }
    return merge_branch(net, asg, d, options);
}

std::vector<PolicyEntry> communication_policy(const Network& net, const DomainSet& domains, const Assignment& asg) {
    std::vector<PolicyEntry> out;
    for (const auto& ch : net.channels()) {
        const auto* s = domain_of(domains, ch.src);
        const auto* d = domain_of(domains, ch.dst);
        if (s == nullptr || d == nullptr) {
            throw ModelError("channel " + to_string(ch) + " touches an unassigned instance");
        }
        if (s->id == d->id) {
            continue;
        }
        Guarantee g{asg.at(conf_atom(ch.src, ch.out_port)), asg.at(intg_atom(ch.src, ch.out_port))};
        out.push_back({ch, s->id, d->id, g});
    }
    return out;
}

std::string format_policy_entry(const PolicyEntry& e) {
    return "POLICY " + to_string(e.channel) + " [" + e.src_domain + " -> " + e.dst_domain +
           "] conf=" + (e.required.conf ? "true" : "false") + " intg=" + (e.required.intg ? "true" : "false");
}

GuaranteeClass classify(const Guarantee& g) {
    if (g.conf) {
        return GuaranteeClass::conf_intg;
    }
    return g.intg ? GuaranteeClass::integrity : GuaranteeClass::none;
}

Metrics metrics(const Network& net, const DomainSet& domains, const Assignment& asg, const WeightTable& weights) {
    Metrics m;
    m.process_count = domains.size();
    m.ipc_channel_count = communication_policy(net, domains, asg).size();
    for (const auto& d : domains) {
        long sloc = 0;
        for (const auto& member : d.members) {
            sloc += weights.weight(net.at(member).kind);
        }
        switch (classify(domain_guarantee(d, net, asg))) {
        case GuaranteeClass::none: m.tcb_none += sloc; break;
        case GuaranteeClass::integrity: m.tcb_intg += sloc; break;
        case GuaranteeClass::conf_intg: m.tcb_conf_intg += sloc; break;
        }
    }
    return m;
}

DomainSet monolithic(const Network& net) {
    if (net.instances().empty()) {
        return {};
    }
    Domain d{"K1", {}};
    for (const auto& inst : net.instances()) {
        d.members.push_back(inst.name);
    }
    return {d};
}

}  // namespace protopart
