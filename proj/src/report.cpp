// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/report.hpp"

#include <array>
#include <iomanip>
#include <sstream>

namespace protopart {

namespace {

struct Style {
    const char* color;
    const char* line;
};

Style style_for(const std::optional<Guarantee>& g) {
    if (!g) {
        return {"black", "solid"};
    }
    if (g->conf && g->intg) {
        return {"purple", "dashed,bold"};
    }
    if (g->conf) {
        return {"red", "dashed"};
    }
    if (g->intg) {
        return {"blue", "dotted"};
    }
    return {"gray", "solid"};
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

std::string node_line(const Instance& inst, const Assignment* asg) {
    std::optional<Guarantee> g;
    if (asg != nullptr) {
        g = instance_guarantee(inst, *asg);
    }
    auto st = style_for(g);
    std::ostringstream out;
    out << quote(inst.name) << " [label=" << quote(inst.name + "\\n" + inst.kind) << ", color=\"" << st.color
        << "\", style=\"filled," << st.line << "\", fillcolor=\"white\"];";
    return out.str();
}

std::optional<Guarantee> channel_guarantee(const Channel& ch, const Assignment* asg) {
    if (asg == nullptr) {
        return std::nullopt;
    }
    Guarantee g;
    g.conf = asg->at(conf_atom(ch.src, ch.out_port));
    g.intg = asg->at(intg_atom(ch.src, ch.out_port));
    return g;
}

}  // namespace

std::string render_dot(const Network& net, const RenderOptions& options) {
    std::ostringstream out;
    out << "digraph " << quote(net.name().empty() ? "model" : net.name()) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box, fontname=\"Helvetica\"];\n";
    out << "  edge [fontname=\"Helvetica\", fontsize=10];\n";
    if (options.domains != nullptr) {
        for (const auto& d : *options.domains) {
            out << "  subgraph " << quote("cluster_" + d.id) << " {\n";
            out << "    label=" << quote(d.id) << ";\n";
            for (const auto& m : d.members) {
                out << "    " << node_line(net.at(m), options.assignment) << "\n";
            }
            out << "  }\n";
        }
        for (const auto& inst : net.instances()) {
            if (domain_of(*options.domains, inst.name) == nullptr) {
                out << "  " << node_line(inst, options.assignment) << "\n";
            }
        }
    } else {
        for (const auto& inst : net.instances()) {
            out << "  " << node_line(inst, options.assignment) << "\n";
        }
    }
    for (const auto& ch : net.channels()) {
        auto st = style_for(channel_guarantee(ch, options.assignment));
        out << "  " << quote(ch.src) << " -> " << quote(ch.dst) << " [label=" << quote(ch.out_port + " -> " + ch.in_port)
            << ", color=\"" << st.color << "\", style=\"" << st.line << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string reduction_percent(long part, long whole) {
    if (whole == 0) {
        return "-";
    }
    // tenths of a percent, rounded half up: floor((2x + w) / 2w) with x = 1000 (w - p)
    long long x = 1000LL * (whole - part);
    long long num = 2 * x + whole;
    long long den = 2LL * whole;
    long long q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) {
        --q;
    }
    std::ostringstream out;
    if (q < 0) {
        out << '-';
        q = -q;
    }
    out << q / 10 << '.' << q % 10 << '%';
    return out.str();
}

std::string metrics_table(const Metrics& mono, const Metrics& per_instance, const Metrics& part,
                          std::string_view strategy_name) {
    struct Row {
        std::string label;
        long mono;
        long per_instance;
        long part;
        std::string reduction;
    };
    auto sz = [](std::size_t v) { return static_cast<long>(v); };
    std::array<Row, 6> rows{{
        {"None", mono.tcb_none, per_instance.tcb_none, part.tcb_none, reduction_percent(part.tcb_none, mono.tcb_none)},
        {"Integrity", mono.tcb_intg, per_instance.tcb_intg, part.tcb_intg,
         reduction_percent(part.tcb_intg, mono.tcb_intg)},
        {"Confidentiality + Integrity", mono.tcb_conf_intg, per_instance.tcb_conf_intg, part.tcb_conf_intg,
         reduction_percent(part.tcb_conf_intg, mono.tcb_conf_intg)},
        {"TCB", mono.tcb(), per_instance.tcb(), part.tcb(), reduction_percent(part.tcb(), mono.tcb())},
        {"Processes", sz(mono.process_count), sz(per_instance.process_count), sz(part.process_count),
         reduction_percent(sz(part.process_count), sz(per_instance.process_count))},
        {"IPC channels", sz(mono.ipc_channel_count), sz(per_instance.ipc_channel_count), sz(part.ipc_channel_count),
         reduction_percent(sz(part.ipc_channel_count), sz(per_instance.ipc_channel_count))},
    }};
    std::string strategy = "Partitioned (" + std::string(strategy_name) + ")";
    std::size_t w0 = 5;
    for (const auto& r : rows) {
        w0 = std::max(w0, r.label.size());
    }
    const std::size_t w1 = 10;
    const std::size_t w2 = 12;
    const std::size_t w3 = std::max<std::size_t>(strategy.size(), 10);
    const std::size_t w4 = 9;
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(w0)) << "Class" << std::right << "  "
        << std::setw(static_cast<int>(w1)) << "Monolithic" << "  " << std::setw(static_cast<int>(w2)) << "Per-instance"
        << "  " << std::setw(static_cast<int>(w3)) << strategy << "  " << std::setw(static_cast<int>(w4))
        << "Reduction" << "\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(static_cast<int>(w0)) << r.label << std::right << "  "
            << std::setw(static_cast<int>(w1)) << r.mono << "  " << std::setw(static_cast<int>(w2)) << r.per_instance
            << "  " << std::setw(static_cast<int>(w3)) << r.part << "  " << std::setw(static_cast<int>(w4))
            << r.reduction << "\n";
    }
    return out.str();
}

std::string metrics_key_values(const Metrics& m) {
    std::ostringstream out;
    out << "process_count=" << m.process_count << "\n"
        << "ipc_channels=" << m.ipc_channel_count << "\n"
        << "tcb_none=" << m.tcb_none << "\n"
        << "tcb_intg=" << m.tcb_intg << "\n"
        << "tcb_conf_intg=" << m.tcb_conf_intg << "\n";
    return out.str();
}

}  // namespace protopart
