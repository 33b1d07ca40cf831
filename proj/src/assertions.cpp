// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/assertions.hpp"

#include <algorithm>

namespace protopart {

std::vector<Violation> check_assertions(const ModelDocument& doc, const Assignment& asg) {
    const auto& channels = doc.network.channels();
    auto value = [&](const GuaranteeAtom& a) {
        auto it = asg.find(a);
        if (it == asg.end()) {
            throw ModelError("assignment has no value for " + std::string(to_string(a.kind)) + "(" + a.port_name() +
                             ")");
        }
        return it->second;
    };

    std::vector<Violation> out;
    for (const auto& a : doc.assertions) {
        if (!std::binary_search(channels.begin(), channels.end(), a.channel)) {
            throw ModelError("assertion references unknown channel " + to_string(a.channel));
        }
        bool conf = value(conf_atom(a.channel.src, a.channel.out_port));
        bool intg = value(intg_atom(a.channel.src, a.channel.out_port));
        if ((a.require_conf && *a.require_conf != conf) || (a.require_intg && *a.require_intg != intg)) {
            out.push_back({a.channel, a.require_conf, a.require_intg, conf, intg, a.message});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.channel < y.channel; });
    return out;
}

std::string format_violation(const Violation& v) {
    auto b = [](bool x) { return x ? "true" : "false"; };
    std::string expected;
    std::string got;
    if (v.expected_conf) {
        expected += std::string("conf=") + b(*v.expected_conf);
        got += std::string("conf=") + b(v.actual_conf);
    }
    if (v.expected_intg) {
        expected += std::string(expected.empty() ? "" : " ") + "intg=" + b(*v.expected_intg);
        got += std::string(got.empty() ? "" : " ") + "intg=" + b(v.actual_intg);
    }
    std::string line = "ASSERT FAIL " + v.channel.src + "." + v.channel.out_port + " -> " + v.channel.dst + "." +
                       v.channel.in_port + ": expected " + expected + ", got " + got;
    if (!v.message.empty()) {
        line += " — " + v.message;
    }
    return line;
}

}  // namespace protopart
