// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/registry.hpp"

namespace protopart {

namespace {

RuleTemplate fixed(std::string kind, std::vector<std::string> inputs, std::vector<std::string> outputs,
                   std::string_view rule, std::string rationale) {
    return {std::move(kind), std::move(inputs), std::move(outputs), parse_rule(rule), false, std::move(rationale)};
}

}  // namespace

PrimitiveRegistry::PrimitiveRegistry() {
    std::vector<RuleTemplate> all{
        {"env", {"in"}, {"out"}, RuleExpr::constant(true), true,
         "Model boundary. Imposes nothing itself; its confidentiality/integrity attributes become one "
         "assumption per port atom (absent attributes mean false)."},
        fixed("const", {}, {"Const"}, "true", "Fixed value; requires nothing from its environment."),
        fixed("rng", {"len"}, {"data"}, "conf(data) & intg(len)",
              "Random output must stay secret; the requested length is public but must not be attacker-chosen."),
        {"transform", {"in"}, {"out"}, transform_rule({"in"}, {"out"}), true,
         "Encoding/branching. Any confidential input makes all outputs confidential; integrity on any output "
         "requires integrity on all inputs."},
        fixed("enc_ctr", {"Plain", "Key", "Ctr"}, {"Cipher"},
              "(intg(Cipher) -> intg(Plain)) & intg(Key) & conf(Key) & intg(Ctr)",
              "Counter mode gives no integrity, so ciphertext integrity needs plaintext integrity. Key needs both "
              "guarantees; the counter needs integrity since key/counter reuse is fatal."),
        fixed("dec_ctr", {"Cipher", "Key", "Ctr"}, {"Plain"},
              "(intg(Plain) -> intg(Cipher)) & intg(Key) & conf(Key) & intg(Ctr)",
              "Mirror of enc_ctr. Plaintext confidentiality is left to the outgoing channel."),
        fixed("dhpub", {"g", "m", "x"}, {"pub"}, "intg(g) & intg(m) & conf(x) & intg(x)",
              "Group parameters and secret exponent must not be attacker-chosen; the exponent must stay secret."),
        fixed("dhsec", {"g", "m", "x", "pub"}, {"ssec"},
              "intg(g) & intg(m) & conf(x) & intg(x) & conf(ssec) & "
              "(intg(ssec) -> (intg(pub) & intg(g) & intg(m) & intg(x)))",
              "As dhpub; the shared secret is confidential, and its integrity depends on the integrity of every "
              "input including the peer's public value."),
        fixed("hmac", {"Key", "Msg"}, {"Tag"}, "intg(Key) & conf(Key)",
              "Tag integrity is cryptographic; under the PRF assumption message confidentiality does not "
              "propagate to the tag."),
        fixed("sign", {"Key", "Msg"}, {"Sig"}, "intg(Key) & conf(Key) & intg(Msg)",
              "Signing key needs both guarantees; an attacker must not choose what gets signed."),
        fixed("verify", {"PubKey", "Msg", "Sig"}, {"Result"}, "intg(PubKey) & (intg(Result) -> intg(PubKey))",
              "Verification is only meaningful against an authentic public key."),
    };
    for (auto& t : all) {
        auto kind = t.kind;
        templates_.emplace(std::move(kind), std::move(t));
    }
}

const PrimitiveRegistry& PrimitiveRegistry::builtin() {
    static const PrimitiveRegistry registry;
    return registry;
}

const RuleTemplate& PrimitiveRegistry::template_for(const std::string& kind) const {
    auto it = templates_.find(kind);
    if (it == templates_.end()) {
        throw ModelError("unknown primitive kind '" + kind + "'");
    }
    return it->second;
}

std::vector<std::string> PrimitiveRegistry::kinds() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : templates_) {
        out.push_back(k);
    }
    return out;
}

PrimitiveSpec PrimitiveRegistry::make_spec(const std::string& kind, const std::vector<std::string>& inputs,
                                           const std::vector<std::string>& outputs) const {
    const auto& t = template_for(kind);
    if (!t.variadic) {
        return {t.kind, t.inputs, t.outputs, t.expr};
    }
    if (kind == "transform") {
        return {kind, inputs, outputs, transform_rule(inputs, outputs)};
    }
    return {kind, inputs, outputs, t.expr};
}

const RuleTemplate& template_for(const std::string& kind) { return PrimitiveRegistry::builtin().template_for(kind); }

RuleExpr instantiate_rule(const RuleTemplate& tmpl, const std::string& instance_name) {
    return bind_instance(PrimitiveSpec{tmpl.kind, tmpl.inputs, tmpl.outputs, tmpl.expr}, instance_name).bound_rule;
}

RuleExpr channel_rule(const Channel& ch) {
    auto out_i = RuleExpr::atom(intg_atom(ch.src, ch.out_port));
    auto in_i = RuleExpr::atom(intg_atom(ch.dst, ch.in_port));
    auto out_c = RuleExpr::atom(conf_atom(ch.src, ch.out_port));
    auto in_c = RuleExpr::atom(conf_atom(ch.dst, ch.in_port));
    return RuleExpr::all_of({RuleExpr::iff(out_i, in_i), RuleExpr::iff(out_c, in_c)});
}

RuleExpr channel_rule(const Network& net, const Channel& ch) {
    const auto* src = net.find(ch.src);
    const auto* dst = net.find(ch.dst);
    if (src == nullptr || !src->has_output(ch.out_port) || dst == nullptr || !dst->has_input(ch.in_port)) {
        throw ModelError("channel " + to_string(ch) + " has an unbound endpoint");
    }
    return channel_rule(ch);
}

RuleExpr transform_rule(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
    if (inputs.empty() || outputs.empty()) {
        return RuleExpr::constant(true);
    }
    std::vector<RuleExpr> any_conf_in;
    std::vector<RuleExpr> all_intg_in;
    for (const auto& i : inputs) {
        any_conf_in.push_back(RuleExpr::atom(conf_atom("", i)));
        all_intg_in.push_back(RuleExpr::atom(intg_atom("", i)));
    }
    auto conf_in = RuleExpr::any_of(any_conf_in);
    auto intg_in = RuleExpr::all_of(all_intg_in);
    std::vector<RuleExpr> parts;
    for (const auto& o : outputs) {
        parts.push_back(RuleExpr::implies(conf_in, RuleExpr::atom(conf_atom("", o))));
        parts.push_back(RuleExpr::implies(RuleExpr::atom(intg_atom("", o)), intg_in));
    }
    return RuleExpr::all_of(std::move(parts));
}

RuleExpr env_assumption_rule(const GuaranteeAtom& atom, bool value) {
    auto a = RuleExpr::atom(atom);
    return value ? a : RuleExpr::negate(a);
}

}  // namespace protopart
