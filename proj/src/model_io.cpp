// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "protopart/registry.hpp"

namespace protopart {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> annotation_attributes{"partition", "conf", "intg", "conflict"};

std::map<std::string, std::string> attributes_of(const pt::ptree& node) {
    std::map<std::string, std::string> out;
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
        for (const auto& [k, v] : *attrs) {
            out[k] = v.data();
        }
    }
    return out;
}

std::string required(const std::map<std::string, std::string>& attrs, const std::string& key,
                     const std::string& where) {
    auto it = attrs.find(key);
    if (it == attrs.end() || it->second.empty()) {
        throw ParseError(where + ": missing attribute '" + key + "'");
    }
    return it->second;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

struct RawFlow {
    std::string sarg;
    std::string sink;
    std::string darg;
    std::vector<Assertion> assertions;  // channel filled in later
};

struct RawElement {
    std::string kind;
    std::string id;
    std::vector<RawFlow> flows;
};

void push_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) {
        v.push_back(s);
    }
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string attr(std::string_view key, std::string_view value) {
    return " " + std::string(key) + "=\"" + escape(value) + "\"";
}

std::string_view bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

bool parse_bool(std::string_view text, std::string_view what) {
    if (text == "true") {
        return true;
    }
    if (text == "false") {
        return false;
    }
    throw ParseError(std::string(what) + ": malformed boolean '" + std::string(text) + "' (expected true or false)");
}

const EnvAssumption* ModelDocument::env_assumption(const std::string& instance) const {
    for (const auto& e : env_assumptions) {
        if (e.instance == instance) {
            return &e;
        }
    }
    return nullptr;
}

ModelDocument parse_model(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed XML: " + std::string(e.what()));
    }
    if (tree.size() != 1 || tree.begin()->first != "model") {
        throw ParseError("expected a single <model> root element");
    }
    const auto& root = tree.begin()->second;
    const auto& registry = PrimitiveRegistry::builtin();

    ModelDocument doc;
    std::string model_name;
    if (auto attrs = attributes_of(root); attrs.contains("name")) {
        model_name = attrs["name"];
    }

    std::vector<Instance> instances;
    std::vector<RawElement> raw;
    std::set<std::string> ids;

    for (const auto& [tag, node] : root) {
        if (tag == "<xmlattr>") {
            continue;
        }
        auto attrs = attributes_of(node);
        const auto id = required(attrs, "id", "<" + tag + ">");
        const auto where = "<" + tag + " id=\"" + id + "\">";
        if (!ids.insert(id).second) {
            throw ParseError(where + ": duplicate id");
        }

        ElementExtras extras;
        std::map<std::string, std::string> config;
        std::vector<std::string> args;
        std::vector<std::string> outs;
        RawElement element{tag, id, {}};

        for (const auto& [child_tag, child] : node) {
            if (child_tag == "<xmlattr>") {
                continue;
            }
            if (child_tag == "description") {
                extras.description = trim(child.data());
            } else if (child_tag == "rule") {
                try {
                    extras.inline_rule = parse_rule(child.data());
                } catch (const RuleError& e) {
                    throw ParseError(where + ": " + e.what());
                }
            } else if (child_tag == "config") {
                for (const auto& [k, v] : attributes_of(child)) {
                    config[k] = v;
                }
            } else if (child_tag == "arg") {
                push_unique(args, required(attributes_of(child), "name", where + " <arg>"));
            } else if (child_tag == "out") {
                push_unique(outs, required(attributes_of(child), "name", where + " <out>"));
            } else if (child_tag == "flow") {
                auto fa = attributes_of(child);
                RawFlow flow{required(fa, "sarg", where + " <flow>"), required(fa, "sink", where + " <flow>"),
                             required(fa, "darg", where + " <flow>"), {}};
                for (const auto& [assert_tag, assert_node] : child) {
                    if (assert_tag == "<xmlattr>") {
                        continue;
                    }
                    if (assert_tag != "assert") {
                        throw ParseError(where + " <flow>: unexpected element <" + assert_tag + ">");
                    }
                    auto aa = attributes_of(assert_node);
                    Assertion a;
                    if (aa.contains("confidentiality")) {
                        a.require_conf = parse_bool(aa["confidentiality"], where + " <assert confidentiality>");
                    }
                    if (aa.contains("integrity")) {
                        a.require_intg = parse_bool(aa["integrity"], where + " <assert integrity>");
                    }
                    if (!a.require_conf && !a.require_intg) {
                        throw ParseError(where + " <assert>: needs a confidentiality or integrity attribute");
                    }
                    a.message = trim(assert_node.data());
                    flow.assertions.push_back(std::move(a));
                }
                element.flows.push_back(std::move(flow));
            } else {
                throw ParseError(where + ": unexpected element <" + child_tag + ">");
            }
        }

        PrimitiveSpec spec;
        const bool registered = registry.contains(tag);
        if (!registered && !extras.inline_rule) {
            throw ParseError(where + ": unknown primitive kind '" + tag + "' and no inline <rule>");
        }
        if (registered && !registry.template_for(tag).variadic) {
            spec = registry.make_spec(tag);
            for (const auto& a : args) {
                if (!spec.direction_of(a) || *spec.direction_of(a) != PortDirection::input) {
                    throw ParseError(where + ": '" + a + "' is not an input port of " + tag);
                }
            }
            for (const auto& o : outs) {
                if (!spec.direction_of(o) || *spec.direction_of(o) != PortDirection::output) {
                    throw ParseError(where + ": '" + o + "' is not an output port of " + tag);
                }
            }
            for (const auto& f : element.flows) {
                if (!spec.direction_of(f.sarg) || *spec.direction_of(f.sarg) != PortDirection::output) {
                    throw ParseError(where + ": sarg '" + f.sarg + "' is not an output port of " + tag);
                }
            }
        } else {
            for (const auto& f : element.flows) {
                push_unique(outs, f.sarg);
            }
            spec = registered ? registry.make_spec(tag, args, outs) : PrimitiveSpec{tag, args, outs, RuleExpr()};
        }
        if (extras.inline_rule) {
            spec.rule_template = *extras.inline_rule;
        }

        Instance inst;
        try {
            inst = bind_instance(spec, id);
        } catch (const ModelError& e) {
            throw ParseError(e.what());
        }

        if (tag == "env") {
            EnvAssumption env{id, false, false};
            if (attrs.contains("confidentiality")) {
                env.conf = parse_bool(attrs["confidentiality"], where + " confidentiality");
            }
            if (attrs.contains("integrity")) {
                env.intg = parse_bool(attrs["integrity"], where + " integrity");
            }
            doc.env_assumptions.push_back(env);
            attrs.erase("confidentiality");
            attrs.erase("integrity");
        }
        attrs.erase("id");
        for (const auto& a : annotation_attributes) {
            attrs.erase(a);
        }
        extras.attributes = attrs;

        inst.config = config;
        for (const auto& [k, v] : attrs) {
            inst.config.emplace(k, v);
        }
        if (!config.empty()) {
            doc.exec_bindings[id] = config;
        }
        doc.extras[id] = std::move(extras);
        instances.push_back(std::move(inst));
        raw.push_back(std::move(element));
    }

    std::map<std::string, const Instance*> by_id;
    for (const auto& inst : instances) {
        by_id[inst.name] = &inst;
    }
    std::vector<Channel> channels;
    for (const auto& element : raw) {
        const auto where = "<" + element.kind + " id=\"" + element.id + "\">";
        for (const auto& f : element.flows) {
            auto sink = by_id.find(f.sink);
            if (sink == by_id.end()) {
                throw ParseError(where + ": flow sink '" + f.sink + "' not found");
            }
            if (!sink->second->has_input(f.darg)) {
                throw ParseError(where + ": darg '" + f.darg + "' is not an input port of '" + f.sink + "' (" +
                                 sink->second->kind + ")");
            }
            Channel ch{element.id, f.sarg, f.sink, f.darg};
            channels.push_back(ch);
            for (auto a : f.assertions) {
                a.channel = ch;
                doc.assertions.push_back(std::move(a));
            }
        }
    }

    std::sort(doc.env_assumptions.begin(), doc.env_assumptions.end(),
              [](const auto& a, const auto& b) { return a.instance < b.instance; });
    std::stable_sort(doc.assertions.begin(), doc.assertions.end(),
                     [](const auto& a, const auto& b) { return a.channel < b.channel; });
    doc.network = Network(model_name, std::move(instances), std::move(channels));
    return doc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelDocument load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string serialize_annotated(const ModelDocument& doc, const Annotations& notes) {
    const auto& net = doc.network;
    const auto& registry = PrimitiveRegistry::builtin();
    auto lookup = [&](const GuaranteeAtom& a) {
        auto it = notes.assignment->find(a);
        if (it == notes.assignment->end()) {
            throw ModelError("assignment has no value for " + std::string(to_string(a.kind)) + "(" + a.port_name() +
                             ")");
        }
        return it->second;
    };
    auto port_notes = [&](const std::string& inst, const std::string& port) {
        if (notes.assignment == nullptr) {
            return std::string();
        }
        return attr("conf", bool_text(lookup(conf_atom(inst, port)))) +
               attr("intg", bool_text(lookup(intg_atom(inst, port))));
    };
    const bool annotating = notes.assignment != nullptr;

    std::ostringstream out;
    out << "<model" << (net.name().empty() ? "" : attr("name", net.name()));
    if (net.instances().empty()) {
        out << "/>\n";
        return out.str();
    }
    out << ">\n";

    for (const auto& inst : net.instances()) {
        static const ElementExtras no_extras;
        auto ex_it = doc.extras.find(inst.name);
        const auto& ex = ex_it == doc.extras.end() ? no_extras : ex_it->second;
        const bool variadic = !registry.contains(inst.kind) || registry.template_for(inst.kind).variadic;

        std::vector<std::string> body;
        if (!ex.description.empty()) {
            body.push_back("<description>" + escape(ex.description) + "</description>");
        }
        if (ex.inline_rule) {
            body.push_back("<rule>" + escape(to_string(*ex.inline_rule)) + "</rule>");
        }
        if (auto cfg = doc.exec_bindings.find(inst.name); cfg != doc.exec_bindings.end() && !cfg->second.empty()) {
            std::string line = "<config";
            for (const auto& [k, v] : cfg->second) {
                line += attr(k, v);
            }
            body.push_back(line + "/>");
        }
        for (const auto& p : inst.inputs) {
            if (variadic || annotating) {
                body.push_back("<arg" + attr("name", p) + port_notes(inst.name, p) + "/>");
            }
        }
        for (const auto& p : inst.outputs) {
            if (net.channel_from(inst.name, p) == nullptr && (variadic || annotating)) {
                body.push_back("<out" + attr("name", p) + port_notes(inst.name, p) + "/>");
            }
        }
        for (const auto& p : inst.outputs) {
            const auto* ch = net.channel_from(inst.name, p);
            if (ch == nullptr) {
                continue;
            }
            std::string line = "<flow" + attr("sarg", ch->out_port) + attr("sink", ch->dst) +
                               attr("darg", ch->in_port) + port_notes(inst.name, p);
            if (notes.conflict_channels.contains(*ch)) {
                line += attr("conflict", "true");
            }
            std::vector<std::string> asserts;
            for (const auto& a : doc.assertions) {
                if (a.channel != *ch) {
                    continue;
                }
                std::string al = "<assert";
                if (a.require_conf) {
                    al += attr("confidentiality", bool_text(*a.require_conf));
                }
                if (a.require_intg) {
                    al += attr("integrity", bool_text(*a.require_intg));
                }
                al += a.message.empty() ? "/>" : ">" + escape(a.message) + "</assert>";
                asserts.push_back(al);
            }
            if (asserts.empty()) {
                body.push_back(line + "/>");
            } else {
                body.push_back(line + ">");
                for (const auto& al : asserts) {
                    body.push_back("  " + al);
                }
                body.push_back("</flow>");
            }
        }

        out << "  <" << inst.kind << attr("id", inst.name);
        if (const auto* env = doc.env_assumption(inst.name)) {
            out << attr("confidentiality", bool_text(env->conf)) << attr("integrity", bool_text(env->intg));
        }
        for (const auto& [k, v] : ex.attributes) {
            out << attr(k, v);
        }
        if (notes.domains != nullptr) {
            const auto* d = domain_of(*notes.domains, inst.name);
            if (d == nullptr) {
                throw ModelError("instance '" + inst.name + "' is not assigned to a domain");
            }
            out << attr("partition", d->id);
        }
        if (notes.conflict_instances.contains(inst.name)) {
            out << attr("conflict", "true");
        }
        if (body.empty()) {
            out << "/>\n";
            continue;
        }
        out << ">\n";
        for (const auto& line : body) {
            out << "    " << line << "\n";
        }
        out << "  </" << inst.kind << ">\n";
    }
    out << "</model>\n";
    return out.str();
}

std::string serialize_annotated(const ModelDocument& doc, const Assignment& asg, const DomainSet& domains) {
    Annotations notes;
    notes.assignment = &asg;
    notes.domains = &domains;
    return serialize_annotated(doc, notes);
}

long WeightTable::weight(const std::string& kind) const {
    auto it = weights.find(kind);
    return it == weights.end() ? 0 : it->second;
}

WeightTable default_weights() {
    WeightTable t;
    t.weights = {{"const", 5},  {"transform", 15}, {"rng", 30},  {"enc_ctr", 60}, {"dec_ctr", 60}, {"dhpub", 80},
                 {"dhsec", 80}, {"hmac", 60},      {"sign", 60}, {"verify", 60},  {"env", 20}};
    return t;
}

WeightTable parse_weights(std::string_view text) {
    auto table = default_weights();
    const auto& registry = PrimitiveRegistry::builtin();
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        auto where = "weights line " + std::to_string(lineno);
        auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ParseError(where + ": expected 'kind = integer'");
        }
        auto kind = trim(std::string_view(content).substr(0, eq));
        auto value = trim(std::string_view(content).substr(eq + 1));
        long w = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), w);
        if (kind.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
            throw ParseError(where + ": expected 'kind = integer'");
        }
        if (w < 0) {
            throw ParseError(where + ": negative weight for '" + kind + "'");
        }
        if (!registry.contains(kind)) {
            table.warnings.push_back(where + ": unknown kind '" + kind + "' ignored");
            continue;
        }
        table.weights[kind] = w;
    }
    return table;
}

}  // namespace protopart
