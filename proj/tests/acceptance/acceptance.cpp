// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "expected.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "protopart/executor.hpp"
#include "protopart/partition.hpp"
#include "protopart/registry.hpp"
#include "protopart/report.hpp"
#include "random_network.hpp"

using namespace protopart;
using namespace protopart::testing;

namespace {

constexpr std::uint64_t random_seed_base = 1;
constexpr std::size_t random_count = 200;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Checker {
  public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) {
            failures_.push_back(what);
        }
        all_ok_ = all_ok_ && ok;
    }
    [[nodiscard]] Outcome result(std::string summary) const {
        if (all_ok_) {
            return {true, std::move(summary)};
        }
        std::string detail;
        for (const auto& f : failures_) {
            detail += (detail.empty() ? "" : "; ") + f;
        }
        return {false, detail};
    }

  private:
    bool all_ok_ = true;
    std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed << s << " s";
    return out.str();
}


void check_strategies(Checker& c, const Network& net, const Assignment& asg, const std::string& tag) {
    auto none = merge_none(net, asg);
    auto basic = merge_basic(net, asg);
    auto with_const = merge_const(net, asg, basic);
    auto branch = merge_branch(net, asg, with_const);
    c.expect(none.size() >= basic.size() && basic.size() >= with_const.size() && with_const.size() >= branch.size(),
             tag + ": domain counts not monotone");
    for (const auto* ds : {&none, &basic, &with_const, &branch}) {
        std::size_t members = 0;
        for (const auto& d : *ds) {
            auto g = domain_guarantee(d, net, asg);
            for (const auto& m : d.members) {
                ++members;
                c.expect(g.dominates(instance_guarantee(net.at(m), asg)), tag + ": " + m + " not dominated");
            }
        }
        c.expect(members == net.instances().size(), tag + ": domains do not cover the instances exactly");
        auto policy = communication_policy(net, *ds, asg);
        for (const auto& ch : net.channels()) {
            bool crosses = domain_of(*ds, ch.src)->id != domain_of(*ds, ch.dst)->id;
            auto n = std::count_if(policy.begin(), policy.end(), [&](const auto& e) { return e.channel == ch; });
            c.expect(n == (crosses ? 1 : 0), tag + ": policy mismatch on " + to_string(ch));
        }
    }
}

Outcome criterion_1() {
    auto start = std::chrono::steady_clock::now();
    auto asg = solve_fixture(load_fixture("enc.xml"));
    auto elapsed = seconds_since(start);
    Checker c;
    c.expect(asg.at(intg_atom("enc", "Cipher")) == false, "I(enc.Cipher) should be false");
    c.expect(asg.at(intg_atom("enc", "Key")) == true, "I(enc.Key) should be true");
    c.expect(asg.at(conf_atom("enc", "Key")) == true, "C(enc.Key) should be true");
    c.expect(asg.at(intg_atom("enc", "Ctr")) == true, "I(enc.Ctr) should be true");
    c.expect(elapsed < 1.0, "took " + fmt_seconds(elapsed));
    return c.result("4 encryption facts reproduced in " + fmt_seconds(elapsed));
}

Outcome criterion_2() {
    auto start = std::chrono::steady_clock::now();
    auto asg = solve_fixture(load_fixture("dh.xml"));
    auto elapsed = seconds_since(start);
    Checker c;
    auto expected = dh_expected();
    for (const auto& e : expected) {
        c.expect(asg.at(e.atom) == e.value, std::string(e.symbol) + " should be " + (e.value ? "true" : "false"));
    }
    c.expect(elapsed < 1.0, "took " + fmt_seconds(elapsed));
    return c.result(std::to_string(expected.size()) + " reference atom values matched in " + fmt_seconds(elapsed));
}

Outcome criterion_3() {
    auto doc = load_fixture("dh_keystore_integrity.xml");
    auto cs = collect_constraints(doc);
    auto result = solve_lexmin(cs);
    Checker c;
    if (!std::holds_alternative<Conflict>(result)) {
        c.expect(false, "model with Keystore integrity is satisfiable");
        return c.result("");
    }
    const auto& conflict = std::get<Conflict>(result);
    const Channel gamma_r{"Network", "gy", "unserialize", "in"};
    c.expect(conflict.channels.contains(gamma_r), "core misses the " + to_string(gamma_r) + " channel");
    c.expect(conflict.instances.contains("Network") && conflict.instances.contains("unserialize"),
             "core misses the gamma-r channel endpoints");
    std::vector<LabeledConstraint> core;
    for (const auto& lc : cs.constraints) {
        if (std::binary_search(conflict.core.begin(), conflict.core.end(), lc.label)) {
            core.push_back(lc);
        }
    }
    c.expect(!is_satisfiable(make_constraint_set(core)), "core is satisfiable");
    for (std::size_t i = 0; i < core.size(); ++i) {
        auto rest = core;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        c.expect(is_satisfiable(make_constraint_set(rest)), "core stays UNSAT without " + core[i].label);
    }
    return c.result("UNSAT, " + std::to_string(core.size()) + "-constraint core through " + to_string(gamma_r) +
                    ", subset-minimal");
}

Outcome criterion_4() {
    auto start = std::chrono::steady_clock::now();
    Checker c;
    auto enc = collect_constraints(load_fixture("enc.xml"));
    c.expect(brute_force_lexmin(enc) == std::get<Assignment>(solve_lexmin(enc)), "enc fixture differs");
    auto dh = collect_constraints(load_fixture("dh.xml"));
    c.expect(component_lexmin(dh) == std::get<Assignment>(solve_lexmin(dh)), "DH fixture differs");
    std::size_t sat = 0;
    std::size_t unsat = 0;
    for (std::size_t i = 0; i < random_count; ++i) {
        auto seed = random_seed_base + i;
        auto cs = collect_constraints(parse_model(random_model_xml(seed)));
        auto tag = "seed " + std::to_string(seed);
        c.expect(cs.atoms.size() <= brute_force_atom_limit, tag + ": too many atoms");
        c.expect(cs.atoms.size() <= 24 && parse_model(random_model_xml(seed)).network.instances().size() <= 12,
                 tag + ": exceeds size bounds");
        auto oracle = brute_force_lexmin(cs);
        auto got = solve_lexmin(cs);
        if (oracle) {
            ++sat;
            c.expect(std::holds_alternative<Assignment>(got) && std::get<Assignment>(got) == *oracle,
                     tag + ": assignment differs");
        } else {
            ++unsat;
            c.expect(std::holds_alternative<Conflict>(got), tag + ": verdict differs");
        }
    }
    auto elapsed = seconds_since(start);
    c.expect(elapsed < 60.0, "took " + fmt_seconds(elapsed));
    return c.result("2 fixtures + " + std::to_string(random_count) + " random networks (" + std::to_string(sat) +
                    " SAT, " + std::to_string(unsat) + " UNSAT) agree in " + fmt_seconds(elapsed));
}

Outcome criterion_5_and_6(bool safety_only, std::string& summary_out) {
    Checker c;
    std::size_t checked = 0;
    if (!safety_only) {
        auto doc = load_fixture("dh.xml");
        const auto& net = doc.network;
        auto asg = solve_fixture(doc);
        auto basic = merge_basic(net, asg);
        auto with_const = merge_const(net, asg, basic);
        auto branch = merge_branch(net, asg, with_const);
        auto singleton_consts = [&](const DomainSet& ds) {
            return std::count_if(ds.begin(), ds.end(), [&](const Domain& d) {
                return d.members.size() == 1 && net.at(d.members[0]).kind == "const";
            });
        };
        c.expect(singleton_consts(basic) >= 1, "merge_basic leaves no singleton const domain");
        c.expect(singleton_consts(with_const) == 0, "merge_const leaves a singleton const domain");
        c.expect(branch.size() < with_const.size(), "merge_branch does not reduce the domain count");
        summary_out = "DH domains none/basic/const/branch = " + std::to_string(merge_none(net, asg).size()) + "/" +
                      std::to_string(basic.size()) + "/" + std::to_string(with_const.size()) + "/" +
                      std::to_string(branch.size());
    }
    for (std::size_t i = 0; i < random_count; ++i) {
        auto seed = random_seed_base + i;
        auto doc = parse_model(random_model_xml(seed));
        auto result = solve_lexmin(collect_constraints(doc));
        if (auto* asg = std::get_if<Assignment>(&result)) {
            ++checked;
            check_strategies(c, doc.network, *asg, "seed " + std::to_string(seed));
        }
    }
    summary_out += (summary_out.empty() ? "" : "; ") + std::string("all strategies on ") + std::to_string(checked) +
                   " satisfiable random networks";
    return c.result(summary_out);
}

Outcome criterion_7() {
    auto start = std::chrono::steady_clock::now();
    Checker c;
    auto dh = load_fixture("dh_two_party.xml");
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto r = run_network(dh, {.seed = seed});
        c.expect(r.ok(), "seed " + std::to_string(seed) + ": run failed");
        const auto& a = r.env_received["Keystore_a.data"];
        const auto& b = r.env_received["Keystore_b.data"];
        c.expect(!a.empty() && a == b, "seed " + std::to_string(seed) + ": secrets differ");
        auto again = run_network(dh, {.seed = seed});
        c.expect(format_trace(again.trace) == format_trace(r.trace), "seed " + std::to_string(seed) + ": trace differs");
    }
    auto enc = bind_instance(PrimitiveRegistry::builtin().make_spec("enc_ctr"), "enc");
    auto dec = bind_instance(PrimitiveRegistry::builtin().make_spec("dec_ctr"), "dec");
    SplitMix64 data(42);
    SplitMix64 unused(0);
    Bytes key = data.bytes(16);
    Bytes ctr = data.bytes(8);
    for (std::size_t n = 0; n <= 1024; ++n) {
        auto plain = data.bytes(n);
        auto cipher = evaluate_primitive(enc, {plain, key, ctr}, unused)[0];
        c.expect(evaluate_primitive(dec, {cipher, key, ctr}, unused)[0] == plain,
                 "round trip fails at length " + std::to_string(n));
    }
    auto rt = load_fixture("enc_roundtrip.xml");
    c.expect(format_trace(run_network(rt).trace) == format_trace(run_network(rt).trace), "enc trace differs");
    auto elapsed = seconds_since(start);
    c.expect(elapsed < 10.0, "took " + fmt_seconds(elapsed));
    return c.result("10 seeds equal secrets, 1025 round trips, stable traces in " + fmt_seconds(elapsed));
}

Outcome criterion_8() {
    Checker c;
    auto sized = satisfiable_sized_model(1, 186, 285);
    const auto& doc = sized.doc;
    c.expect(doc.network.instances().size() == 186, "instance count");
    c.expect(doc.network.channels().size() == 285, "channel count");

    auto start = std::chrono::steady_clock::now();
    auto cs = collect_constraints(doc);
    auto result = solve_lexmin(cs);
    if (!std::holds_alternative<Assignment>(result)) {
        c.expect(false, "generated model is unsatisfiable");
        return c.result("");
    }
    const auto& asg = std::get<Assignment>(result);
    auto weights = default_weights();
    auto domains = partition(doc.network, asg, Strategy::branch);
    auto annotated = serialize_annotated(doc, asg, domains);
    auto policy = communication_policy(doc.network, domains, asg);
    auto part = metrics(doc.network, domains, asg, weights);
    auto table = metrics_table(metrics(doc.network, monolithic(doc.network), asg, weights),
                               metrics(doc.network, merge_none(doc.network, asg), asg, weights), part, "branch");
    auto dot = render_dot(doc.network, {.assignment = &asg, .domains = &domains});
    auto elapsed = seconds_since(start);
    c.expect(!annotated.empty() && !table.empty() && !dot.empty(), "empty pipeline output");
    c.expect(elapsed < 30.0, "pipeline took " + fmt_seconds(elapsed));
    check_strategies(c, doc.network, asg, "sized seed " + std::to_string(sized.seed));
    return c.result("seed " + std::to_string(sized.seed) + ", " + std::to_string(cs.atoms.size()) + " atoms, " +
                    std::to_string(domains.size()) + " domains, " + std::to_string(policy.size()) +
                    " policy entries; pipeline " + fmt_seconds(elapsed) +
                    " (synthetic 186-instance, 285-channel model)");
}

}  // namespace

int main() {
    std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, criterion_1},
        {2, criterion_2},
        {3, criterion_3},
        {4, criterion_4},
        {5, [] { std::string s; return criterion_5_and_6(false, s); }},
        {6, [] { std::string s; return criterion_5_and_6(true, s); }},
        {7, criterion_7},
        {8, criterion_8},
    };
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
