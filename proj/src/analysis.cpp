// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/analysis.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "protopart/registry.hpp"
#include "protopart/sat.hpp"

namespace protopart {

namespace {

/// Structure-preserving CNF encoding of rule expressions.
class Encoder {
  public:
    explicit Encoder(sat::Solver& solver) : solver_(solver) {
        auto t = solver_.new_var();
        true_ = sat::Lit::pos(t);
        solver_.add_clause({true_});
    }

    void declare(const GuaranteeAtom& atom) {
        if (!atoms_.contains(atom)) {
            atoms_.emplace(atom, solver_.new_var());
        }
    }

    [[nodiscard]] sat::Var var_of(const GuaranteeAtom& atom) const { return atoms_.at(atom); }

    sat::Lit encode(const RuleExpr& e) {
        using Op = RuleExpr::Op;
        switch (e.op()) {
        case Op::constant: return e.value() ? true_ : ~true_;
        case Op::atom: declare(e.atom_ref()); return sat::Lit::pos(atoms_.at(e.atom_ref()));
        case Op::negation: return ~encode(e.args()[0]);
        case Op::conjunction:
        case Op::disjunction: {
            std::vector<sat::Lit> args;
            for (const auto& a : e.args()) {
                args.push_back(encode(a));
            }
            return e.op() == Op::conjunction ? gate_and(args) : ~gate_and(negated(args));
        }
        case Op::implication: {
            auto lhs = encode(e.args()[0]);
            auto rhs = encode(e.args()[1]);
            return ~gate_and({lhs, ~rhs});
        }
        case Op::equivalence: {
            auto a = encode(e.args()[0]);
            auto b = encode(e.args()[1]);
            auto v = sat::Lit::pos(solver_.new_var());
            solver_.add_clause({~v, ~a, b});
            solver_.add_clause({~v, a, ~b});
            solver_.add_clause({v, a, b});
            solver_.add_clause({v, ~a, ~b});
            return v;
        }
        }
        return true_;
    }

  private:
    static std::vector<sat::Lit> negated(std::vector<sat::Lit> lits) {
        for (auto& l : lits) {
            l = ~l;
        }
        return lits;
    }

    sat::Lit gate_and(const std::vector<sat::Lit>& args) {
        auto v = sat::Lit::pos(solver_.new_var());
        std::vector<sat::Lit> big{v};
        for (auto a : args) {
            solver_.add_clause({~v, a});
            big.push_back(~a);
        }
        solver_.add_clause(std::move(big));
        return v;
    }

    sat::Solver& solver_;
    sat::Lit true_;
    std::map<GuaranteeAtom, sat::Var> atoms_;
};

void sort_constraints(std::vector<LabeledConstraint>& cs) {
    std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    for (std::size_t i = 1; i < cs.size(); ++i) {
        if (cs[i].label == cs[i - 1].label) {
            throw AnalysisError("duplicate constraint label '" + cs[i].label + "'");
        }
    }
}

std::string channel_label(const Channel& ch) {
    return "channel:" + ch.src + "." + ch.out_port + "->" + ch.dst + "." + ch.in_port;
}

Conflict touched_by(const ConstraintSet& cs, std::vector<std::size_t> core) {
    Conflict c;
    for (auto i : core) {
        const auto& k = cs.constraints[i];
        c.core.push_back(k.label);
        if (!k.instance.empty()) {
            c.instances.insert(k.instance);
        }
        if (k.channel) {
            c.channels.insert(*k.channel);
        }
        for (const auto& a : free_atoms(k.expr)) {
            c.instances.insert(a.instance);
        }
    }
    std::sort(c.core.begin(), c.core.end());
    return c;
}

}  // namespace

ConstraintSet collect_constraints(const ModelDocument& doc) {
    const auto& net = doc.network;
    std::string errors;
    for (const auto& issue : validate_network(net)) {
        if (!issue.warning) {
            errors += "\n  " + issue.instance + ": " + issue.message;
        }
    }
    if (!errors.empty()) {
        throw ModelError("network '" + net.name() + "' is structurally invalid:" + errors);
    }

    ConstraintSet cs;
    cs.atoms = net.atoms();
    for (const auto& inst : net.instances()) {
        for (const auto& a : free_atoms(inst.bound_rule)) {
            const auto* owner = net.find(a.instance);
            if (owner == nullptr || !owner->direction_of(a.port)) {
                throw ModelError("rule of '" + inst.name + "' references unknown port '" + a.port_name() + "'");
            }
        }
        cs.constraints.push_back({"rule:" + inst.name, inst.bound_rule, ConstraintOrigin::instance_rule, inst.name, {}});
    }
    for (const auto& ch : net.channels()) {
        cs.constraints.push_back({channel_label(ch), channel_rule(net, ch), ConstraintOrigin::channel_rule, {}, ch});
    }
    for (const auto& env : doc.env_assumptions) {
        const auto& inst = net.at(env.instance);
        for (const auto& atom : inst.atoms()) {
            bool value = atom.kind == GuaranteeKind::conf ? env.conf : env.intg;
            cs.constraints.push_back({"env:" + atom.port_name() + ":" + std::string(to_string(atom.kind)),
                                      env_assumption_rule(atom, value), ConstraintOrigin::env_assumption,
                                      env.instance,
                                      {}});
        }
    }
    sort_constraints(cs.constraints);
    return cs;
}

ConstraintSet make_constraint_set(std::vector<LabeledConstraint> constraints,
                                  const std::vector<GuaranteeAtom>& extra_atoms) {
    ConstraintSet cs;
    std::set<GuaranteeAtom> atoms(extra_atoms.begin(), extra_atoms.end());
    for (const auto& c : constraints) {
        for (const auto& a : free_atoms(c.expr)) {
            atoms.insert(a);
        }
    }
    cs.atoms.assign(atoms.begin(), atoms.end());
    cs.constraints = std::move(constraints);
    sort_constraints(cs.constraints);
    return cs;
}

SolveResult solve_lexmin(const ConstraintSet& cs) {
    sat::Solver solver;
    Encoder enc(solver);
    for (const auto& a : cs.atoms) {
        enc.declare(a);
    }
    bool ok = true;
    for (const auto& c : cs.constraints) {
        ok = solver.add_clause({enc.encode(c.expr)}) && ok;
    }
    if (!ok || !solver.solve()) {
        return extract_conflict(cs);
    }

    // Greedy in atom order. `model` always satisfies the constraints and every
    // fix made so far, so an atom it already has false needs no solver call.
    std::vector<bool> model;
    auto capture = [&] {
        model.clear();
        for (const auto& a : cs.atoms) {
            model.push_back(solver.value(enc.var_of(a)));
        }
    };
    capture();
    Assignment result;
    for (std::size_t i = 0; i < cs.atoms.size(); ++i) {
        auto v = enc.var_of(cs.atoms[i]);
        bool value = model[i];
        if (value) {
            std::vector<sat::Lit> try_false{sat::Lit::neg(v)};
            if (solver.solve(try_false)) {
                capture();
                value = false;
            }
        }
        solver.add_clause({value ? sat::Lit::pos(v) : sat::Lit::neg(v)});
        result.emplace(cs.atoms[i], value);
    }

    for (const auto& c : cs.constraints) {
        if (!eval_rule(c.expr, result)) {
            throw std::logic_error("solver produced an assignment violating '" + c.label + "'");
        }
    }
    return result;
}

namespace {

struct SelectorSolver {
    sat::Solver solver;
    std::vector<sat::Var> selectors;

    explicit SelectorSolver(const ConstraintSet& cs) {
        Encoder enc(solver);
        for (const auto& a : cs.atoms) {
            enc.declare(a);
        }
        for (const auto& c : cs.constraints) {
            auto root = enc.encode(c.expr);
            auto sel = solver.new_var();
            selectors.push_back(sel);
            solver.add_clause({sat::Lit::neg(sel), root});
        }
    }

    bool satisfiable(const std::vector<std::size_t>& active) {
        std::vector<sat::Lit> assume;
        for (auto i : active) {
            assume.push_back(sat::Lit::pos(selectors[i]));
        }
        return solver.solve(assume);
    }
};

}  // namespace

bool is_satisfiable(const ConstraintSet& cs) {
    SelectorSolver s(cs);
    std::vector<std::size_t> all(cs.constraints.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    return s.satisfiable(all);
}

Conflict extract_conflict(const ConstraintSet& cs) {
    SelectorSolver s(cs);
    std::vector<std::size_t> core(cs.constraints.size());
    for (std::size_t i = 0; i < core.size(); ++i) {
        core[i] = i;  // constraints are sorted by label
    }
    if (s.satisfiable(core)) {
        throw AnalysisError("constraint set is satisfiable; there is no conflict to extract");
    }
    for (std::size_t pos = 0; pos < core.size();) {
        auto trial = core;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(pos));
        if (!s.satisfiable(trial)) {
            core = std::move(trial);
        } else {
            ++pos;
        }
    }
    return touched_by(cs, std::move(core));
}

std::string core_listing(const ConstraintSet& cs, const Conflict& conflict) {
    std::map<std::string, const LabeledConstraint*> by_label;
    for (const auto& c : cs.constraints) {
        by_label[c.label] = &c;
    }
    std::ostringstream out;
    out << "UNSAT: " << conflict.core.size() << " constraint(s) in minimal core\n";
    for (const auto& label : conflict.core) {
        auto it = by_label.find(label);
        out << "  " << label << ": " << (it == by_label.end() ? "?" : to_string(it->second->expr)) << "\n";
    }
    return out.str();
}

std::string annotate_conflict(const ModelDocument& doc, const Conflict& conflict) {
    auto cs = collect_constraints(doc);
    ConstraintSet core;
    core.atoms = cs.atoms;
    for (const auto& c : cs.constraints) {
        if (std::binary_search(conflict.core.begin(), conflict.core.end(), c.label)) {
            core.constraints.push_back(c);
        }
    }
    if (core.constraints.size() != conflict.core.size()) {
        throw AnalysisError("conflict core names constraints that are not in the model");
    }
    if (is_satisfiable(core)) {
        throw AnalysisError("conflict core is satisfiable; the model has no conflict to annotate");
    }
    Annotations notes;
    notes.conflict_instances = conflict.instances;
    notes.conflict_channels = conflict.channels;
    return serialize_annotated(doc, notes);
}

std::string dump_assignment(const Assignment& asg) {
    std::ostringstream out;
    for (const auto& [atom, value] : asg) {
        out << to_string(atom.kind) << "(" << atom.port_name() << ") = " << (value ? "true" : "false") << "\n";
    }
    return out.str();
}

}  // namespace protopart
