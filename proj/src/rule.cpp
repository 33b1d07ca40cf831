// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/rule.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace protopart {

std::string_view to_string(GuaranteeKind kind) { return kind == GuaranteeKind::conf ? "conf" : "intg"; }

std::string GuaranteeAtom::port_name() const { return instance.empty() ? port : instance + "." + port; }

GuaranteeAtom conf_atom(std::string instance, std::string port) {
    return {std::move(instance), std::move(port), GuaranteeKind::conf};
}

GuaranteeAtom intg_atom(std::string instance, std::string port) {
    return {std::move(instance), std::move(port), GuaranteeKind::intg};
}

struct RuleExpr::Node {
    Op op = Op::constant;
    bool value = true;
    GuaranteeAtom atom;
    std::vector<RuleExpr> args;
};

RuleExpr::RuleExpr() : RuleExpr(constant(true)) {}

RuleExpr::RuleExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

RuleExpr RuleExpr::constant(bool value) {
    static const auto t = std::make_shared<const Node>(Node{Op::constant, true, {}, {}});
    static const auto f = std::make_shared<const Node>(Node{Op::constant, false, {}, {}});
    return RuleExpr(value ? t : f);
}

RuleExpr RuleExpr::atom(GuaranteeAtom a) {
    return RuleExpr(std::make_shared<const Node>(Node{Op::atom, false, std::move(a), {}}));
}

RuleExpr RuleExpr::negate(RuleExpr e) {
    return RuleExpr(std::make_shared<const Node>(Node{Op::negation, false, {}, {std::move(e)}}));
}

namespace {

std::vector<RuleExpr> flatten(RuleExpr::Op op, std::vector<RuleExpr> args) {
    std::vector<RuleExpr> out;
    out.reserve(args.size());
    for (auto& a : args) {
        if (a.op() == op) {
            out.insert(out.end(), a.args().begin(), a.args().end());
        } else {
            out.push_back(std::move(a));
        }
    }
    return out;
}

}  // namespace

RuleExpr RuleExpr::all_of(std::vector<RuleExpr> args) {
    args = flatten(Op::conjunction, std::move(args));
    if (args.empty()) {
        return constant(true);
    }
    if (args.size() == 1) {
        return args.front();
    }
    return RuleExpr(std::make_shared<const Node>(Node{Op::conjunction, false, {}, std::move(args)}));
}

RuleExpr RuleExpr::any_of(std::vector<RuleExpr> args) {
    args = flatten(Op::disjunction, std::move(args));
    if (args.empty()) {
        return constant(false);
    }
    if (args.size() == 1) {
        return args.front();
    }
    return RuleExpr(std::make_shared<const Node>(Node{Op::disjunction, false, {}, std::move(args)}));
}

RuleExpr RuleExpr::implies(RuleExpr lhs, RuleExpr rhs) {
    return RuleExpr(std::make_shared<const Node>(Node{Op::implication, false, {}, {std::move(lhs), std::move(rhs)}}));
}

RuleExpr RuleExpr::iff(RuleExpr lhs, RuleExpr rhs) {
    return RuleExpr(std::make_shared<const Node>(Node{Op::equivalence, false, {}, {std::move(lhs), std::move(rhs)}}));
}

RuleExpr::Op RuleExpr::op() const { return node_->op; }
bool RuleExpr::value() const { return node_->value; }
const GuaranteeAtom& RuleExpr::atom_ref() const { return node_->atom; }
const std::vector<RuleExpr>& RuleExpr::args() const { return node_->args; }

bool RuleExpr::operator==(const RuleExpr& other) const {
    if (node_ == other.node_) {
        return true;
    }
    if (op() != other.op()) {
        return false;
    }
    switch (op()) {
    case Op::constant: return value() == other.value();
    case Op::atom: return atom_ref() == other.atom_ref();
    default: return args() == other.args();
    }
}

bool eval_rule(const RuleExpr& expr, const Assignment& asg) {
    using Op = RuleExpr::Op;
    switch (expr.op()) {
    case Op::constant: return expr.value();
    case Op::atom: {
        auto it = asg.find(expr.atom_ref());
        if (it == asg.end()) {
            throw RuleError("assignment has no value for " + std::string(to_string(expr.atom_ref().kind)) + "(" +
                            expr.atom_ref().port_name() + ")");
        }
        return it->second;
    }
    case Op::negation: return !eval_rule(expr.args()[0], asg);
    case Op::conjunction:
        return std::all_of(expr.args().begin(), expr.args().end(), [&](const auto& a) { return eval_rule(a, asg); });
    case Op::disjunction:
        return std::any_of(expr.args().begin(), expr.args().end(), [&](const auto& a) { return eval_rule(a, asg); });
    case Op::implication: return !eval_rule(expr.args()[0], asg) || eval_rule(expr.args()[1], asg);
    case Op::equivalence: return eval_rule(expr.args()[0], asg) == eval_rule(expr.args()[1], asg);
    }
    return false;
}

namespace {

void collect_atoms(const RuleExpr& expr, std::set<GuaranteeAtom>& out) {
    if (expr.op() == RuleExpr::Op::atom) {
        out.insert(expr.atom_ref());
        return;
    }
    for (const auto& a : expr.args()) {
        collect_atoms(a, out);
    }
}

RuleExpr rebuild(const RuleExpr& expr, std::vector<RuleExpr> args) {
    using Op = RuleExpr::Op;
    switch (expr.op()) {
    case Op::negation: return RuleExpr::negate(std::move(args[0]));
    case Op::conjunction: return RuleExpr::all_of(std::move(args));
    case Op::disjunction: return RuleExpr::any_of(std::move(args));
    case Op::implication: return RuleExpr::implies(std::move(args[0]), std::move(args[1]));
    case Op::equivalence: return RuleExpr::iff(std::move(args[0]), std::move(args[1]));
    default: return expr;
    }
}

}  // namespace

std::vector<GuaranteeAtom> free_atoms(const RuleExpr& expr) {
    std::set<GuaranteeAtom> atoms;
    collect_atoms(expr, atoms);
    return {atoms.begin(), atoms.end()};
}

RuleExpr bind_atoms(const RuleExpr& expr, const std::string& instance) {
    if (expr.op() == RuleExpr::Op::constant) {
        return expr;
    }
    if (expr.op() == RuleExpr::Op::atom) {
        if (!expr.atom_ref().is_local()) {
            return expr;
        }
        return RuleExpr::atom({instance, expr.atom_ref().port, expr.atom_ref().kind});
    }
    std::vector<RuleExpr> args;
    args.reserve(expr.args().size());
    for (const auto& a : expr.args()) {
        args.push_back(bind_atoms(a, instance));
    }
    return rebuild(expr, std::move(args));
}

namespace {

void print(const RuleExpr& expr, std::string& out, bool nested) {
    using Op = RuleExpr::Op;
    switch (expr.op()) {
    case Op::constant: out += expr.value() ? "true" : "false"; return;
    case Op::atom:
        out += to_string(expr.atom_ref().kind);
        out += '(';
        out += expr.atom_ref().port_name();
        out += ')';
        return;
    case Op::negation:
        out += '!';
        print(expr.args()[0], out, true);
        return;
    default: break;
    }
    std::string_view sep;
    switch (expr.op()) {
    case Op::conjunction: sep = " & "; break;
    case Op::disjunction: sep = " | "; break;
    case Op::implication: sep = " -> "; break;
    default: sep = " <-> "; break;
    }
    if (nested) {
        out += '(';
    }
    for (std::size_t i = 0; i < expr.args().size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        print(expr.args()[i], out, true);
    }
    if (nested) {
        out += ')';
    }
}

class RuleParser {
  public:
    explicit RuleParser(std::string_view text) : text_(text) {}

    RuleExpr parse() {
        auto e = parse_iff();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw RuleError("rule parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(std::string_view token) {
        skip_ws();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    RuleExpr parse_iff() {
        auto lhs = parse_implies();
        while (accept("<->")) {
            lhs = RuleExpr::iff(lhs, parse_implies());
        }
        return lhs;
    }

    RuleExpr parse_implies() {
        auto lhs = parse_or();
        if (accept("->")) {
            return RuleExpr::implies(lhs, parse_implies());
        }
        return lhs;
    }

    RuleExpr parse_or() {
        std::vector<RuleExpr> args{parse_and()};
        while (accept("|")) {
            args.push_back(parse_and());
        }
        return args.size() == 1 ? args.front() : RuleExpr::any_of(std::move(args));
    }

    RuleExpr parse_and() {
        std::vector<RuleExpr> args{parse_unary()};
        while (accept("&")) {
            args.push_back(parse_unary());
        }
        return args.size() == 1 ? args.front() : RuleExpr::all_of(std::move(args));
    }

    RuleExpr parse_unary() {
        if (accept("!")) {
            return RuleExpr::negate(parse_unary());
        }
        if (accept("(")) {
            auto e = parse_iff();
            if (!accept(")")) {
                fail("expected ')'");
            }
            return e;
        }
        if (accept("true")) {
            return RuleExpr::constant(true);
        }
        if (accept("false")) {
            return RuleExpr::constant(false);
        }
        for (auto kind : {GuaranteeKind::conf, GuaranteeKind::intg}) {
            if (accept(std::string(to_string(kind)) + "(")) {
                auto close = text_.find(')', pos_);
                if (close == std::string_view::npos) {
                    fail("unterminated port reference");
                }
                auto ref = text_.substr(pos_, close - pos_);
                while (!ref.empty() && ref.front() == ' ') {
                    ref.remove_prefix(1);
                }
                while (!ref.empty() && ref.back() == ' ') {
                    ref.remove_suffix(1);
                }
                pos_ = close + 1;
                return RuleExpr::atom(parse_ref(ref, kind));
            }
        }
        fail("expected conf(...), intg(...), true, false, '!' or '('");
    }

    GuaranteeAtom parse_ref(std::string_view ref, GuaranteeKind kind) const {
        GuaranteeAtom a;
        a.kind = kind;
        auto dot = ref.find('.');
        if (dot == std::string_view::npos) {
            a.port = std::string(ref);
        } else {
            a.instance = std::string(ref.substr(0, dot));
            a.port = std::string(ref.substr(dot + 1));
            if (!is_valid_identifier(a.instance)) {
                fail("invalid instance name '" + a.instance + "'");
            }
        }
        if (!is_valid_identifier(a.port)) {
            fail("invalid port name '" + a.port + "'");
        }
        return a;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const RuleExpr& expr) {
    std::string out;
    print(expr, out, false);
    return out;
}

RuleExpr parse_rule(std::string_view text) { return RuleParser(text).parse(); }

bool is_valid_identifier(std::string_view name) {
    if (name.empty() || name.front() == ' ' || name.back() == ' ') {
        return false;
    }
    return std::all_of(name.begin(), name.end(), [](char c) {
        return c >= 0x20 && c <= 0x7e && c != '.' && c != '(' && c != ')' && c != '<' && c != '>' && c != '&' &&
               c != '"' && c != '\'';
    });
}

}  // namespace protopart
