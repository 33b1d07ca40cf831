// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace protopart {

enum class GuaranteeKind { conf, intg };

std::string_view to_string(GuaranteeKind kind);

/// A confidentiality or integrity guarantee on one port.
///
/// Atoms inside a rule template are local: `instance` is empty and `port`
/// names a port of the primitive. Bound atoms carry the owning instance.
/// Ordering is (instance, port, kind) with conf < intg; this is the order
/// used by the lexicographic solver.
struct GuaranteeAtom {
    std::string instance;
    std::string port;
    GuaranteeKind kind = GuaranteeKind::conf;

    [[nodiscard]] bool is_local() const { return instance.empty(); }
    /// "<instance>.<port>" or just "<port>" for local atoms.
    [[nodiscard]] std::string port_name() const;

    auto operator<=>(const GuaranteeAtom&) const = default;
    bool operator==(const GuaranteeAtom&) const = default;
};

GuaranteeAtom conf_atom(std::string instance, std::string port);
GuaranteeAtom intg_atom(std::string instance, std::string port);

/// Total map from atoms to booleans.
using Assignment = std::map<GuaranteeAtom, bool>;

class RuleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Immutable boolean expression over guarantee atoms.
///
/// And/Or are n-ary; nested And (resp. Or) children are flattened on
/// construction, preserving child order. Copies share structure.
class RuleExpr {
  public:
    enum class Op { constant, atom, negation, conjunction, disjunction, implication, equivalence };

    RuleExpr();  // true

    static RuleExpr constant(bool value);
    static RuleExpr atom(GuaranteeAtom a);
    static RuleExpr negate(RuleExpr e);
    static RuleExpr all_of(std::vector<RuleExpr> args);
    static RuleExpr any_of(std::vector<RuleExpr> args);
    static RuleExpr implies(RuleExpr lhs, RuleExpr rhs);
    static RuleExpr iff(RuleExpr lhs, RuleExpr rhs);

    [[nodiscard]] Op op() const;
    [[nodiscard]] bool value() const;                  // constant only
    [[nodiscard]] const GuaranteeAtom& atom_ref() const;  // atom only
    [[nodiscard]] const std::vector<RuleExpr>& args() const;

    [[nodiscard]] bool is_true() const { return op() == Op::constant && value(); }

    bool operator==(const RuleExpr& other) const;

  private:
    struct Node;
    explicit RuleExpr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Standard boolean semantics; Implies is material implication.
/// Throws RuleError if an atom is missing from the assignment.
bool eval_rule(const RuleExpr& expr, const Assignment& asg);

/// Sorted, duplicate-free.
std::vector<GuaranteeAtom> free_atoms(const RuleExpr& expr);

/// Replaces every local atom `p` with `<instance>.<p>`. Bound atoms are left
/// untouched.
RuleExpr bind_atoms(const RuleExpr& expr, const std::string& instance);

/// Pretty-printer used in reports and in the model format:
/// conf(<port>), intg(<port>), true, false, !, &, |, ->, <->, parentheses.
/// Binary operators are parenthesized whenever nested, so the output
/// re-parses to an equal expression.
std::string to_string(const RuleExpr& expr);

/// Inverse of to_string. Precedence from tightest: !, &, |, ->, <->;
/// -> associates to the right. Port references may be local ("Key") or
/// bound ("enc.Key").
RuleExpr parse_rule(std::string_view text);

/// Identifier check for instance and port names: printable ASCII, no '.',
/// no parentheses or XML-special characters, no leading/trailing space.
bool is_valid_identifier(std::string_view name);

}  // namespace protopart
