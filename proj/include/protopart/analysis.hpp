// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "protopart/model.hpp"
#include "protopart/model_io.hpp"
#include "protopart/rule.hpp"

namespace protopart {

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ConstraintOrigin { instance_rule, channel_rule, env_assumption };

struct LabeledConstraint {
    /// "rule:<inst>", "channel:<src>.<out>-><dst>.<in>" or
    /// "env:<inst>.<port>:<conf|intg>".
    std::string label;
    RuleExpr expr;
    ConstraintOrigin origin = ConstraintOrigin::instance_rule;
    std::string instance;            // rule and env origins
    std::optional<Channel> channel;  // channel origin
};

struct ConstraintSet {
    std::vector<LabeledConstraint> constraints;  // sorted by label
    /// Every atom the solution must assign, sorted. For a network this is all
    /// port atoms, constrained or not.
    std::vector<GuaranteeAtom> atoms;
};

struct Conflict {
    std::vector<std::string> core;  // labels, sorted
    std::set<std::string> instances;
    std::set<Channel> channels;
};

using SolveResult = std::variant<Assignment, Conflict>;

/// One constraint per instance rule, per channel, and per env port atom.
/// Throws ModelError if the network has structural errors.
ConstraintSet collect_constraints(const ModelDocument& doc);

/// Builds a set from loose constraints; atoms are the union of free atoms
/// plus `extra_atoms`. Labels must be unique.
ConstraintSet make_constraint_set(std::vector<LabeledConstraint> constraints,
                                  const std::vector<GuaranteeAtom>& extra_atoms = {});

/// Lexicographically minimal satisfying assignment (atoms in ConstraintSet
/// order, false < true), or the minimized conflict if unsatisfiable.
SolveResult solve_lexmin(const ConstraintSet& cs);

bool is_satisfiable(const ConstraintSet& cs);

/// Subset-minimal unsatisfiable core by deletion in label order. Throws
/// AnalysisError if the set is satisfiable.
Conflict extract_conflict(const ConstraintSet& cs);

/// Conflict core, one constraint per line: "<label>: <rule>".
std::string core_listing(const ConstraintSet& cs, const Conflict& conflict);

/// Serialized model with conflict="true" on every touched instance and flow.
/// Throws AnalysisError if the core is satisfiable.
std::string annotate_conflict(const ModelDocument& doc, const Conflict& conflict);

/// One line per atom, sorted: "conf(<instance>.<port>) = true|false".
std::string dump_assignment(const Assignment& asg);

}  // namespace protopart
