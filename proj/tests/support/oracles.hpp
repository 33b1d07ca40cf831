// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <optional>

#include "protopart/analysis.hpp"

namespace protopart::testing {

inline constexpr std::size_t brute_force_atom_limit = 24;

/// Lexicographically smallest satisfying assignment found by exhaustive
/// search in lex order (false before true), or nullopt if none exists.
/// Partial assignments are pruned as soon as a constraint is already false.
/// Does not use the SAT solver. Throws std::invalid_argument above the limit.
std::optional<Assignment> brute_force_lexmin(const ConstraintSet& cs);

/// Lex-min for sets too large for brute_force_lexmin. Top-level conjunctions
/// are split, atoms joined by a plain `a <-> b` part are merged into one
/// class, and the remaining parts are grouped into independent components,
/// each solved with brute_force_lexmin. Throws std::invalid_argument when a
/// component is still above the limit.
std::optional<Assignment> component_lexmin(const ConstraintSet& cs);

/// Three-valued evaluation: nullopt when the value depends on unassigned atoms.
std::optional<bool> eval_partial(const RuleExpr& expr, const std::map<GuaranteeAtom, bool>& partial);

}  // namespace protopart::testing
