// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <string>
#include <vector>

#include "protopart/model.hpp"
#include "protopart/rule.hpp"

namespace protopart {

/// Registry entry for a primitive kind.
///
/// Fixed kinds declare their ports here. Variadic kinds (env, transform) take
/// their ports from the model; for those `inputs`/`outputs`/`expr` show the
/// single-input, single-output shape ("in" -> "out").
struct RuleTemplate {
    std::string kind;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    RuleExpr expr;
    bool variadic = false;
    /// Why the rule is what it is; shown by `protopart kinds`.
    std::string rationale;
};

class PrimitiveRegistry {
  public:
    /// Registry with every built-in kind.
    static const PrimitiveRegistry& builtin();

    [[nodiscard]] bool contains(const std::string& kind) const { return templates_.contains(kind); }
    /// Throws ModelError for unknown kinds.
    [[nodiscard]] const RuleTemplate& template_for(const std::string& kind) const;
    [[nodiscard]] std::vector<std::string> kinds() const;

    /// Spec for a registered kind. Fixed kinds ignore the port arguments;
    /// variadic kinds derive their rule from them.
    [[nodiscard]] PrimitiveSpec make_spec(const std::string& kind, const std::vector<std::string>& inputs = {},
                                          const std::vector<std::string>& outputs = {}) const;

  private:
    PrimitiveRegistry();
    std::map<std::string, RuleTemplate> templates_;
};

const RuleTemplate& template_for(const std::string& kind);

/// Binds a template to an instance name; identical to bind_instance's
/// substitution.
RuleExpr instantiate_rule(const RuleTemplate& tmpl, const std::string& instance_name);

/// intg(src.out) <-> intg(dst.in) & conf(src.out) <-> conf(dst.in)
RuleExpr channel_rule(const Channel& ch);
/// Channel rule with endpoint checks against the network.
RuleExpr channel_rule(const Network& net, const Channel& ch);

/// Transform over-approximation: any confidential input makes every output
/// confidential; integrity on any output requires integrity on every input.
RuleExpr transform_rule(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs);

/// Environment assumption for a single atom: atom (or !atom).
RuleExpr env_assumption_rule(const GuaranteeAtom& atom, bool value);

}  // namespace protopart
