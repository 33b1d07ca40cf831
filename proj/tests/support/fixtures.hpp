// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <string>

#include "protopart/analysis.hpp"

namespace protopart::testing {

inline std::string fixture_path(const std::string& name) { return std::string(PROTOPART_FIXTURE_DIR) + "/" + name; }

inline ModelDocument load_fixture(const std::string& name) { return load_model(fixture_path(name)); }

/// Solves and unwraps; throws if the model is unsatisfiable.
inline Assignment solve_fixture(const ModelDocument& doc) {
    auto result = solve_lexmin(collect_constraints(doc));
    if (!std::holds_alternative<Assignment>(result)) {
        throw std::runtime_error("fixture is unsatisfiable");
    }
    return std::get<Assignment>(result);
}

inline bool conf_of(const Assignment& asg, const std::string& inst, const std::string& port) {
    return asg.at(conf_atom(inst, port));
}

inline bool intg_of(const Assignment& asg, const std::string& inst, const std::string& port) {
    return asg.at(intg_atom(inst, port));
}

}  // namespace protopart::testing
