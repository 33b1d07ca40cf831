// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "protopart/model_io.hpp"

namespace protopart {

struct Violation {
    Channel channel;
    std::optional<bool> expected_conf;
    std::optional<bool> expected_intg;
    bool actual_conf = false;
    bool actual_intg = false;
    std::string message;
};

/// Compares each assertion with the solved guarantees of its channel's source
/// port. Never touches the assignment. Sorted by channel. Throws ModelError
/// for assertions on channels that do not exist.
std::vector<Violation> check_assertions(const ModelDocument& doc, const Assignment& asg);

/// "ASSERT FAIL <src>.<port> -> <dst>.<port>: expected conf=..., got conf=... — <message>"
std::string format_violation(const Violation& v);

}  // namespace protopart
