// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protopart/crypto.hpp"
#include "protopart/model_io.hpp"

namespace protopart {

class ExecutionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Message {
    Bytes payload;
};

enum class TraceDirection { in, out };

struct TraceEntry {
    std::uint64_t step = 0;
    std::string instance;
    std::string port;
    TraceDirection direction = TraceDirection::in;
    std::string digest;  // first 8 hex digits of SHA-256(payload)

    bool operator==(const TraceEntry&) const = default;
};

using ExecutionTrace = std::vector<TraceEntry>;

/// "<step> <instance>.<port> <in|out> <hex-digest8>" per line.
std::string format_trace(const ExecutionTrace& trace);

enum class EnvMode { fixture, console, file, tcp_server, tcp_client };

/// How an env instance talks to the outside world. Parameters come from the
/// instance's <config> attributes:
///   fixture:  out.<port>=PAYLOAD, expect.<port>=PAYLOAD, same_as.<port>=INST.PORT
///   console:  outputs read one line each from the console input
///   file:     read.<port>=PATH, write.<port>=PATH
///   server:   port=N [timeout_ms=N] [frames=N]
///   client:   host=H port=N [timeout_ms=N] [frames=N]
struct EnvBinding {
    EnvMode mode = EnvMode::fixture;
    std::map<std::string, std::string> params;
};

/// Binding from a <config> attribute map (mode = fixture|console|file|server|client).
/// Throws ExecutionError when mode is missing or unknown.
EnvBinding binding_from_config(const std::map<std::string, std::string>& config);

/// TCP binding with validated port. Throws ExecutionError.
EnvBinding tcp_binding(const std::map<std::string, std::string>& config);

/// PAYLOAD syntax: "hex:00ff", "text:abc", "int:42", or bare decimal digits
/// (big-endian integer). Anything else is taken as text.
Bytes parse_payload(std::string_view spec);

/// Evaluates one firing. Inputs and outputs follow the instance's port
/// declaration order. `rng` is the instance's random stream.
std::vector<Bytes> evaluate_primitive(const Instance& inst, const std::vector<Bytes>& inputs, SplitMix64& rng);

struct RunOptions {
    std::uint64_t seed = 0;
    std::size_t max_steps = 100000;
    /// Per-env overrides of the model's <config>.
    std::map<std::string, EnvBinding> bindings;
    std::istream* console_in = nullptr;
    std::ostream* console_out = nullptr;
};

struct RunResult {
    ExecutionTrace trace;
    /// Payloads delivered to env input ports, keyed "<instance>.<port>".
    std::map<std::string, std::vector<Bytes>> env_received;
    /// Fixture expectations that did not hold.
    std::vector<std::string> mismatches;
    std::size_t steps = 0;
    bool budget_exhausted = false;

    [[nodiscard]] bool ok() const { return mismatches.empty() && !budget_exhausted; }
};

/// Deterministic single-threaded dataflow run. An instance fires once all
/// its input ports hold a message; env instances fire on any delivery and
/// once at start to inject their outputs. Ready instances run FIFO; those
/// made ready by the same firing are queued by name.
RunResult run_network(const ModelDocument& doc, const RunOptions& options = {});

}  // namespace protopart
