// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/executor.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "protopart/tcp.hpp"

namespace protopart {

std::string format_trace(const ExecutionTrace& trace) {
    std::ostringstream out;
    for (const auto& e : trace) {
        out << e.step << " " << e.instance << "." << e.port << " " << (e.direction == TraceDirection::in ? "in" : "out")
            << " " << e.digest << "\n";
    }
    return out.str();
}

namespace {

std::string param(const std::map<std::string, std::string>& params, const std::string& key,
                  const std::string& fallback = {}) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

long parse_long(const std::string& text, const std::string& what) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ExecutionError(what + ": expected an integer, got '" + text + "'");
    }
    return v;
}

}  // namespace

EnvBinding binding_from_config(const std::map<std::string, std::string>& config) {
    auto mode = param(config, "mode");
    if (mode.empty()) {
        throw ExecutionError("no <config mode=...> binding");
    }
    if (mode == "server" || mode == "client") {
        return tcp_binding(config);
    }
    EnvBinding b;
    b.params = config;
    if (mode == "fixture") {
        b.mode = EnvMode::fixture;
    } else if (mode == "console") {
        b.mode = EnvMode::console;
    } else if (mode == "file") {
        b.mode = EnvMode::file;
    } else {
        throw ExecutionError("unknown env mode '" + mode + "'");
    }
    return b;
}

EnvBinding tcp_binding(const std::map<std::string, std::string>& config) {
    EnvBinding b;
    b.params = config;
    auto mode = param(config, "mode");
    if (mode == "server") {
        b.mode = EnvMode::tcp_server;
    } else if (mode == "client") {
        b.mode = EnvMode::tcp_client;
        if (param(config, "host").empty()) {
            b.params["host"] = "127.0.0.1";
        }
    } else {
        throw ExecutionError("tcp binding needs mode=server or mode=client, got '" + mode + "'");
    }
    auto port = parse_long(param(config, "port"), "tcp port");
    if (port < 1 || port > 65535) {
        throw ExecutionError("tcp port out of range: " + std::to_string(port));
    }
    if (config.contains("timeout_ms")) {
        parse_long(config.at("timeout_ms"), "timeout_ms");
    }
    return b;
}

Bytes parse_payload(std::string_view spec) {
    try {
        if (spec.starts_with("hex:")) {
            return from_hex(spec.substr(4));
        }
        if (spec.starts_with("text:")) {
            return {spec.begin() + 5, spec.end()};
        }
        if (spec.starts_with("int:")) {
            return decimal_to_bytes(spec.substr(4));
        }
        if (!spec.empty() && std::all_of(spec.begin(), spec.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            return decimal_to_bytes(spec);
        }
    } catch (const std::invalid_argument& e) {
        throw ExecutionError("bad payload '" + std::string(spec) + "': " + e.what());
    }
    return {spec.begin(), spec.end()};
}

namespace {

[[noreturn]] void eval_fail(const Instance& inst, const std::string& what) {
    throw ExecutionError(inst.kind + " '" + inst.name + "': " + what);
}

std::vector<std::size_t> split_lengths(const Instance& inst) {
    std::vector<std::size_t> out;
    std::istringstream in(param(inst.config, "lengths"));
    std::string item;
    while (std::getline(in, item, ',')) {
        auto v = parse_long(item, "split lengths of '" + inst.name + "'");
        if (v < 0) {
            eval_fail(inst, "negative split length");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<Bytes> transform_eval(const Instance& inst, const std::vector<Bytes>& in) {
    const auto n_out = inst.outputs.size();
    auto op = param(inst.config, "op", in.size() == 1 ? "branch" : "concat");
    if (op == "branch") {
        if (in.size() != 1) {
            eval_fail(inst, "branch needs exactly one input");
        }
        return std::vector<Bytes>(n_out, in.front());
    }
    if (op == "concat" || op == "encode") {
        if (n_out != 1) {
            eval_fail(inst, op + " needs exactly one output");
        }
        Bytes out;
        for (const auto& part : in) {
            if (op == "encode") {
                auto n = static_cast<std::uint32_t>(part.size());
                Bytes header{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                          static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
                out.insert(out.end(), header.begin(), header.end());
            }
            out.insert(out.end(), part.begin(), part.end());
        }
        return {out};
    }
    if (in.size() != 1) {
        eval_fail(inst, op + " needs exactly one input");
    }
    const auto& payload = in.front();
    if (op == "split") {
        auto lengths = split_lengths(inst);
        if (n_out == 0 || lengths.size() != n_out - 1) {
            eval_fail(inst, "split over " + std::to_string(n_out) + " outputs needs " +
                                std::to_string(n_out == 0 ? 0 : n_out - 1) + " lengths");
        }
        std::vector<Bytes> out;
        std::size_t pos = 0;
        for (auto len : lengths) {
            if (pos + len > payload.size()) {
                eval_fail(inst, "split lengths exceed payload of " + std::to_string(payload.size()) + " bytes");
            }
            out.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                             payload.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
        }
        out.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(pos), payload.end());
        return out;
    }
    if (op == "decode") {
        std::vector<Bytes> out;
        std::size_t pos = 0;
        while (pos < payload.size()) {
            if (pos + 4 > payload.size()) {
                eval_fail(inst, "truncated length prefix");
            }
            std::size_t len = (std::size_t{payload[pos]} << 24) | (std::size_t{payload[pos + 1]} << 16) |
                              (std::size_t{payload[pos + 2]} << 8) | std::size_t{payload[pos + 3]};
            pos += 4;
            if (pos + len > payload.size()) {
                eval_fail(inst, "truncated field");
            }
            out.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                             payload.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
        }
        if (out.size() != n_out) {
            eval_fail(inst, "decoded " + std::to_string(out.size()) + " fields for " + std::to_string(n_out) +
                                " outputs");
        }
        return out;
    }
    eval_fail(inst, "unknown transform op '" + op + "'");
}

const Bytes sign_tag{'s', 'i', 'g', 'n', ':'};

Bytes sign_standin(const Bytes& key, const Bytes& msg) {
    Bytes data = sign_tag;
    data.insert(data.end(), msg.begin(), msg.end());
    return hmac_sha256(key, data);
}

}  // namespace

std::vector<Bytes> evaluate_primitive(const Instance& inst, const std::vector<Bytes>& in, SplitMix64& rng) {
    if (in.size() != inst.inputs.size()) {
        eval_fail(inst, "expected " + std::to_string(inst.inputs.size()) + " inputs");
    }
    const auto& k = inst.kind;
    try {
        if (k == "const") {
            if (!inst.config.contains("value")) {
                eval_fail(inst, "no value attribute");
            }
            return std::vector<Bytes>(inst.outputs.size(), parse_payload(inst.config.at("value")));
        }
        if (k == "rng") {
            auto len = bytes_to_u64(in[0]);
            if (len > max_frame_size) {
                eval_fail(inst, "requested " + std::to_string(len) + " random bytes");
            }
            return {rng.bytes(static_cast<std::size_t>(len))};
        }
        if (k == "transform" || (inst.config.contains("op") && k != "env")) {
            return transform_eval(inst, in);
        }
        if (k == "dhpub") {
            return {mod_pow(in[0], in[2], in[1])};
        }
        if (k == "dhsec") {
            return {mod_pow(in[3], in[2], in[1])};
        }
        if (k == "enc_ctr" || k == "dec_ctr") {
            return {ctr_xor(in[1], bytes_to_u64(in[2]), in[0])};
        }
        if (k == "hmac") {
            return {hmac_sha256(in[0], in[1])};
        }
        if (k == "sign") {
            return {sign_standin(in[0], in[1])};
        }
        if (k == "verify") {
            return {Bytes{static_cast<std::uint8_t>(sign_standin(in[0], in[1]) == in[2] ? 1 : 0)}};
        }
    } catch (const std::invalid_argument& e) {
        eval_fail(inst, e.what());
    }
    eval_fail(inst, "no evaluator for kind '" + k + "'");
}

namespace {

std::string digest8(const Bytes& payload) { return to_hex(sha256(payload)).substr(0, 8); }

/// Runtime side of one env instance.
class EnvRuntime {
  public:
    EnvRuntime(const Instance& inst, EnvBinding binding, const RunOptions& options)
        : inst_(inst), binding_(std::move(binding)), options_(options) {}

    void open() {
        const auto& p = binding_.params;
        if (binding_.mode == EnvMode::tcp_server || binding_.mode == EnvMode::tcp_client) {
            auto port = static_cast<std::uint16_t>(parse_long(param(p, "port"), "tcp port"));
            timeout_ = std::chrono::milliseconds(parse_long(param(p, "timeout_ms", "10000"), "timeout_ms"));
            frames_expected_ = static_cast<std::size_t>(
                parse_long(param(p, "frames", std::to_string(inst_.outputs.size())), "frames"));
            conn_ = binding_.mode == EnvMode::tcp_server
                        ? FramedConnection::accept_one(port, timeout_)
                        : FramedConnection::connect(param(p, "host", "127.0.0.1"), port, timeout_);
        } else if (binding_.mode == EnvMode::file) {
            for (const auto& port : inst_.inputs) {
                if (auto path = param(p, "write." + port); !path.empty()) {
                    std::ofstream truncate(path, std::ios::binary | std::ios::trunc);
                    if (!truncate) {
                        throw ExecutionError("env '" + inst_.name + "': cannot write '" + path + "'");
                    }
                }
            }
        }
    }

    std::vector<std::pair<std::string, Bytes>> initial_outputs() {
        std::vector<std::pair<std::string, Bytes>> out;
        const auto& p = binding_.params;
        for (const auto& port : inst_.outputs) {
            switch (binding_.mode) {
            case EnvMode::fixture:
                if (p.contains("out." + port)) {
                    out.emplace_back(port, parse_payload(p.at("out." + port)));
                }
                break;
            case EnvMode::file:
                if (auto path = param(p, "read." + port); !path.empty()) {
                    auto data = read_file(path);
                    out.emplace_back(port, Bytes(data.begin(), data.end()));
                }
                break;
            case EnvMode::console: {
                std::string line;
                auto& in = options_.console_in ? *options_.console_in : std::cin;
                if (std::getline(in, line)) {
                    out.emplace_back(port, parse_payload(line));
                }
                break;
            }
            default: break;
            }
        }
        return out;
    }

    [[nodiscard]] bool awaiting() const { return conn_.is_open() && frames_received_ < frames_expected_; }

    std::pair<std::string, Bytes> wait_next() {
        auto frame = conn_.receive(timeout_);
        if (!frame) {
            throw ExecutionError("env '" + inst_.name + "': peer closed the connection after " +
                                 std::to_string(frames_received_) + " of " + std::to_string(frames_expected_) +
                                 " frames");
        }
        auto port = inst_.outputs[frames_received_ % inst_.outputs.size()];
        ++frames_received_;
        return {port, std::move(*frame)};
    }

    void deliver(const std::string& port, const Bytes& payload) {
        const auto& p = binding_.params;
        switch (binding_.mode) {
        case EnvMode::console: {
            auto& out = options_.console_out ? *options_.console_out : std::cout;
            out << inst_.name << "." << port << " " << to_hex(payload) << "\n";
            break;
        }
        case EnvMode::file:
            if (auto path = param(p, "write." + port); !path.empty()) {
                std::ofstream f(path, std::ios::binary | std::ios::app);
                f.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
            }
            break;
        case EnvMode::tcp_server:
        case EnvMode::tcp_client: conn_.send(payload); break;
        case EnvMode::fixture: break;
        }
    }

    void check(const std::map<std::string, std::vector<Bytes>>& received, std::vector<std::string>& mismatches) const {
        if (binding_.mode != EnvMode::fixture) {
            return;
        }
        const auto& p = binding_.params;
        auto first = [&](const std::string& key) -> const Bytes* {
            auto it = received.find(key);
            return it == received.end() || it->second.empty() ? nullptr : &it->second.front();
        };
        for (const auto& port : inst_.inputs) {
            const auto key = inst_.name + "." + port;
            if (auto want = param(p, "expect." + port); !want.empty()) {
                const auto* got = first(key);
                if (got == nullptr) {
                    mismatches.push_back(key + ": expected " + to_hex(parse_payload(want)) + ", received nothing");
                } else if (*got != parse_payload(want)) {
                    mismatches.push_back(key + ": expected " + to_hex(parse_payload(want)) + ", received " +
                                         to_hex(*got));
                }
            }
            if (auto other = param(p, "same_as." + port); !other.empty()) {
                const auto* a = first(key);
                const auto* b = first(other);
                if (a == nullptr || b == nullptr) {
                    mismatches.push_back(key + ": cannot compare with " + other + ", a side received nothing");
                } else if (*a != *b) {
                    mismatches.push_back(key + ": differs from " + other + " (" + to_hex(*a) + " vs " + to_hex(*b) +
                                         ")");
                }
            }
        }
    }

  private:
    const Instance& inst_;
    EnvBinding binding_;
    const RunOptions& options_;
    FramedConnection conn_;
    std::chrono::milliseconds timeout_{10000};
    std::size_t frames_expected_ = 0;
    std::size_t frames_received_ = 0;
};

class Scheduler {
  public:
    Scheduler(const ModelDocument& doc, const RunOptions& options) : net_(doc.network), options_(options) {
        for (const auto& inst : net_.instances()) {
            auto& state = states_[inst.name];
            state.inst = &inst;
            state.slots.resize(inst.inputs.size());
            state.rng = std::make_unique<SplitMix64>(options.seed ^ fnv1a64(inst.name));
            if (inst.kind == "env") {
                auto it = options.bindings.find(inst.name);
                EnvBinding binding;
                try {
                    binding = it != options.bindings.end() ? it->second : binding_from_config(inst.config);
                } catch (const ExecutionError& e) {
                    throw ExecutionError("env '" + inst.name + "' is unbound: " + e.what());
                }
                state.env = std::make_unique<EnvRuntime>(inst, std::move(binding), options_);
            }
        }
    }

    RunResult run() {
        for (auto& [name, state] : states_) {
            if (state.env) {
                state.env->open();
                for (auto& o : state.env->initial_outputs()) {
                    state.outbox.push_back(std::move(o));
                }
            }
        }
        // Initial firings: sources and envs with something to inject, in name order.
        for (const auto& [name, state] : states_) {
            if ((!state.env && state.inst->inputs.empty()) || !state.outbox.empty()) {
                enqueue(name);
            }
        }

        for (;;) {
            while (!ready_.empty() && result_.steps < options_.max_steps) {
                auto name = ready_.front();
                ready_.pop_front();
                queued_.erase(name);
                fire(states_.at(name));
                ++result_.steps;
            }
            if (!ready_.empty()) {
                result_.budget_exhausted = true;
                break;
            }
            auto waiting = std::find_if(states_.begin(), states_.end(),
                                        [](const auto& kv) { return kv.second.env && kv.second.env->awaiting(); });
            if (waiting == states_.end()) {
                break;
            }
            waiting->second.outbox.push_back(waiting->second.env->wait_next());
            enqueue(waiting->first);
        }

        for (const auto& [name, state] : states_) {
            if (state.env) {
                state.env->check(result_.env_received, result_.mismatches);
            }
        }
        if (result_.budget_exhausted) {
            result_.mismatches.push_back("step budget of " + std::to_string(options_.max_steps) + " exhausted");
        }
        return std::move(result_);
    }

  private:
    struct State {
        const Instance* inst = nullptr;
        std::vector<std::optional<Bytes>> slots;
        std::unique_ptr<SplitMix64> rng;
        std::unique_ptr<EnvRuntime> env;
        std::deque<std::pair<std::string, Bytes>> outbox;
    };

    void enqueue(const std::string& name) {
        if (queued_.insert(name).second) {
            ready_.push_back(name);
        }
    }

    void trace(const std::string& inst, const std::string& port, TraceDirection dir, const Bytes& payload) {
        result_.trace.push_back({++event_, inst, port, dir, digest8(payload)});
    }

    void emit(State& state, const std::string& port, Bytes payload, std::set<std::string>& woken) {
        const auto& name = state.inst->name;
        trace(name, port, TraceDirection::out, payload);
        const auto* ch = net_.channel_from(name, port);
        if (ch == nullptr) {
            return;
        }
        auto& dst = states_.at(ch->dst);
        const auto& ins = dst.inst->inputs;
        auto idx = static_cast<std::size_t>(std::find(ins.begin(), ins.end(), ch->in_port) - ins.begin());
        if (dst.slots[idx]) {
            throw ExecutionError("second message on " + ch->dst + "." + ch->in_port + " before it fired");
        }
        dst.slots[idx] = std::move(payload);
        bool ready = dst.env != nullptr ||
                     std::all_of(dst.slots.begin(), dst.slots.end(), [](const auto& s) { return s.has_value(); });
        if (ready) {
            woken.insert(ch->dst);
        }
    }

    void fire(State& state) {
        const auto& inst = *state.inst;
        std::set<std::string> woken;
        if (state.env) {
            for (std::size_t i = 0; i < inst.inputs.size(); ++i) {
                if (!state.slots[i]) {
                    continue;
                }
                auto payload = std::move(*state.slots[i]);
                state.slots[i].reset();
                trace(inst.name, inst.inputs[i], TraceDirection::in, payload);
                result_.env_received[inst.name + "." + inst.inputs[i]].push_back(payload);
                state.env->deliver(inst.inputs[i], payload);
            }
            while (!state.outbox.empty()) {
                auto [port, payload] = std::move(state.outbox.front());
                state.outbox.pop_front();
                emit(state, port, std::move(payload), woken);
            }
        } else {
            std::vector<Bytes> inputs;
            for (std::size_t i = 0; i < inst.inputs.size(); ++i) {
                trace(inst.name, inst.inputs[i], TraceDirection::in, *state.slots[i]);
                inputs.push_back(std::move(*state.slots[i]));
                state.slots[i].reset();
            }
            auto outputs = evaluate_primitive(inst, inputs, *state.rng);
            if (outputs.size() != inst.outputs.size()) {
                throw ExecutionError(inst.kind + " '" + inst.name + "' produced " + std::to_string(outputs.size()) +
                                     " outputs for " + std::to_string(inst.outputs.size()) + " ports");
            }
            for (std::size_t i = 0; i < outputs.size(); ++i) {
                emit(state, inst.outputs[i], std::move(outputs[i]), woken);
            }
        }
        for (const auto& w : woken) {
            enqueue(w);
        }
    }

    const Network& net_;
    const RunOptions& options_;
    std::map<std::string, State> states_;
    std::deque<std::string> ready_;
    std::set<std::string> queued_;
    RunResult result_;
    std::uint64_t event_ = 0;
};

}  // namespace

RunResult run_network(const ModelDocument& doc, const RunOptions& options) {
    for (const auto& issue : validate_network(doc.network)) {
        if (!issue.warning) {
            throw ModelError("cannot run an invalid network: " + issue.instance + ": " + issue.message);
        }
    }
    return Scheduler(doc, options).run();
}

}  // namespace protopart
