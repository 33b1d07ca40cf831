// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "protopart/crypto.hpp"

namespace protopart {

class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Frames are a 4-byte big-endian length followed by the payload.
inline constexpr std::uint32_t max_frame_size = 16u << 20;

Bytes encode_frame(std::span<const std::uint8_t> payload);

/// Connected stream socket carrying length-prefixed frames.
class FramedConnection {
  public:
    FramedConnection() = default;
    explicit FramedConnection(int fd) : fd_(fd) {}
    FramedConnection(FramedConnection&& other) noexcept;
    FramedConnection& operator=(FramedConnection&& other) noexcept;
    FramedConnection(const FramedConnection&) = delete;
    FramedConnection& operator=(const FramedConnection&) = delete;
    ~FramedConnection();

    /// Listens on `port` (all interfaces) and accepts one peer.
    static FramedConnection accept_one(std::uint16_t port, std::chrono::milliseconds timeout);
    /// Connects, retrying until the timeout expires.
    static FramedConnection connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

    [[nodiscard]] bool is_open() const { return fd_ >= 0; }

    void send(std::span<const std::uint8_t> payload);
    /// Next frame; nullopt when the peer closed the connection. Frames above
    /// max_frame_size raise TransportError.
    std::optional<Bytes> receive(std::chrono::milliseconds timeout);

  private:
    void read_exact(std::uint8_t* dst, std::size_t n, std::chrono::steady_clock::time_point deadline, bool& eof);

    int fd_ = -1;
};

}  // namespace protopart
