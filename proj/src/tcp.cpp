// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/tcp.hpp"

#include <cerrno>
#include <cstring>
#include <memory>
#include <thread>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace protopart {

namespace {

[[noreturn]] void fail(const std::string& what) { throw TransportError(what + ": " + std::strerror(errno)); }

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

}  // namespace

Bytes encode_frame(std::span<const std::uint8_t> payload) {
    if (payload.size() > max_frame_size) {
        throw TransportError("frame of " + std::to_string(payload.size()) + " bytes exceeds the 16 MiB limit");
    }
    auto n = static_cast<std::uint32_t>(payload.size());
    Bytes out{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 8),
              static_cast<std::uint8_t>(n)};
    if (!payload.empty()) {
        out.insert(out.end(), payload.begin(), payload.end());
    }
    return out;
}

FramedConnection::FramedConnection(FramedConnection&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

FramedConnection& FramedConnection::operator=(FramedConnection&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

FramedConnection::~FramedConnection() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

FramedConnection FramedConnection::accept_one(std::uint16_t port, std::chrono::milliseconds timeout) {
    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) {
        fail("socket");
    }
    FramedConnection guard(listener);
    int yes = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        fail("bind to port " + std::to_string(port));
    }
    if (::listen(listener, 1) < 0) {
        fail("listen");
    }
    pollfd p{listener, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) {
        throw TransportError("no peer connected to port " + std::to_string(port) + " within " +
                             std::to_string(timeout.count()) + " ms");
    }
    int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) {
        fail("accept");
    }
    return FramedConnection(fd);
}

FramedConnection FramedConnection::connect(const std::string& host, std::uint16_t port,
                                           std::chrono::milliseconds timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res); rc != 0) {
        throw TransportError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
    for (;;) {
        int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
        if (fd < 0) {
            fail("socket");
        }
        if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
            return FramedConnection(fd);
        }
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            fail("connect to " + host + ":" + std::to_string(port));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

void FramedConnection::send(std::span<const std::uint8_t> payload) {
    auto frame = encode_frame(payload);
    std::size_t sent = 0;
    while (sent < frame.size()) {
        auto n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

void FramedConnection::read_exact(std::uint8_t* dst, std::size_t n, std::chrono::steady_clock::time_point deadline,
                                  bool& eof) {
    std::size_t got = 0;
    while (got < n) {
        pollfd p{fd_, POLLIN, 0};
        int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc == 0) {
            throw TransportError("timed out waiting for frame data");
        }
        if (rc < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail("poll");
        }
        auto r = ::recv(fd_, dst + got, n - got, 0);
        if (r == 0) {
            eof = true;
            return;
        }
        if (r < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail("recv");
        }
        got += static_cast<std::size_t>(r);
    }
}

std::optional<Bytes> FramedConnection::receive(std::chrono::milliseconds timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    std::uint8_t header[4];
    bool eof = false;
    read_exact(header, 4, deadline, eof);
    if (eof) {
        return std::nullopt;
    }
    std::uint32_t n = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                      (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
    if (n > max_frame_size) {
        throw TransportError("incoming frame of " + std::to_string(n) + " bytes exceeds the 16 MiB limit");
    }
    Bytes payload(n);
    if (n > 0) {
        read_exact(payload.data(), n, deadline, eof);
        if (eof) {
            throw TransportError("connection closed mid-frame");
        }
    }
    return payload;
}

}  // namespace protopart
