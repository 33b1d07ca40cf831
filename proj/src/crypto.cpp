// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/crypto.hpp"

#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>
#include <openssl/evp.h>
#include <openssl/hmac.h>

namespace protopart {

namespace mp = boost::multiprecision;

Bytes sha256(std::span<const std::uint8_t> data) {
    Bytes out(32);
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
        throw std::runtime_error("SHA-256 failed");
    }
    return out;
}

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
    Bytes out(32);
    unsigned int len = 0;
    static const std::uint8_t empty = 0;
    const auto* k = key.empty() ? &empty : key.data();
    if (HMAC(EVP_sha256(), k, static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len) == nullptr ||
        len != 32) {
        throw std::runtime_error("HMAC-SHA-256 failed");
    }
    return out;
}

Bytes ctr_xor(std::span<const std::uint8_t> key, std::uint64_t counter, std::span<const std::uint8_t> payload) {
    Bytes out(payload.begin(), payload.end());
    Bytes block_input(key.begin(), key.end());
    block_input.resize(key.size() + 8);
    for (std::size_t offset = 0, block = 0; offset < out.size(); offset += 32, ++block) {
        auto ctr = counter + block;  // wraps modulo 2^64
        for (int b = 0; b < 8; ++b) {
            block_input[key.size() + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(ctr >> (56 - 8 * b));
        }
        auto stream = sha256(block_input);
        for (std::size_t i = 0; i < 32 && offset + i < out.size(); ++i) {
            out[offset + i] ^= stream[i];
        }
    }
    return out;
}

namespace {

mp::cpp_int to_int(std::span<const std::uint8_t> bytes) {
    mp::cpp_int v;
    if (!bytes.empty()) {
        mp::import_bits(v, bytes.begin(), bytes.end(), 8, true);
    }
    return v;
}

Bytes from_int(const mp::cpp_int& v) {
    if (v == 0) {
        return {0};
    }
    Bytes out;
    mp::export_bits(v, std::back_inserter(out), 8, true);
    return out;
}

}  // namespace

Bytes mod_pow(std::span<const std::uint8_t> base, std::span<const std::uint8_t> exponent,
              std::span<const std::uint8_t> modulus) {
    auto m = to_int(modulus);
    if (m < 2) {
        throw std::invalid_argument("modulus must be at least 2");
    }
    return from_int(mp::powm(to_int(base), to_int(exponent), m));
}

Bytes integer_bytes(std::uint64_t value) { return from_int(mp::cpp_int(value)); }

std::uint64_t bytes_to_u64(std::span<const std::uint8_t> bytes) {
    std::size_t i = 0;
    while (i < bytes.size() && bytes[i] == 0) {
        ++i;
    }
    if (bytes.size() - i > 8) {
        throw std::invalid_argument("integer does not fit in 64 bits");
    }
    std::uint64_t v = 0;
    for (; i < bytes.size(); ++i) {
        v = (v << 8) | bytes[i];
    }
    return v;
}

Bytes decimal_to_bytes(std::string_view digits) {
    if (digits.empty()) {
        throw std::invalid_argument("empty integer");
    }
    mp::cpp_int v;
    for (char c : digits) {
        if (c < '0' || c > '9') {
            throw std::invalid_argument("not a decimal integer: '" + std::string(digits) + "'");
        }
        v = v * 10 + (c - '0');
    }
    return from_int(v);
}

std::string bytes_to_decimal(std::span<const std::uint8_t> bytes) { return to_int(bytes).str(); }

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("odd-length hex string");
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') {
            return c - '0';
        }
        if (c >= 'a' && c <= 'f') {
            return c - 'a' + 10;
        }
        if (c >= 'A' && c <= 'F') {
            return c - 'A' + 10;
        }
        throw std::invalid_argument(std::string("invalid hex digit '") + c + "'");
    };
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    }
    return out;
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Bytes SplitMix64::bytes(std::size_t n) {
    Bytes out;
    out.reserve(n);
    while (out.size() < n) {
        auto v = next();
        for (int b = 0; b < 8 && out.size() < n; ++b) {
            out.push_back(static_cast<std::uint8_t>(v >> (56 - 8 * b)));
        }
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace protopart
