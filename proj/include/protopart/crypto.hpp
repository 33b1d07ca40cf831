// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protopart {

using Bytes = std::vector<std::uint8_t>;

Bytes sha256(std::span<const std::uint8_t> data);
Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);

/// payload XOR keystream, block i = SHA-256(key || be64(counter + i)).
/// Encryption and decryption are the same operation.
Bytes ctr_xor(std::span<const std::uint8_t> key, std::uint64_t counter, std::span<const std::uint8_t> payload);

/// base^exponent mod modulus over big-endian unsigned integers. Throws
/// std::invalid_argument if modulus < 2.
Bytes mod_pow(std::span<const std::uint8_t> base, std::span<const std::uint8_t> exponent,
              std::span<const std::uint8_t> modulus);

/// Minimal big-endian encoding; zero encodes as a single 0x00 byte.
Bytes integer_bytes(std::uint64_t value);
/// Big-endian value of at most 8 significant bytes; throws
/// std::invalid_argument otherwise.
std::uint64_t bytes_to_u64(std::span<const std::uint8_t> bytes);

/// Decimal string to minimal big-endian bytes. Throws std::invalid_argument.
Bytes decimal_to_bytes(std::string_view digits);
std::string bytes_to_decimal(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    Bytes bytes(std::size_t n);

  private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view text);

}  // namespace protopart
