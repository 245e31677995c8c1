#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace seasoned
{
using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

/// 256-bit EVM word. Arithmetic wraps modulo 2^256.
using u256 = boost::multiprecision::uint256_t;

/// Contract label: benign = 0, adversarial exploiter = 1, absent = unlabeled.
enum class Label : std::uint8_t
{
    benign = 0,
    aec = 1,
};
using OptLabel = std::optional<Label>;

/// Lowercase hex without leading zeros ("0x0" for zero).
std::string to_hex(const u256& v);

/// Lowercase hex of a byte string with a 0x prefix.
std::string to_hex(BytesView bytes);

u256 u256_from_bytes(BytesView big_endian);

}  // namespace seasoned
