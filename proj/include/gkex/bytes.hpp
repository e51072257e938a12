#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gkex {

using Bytes = std::vector<std::uint8_t>;

/// 32-bit big-endian length prefix used by every wire and preimage encoding.
void append_u32(Bytes &out, std::uint32_t v);

/// Appends len(field) as 4-byte big-endian, then the field itself.
void append_prefixed(Bytes &out, const Bytes &field);

Bytes to_bytes(const std::string &s);

std::string to_hex(const Bytes &b);
Bytes from_hex(const std::string &hex);  // throws std::invalid_argument on bad input

/// True if `needle` occurs as a contiguous subsequence of `haystack`.
bool contains_subsequence(const Bytes &haystack, const Bytes &needle);

}  // namespace gkex
