#pragma once

#include <cstdint>
#include <vector>

#include "gkex/bytes.hpp"

namespace gkex {

/// Domain-separation tags for the protocol's random oracles. HgWide is the
/// only wide (2*tau-bit) oracle; Sig is reserved for the signature scheme's
/// challenge hash and sits outside the protocol's six tags.
enum class OracleTag : std::uint8_t {
  H = 0x01,       // G -> {0,1}^tau, edge tokens
  Hg = 0x02,      // group session key
  Hp = 0x03,      // p2p session key
  Hs = 0x04,      // subgroup session key
  HgWide = 0x05,  // {0,1}^* -> {0,1}^{2 tau}, key + confirmation key
  Hkc = 0x06,     // confirmation message
  Sig = 0x07,     // Schnorr challenge (not a protocol oracle)
};

constexpr std::size_t kDigestBytes = 32;  // tau = 256 bits

using Digest = Bytes;  // always kDigestBytes long when produced here

struct WideDigest {
  Digest left;   // session key half
  Digest right;  // confirmation key half
};

/// Canonical preimage: tag byte, then each field as 4-byte big-endian length
/// followed by the field bytes. Injective across field lists.
Bytes oracle_preimage(OracleTag tag, const std::vector<Bytes> &fields);

/// tau-bit oracle. Throws Error(WideTagMisuse) for HgWide.
Digest oracle_eval(OracleTag tag, const std::vector<Bytes> &fields);

/// 2*tau-bit oracle (HgWide tag).
WideDigest oracle_eval_wide(const std::vector<Bytes> &fields);

/// Bitwise XOR; throws Error(LengthMismatch) on unequal lengths.
Digest xor_digest(const Digest &a, const Digest &b);

Digest zero_digest();

/// Plain SHA-256, used outside the oracle suite (seed derivation).
Digest sha256_bytes(const Bytes &input);

}  // namespace gkex
