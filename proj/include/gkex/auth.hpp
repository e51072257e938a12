#pragma once

#include <map>
#include <string>

#include "gkex/group.hpp"
#include "gkex/oracle.hpp"
#include "gkex/rng.hpp"

namespace gkex {

/// Schnorr keypair over the session group: sk in [1, q-1], vk = g^sk.
struct SigningKey {
  Scalar sk;
};

struct VerifyKey {
  Element vk;

  bool operator==(const VerifyKey &) const = default;
};

/// Schnorr signature (c, s): c = H_sig(g^k, m), s = k + c*sk mod q.
struct Signature {
  Digest challenge;   // c, tau bits
  BigInt response;    // s in [0, q-1]
};

std::pair<SigningKey, VerifyKey> keypair(const GroupParams &params, RandomSource &rng);

Signature sign(const SigningKey &key, const Bytes &message, const GroupParams &params,
               RandomSource &rng);

/// True iff sig is valid on message under vk. Malformed signatures return
/// false rather than throwing.
bool verify(const VerifyKey &vk, const Bytes &message, const Signature &sig,
            const GroupParams &params);

Bytes encode_signature(const Signature &sig, const GroupParams &params);
Signature decode_signature(const Bytes &raw, const GroupParams &params);

/// Identity -> verification key map, fixed before any session starts.
class Registry {
 public:
  Registry() = default;

  void add(const std::string &identity, const VerifyKey &vk);
  const VerifyKey &lookup(const std::string &identity) const;  // Error(IdentityNotInRoster)
  bool contains(const std::string &identity) const;
  const std::map<std::string, VerifyKey> &entries() const { return entries_; }

 private:
  std::map<std::string, VerifyKey> entries_;
};

}  // namespace gkex
