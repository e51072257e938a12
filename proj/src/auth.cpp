#include "gkex/auth.hpp"

#include "gkex/errors.hpp"

namespace gkex {

namespace {

// Challenge scalar from the commitment and message. Interpreted mod q; the
// full digest travels in the signature so verification compares tau bits.
Digest challenge_digest(const Bytes &commitment_enc, const Bytes &message) {
  return oracle_eval(OracleTag::Sig, {commitment_enc, message});
}

BigInt digest_mod_q(const Digest &d, const GroupParams &params) {
  return decode_bigint(d) % params.q;
}

}  // namespace

std::pair<SigningKey, VerifyKey> keypair(const GroupParams &params, RandomSource &rng) {
  Scalar sk = random_scalar(params, rng);
  Element vk = exp(params.generator(), sk, params);
  return {SigningKey{sk}, VerifyKey{vk}};
}

Signature sign(const SigningKey &key, const Bytes &message, const GroupParams &params,
               RandomSource &rng) {
  Scalar nonce = random_scalar(params, rng);
  Element commitment = exp(params.generator(), nonce, params);
  Digest c = challenge_digest(encode_element(commitment, params), message);
  BigInt s = (nonce.value + digest_mod_q(c, params) * key.sk.value) % params.q;
  return Signature{c, s};
}

bool verify(const VerifyKey &vk, const Bytes &message, const Signature &sig,
            const GroupParams &params) {
  if (sig.challenge.size() != kDigestBytes) return false;
  if (sig.response < 0 || sig.response >= params.q) return false;
  if (!is_valid_element(vk.vk.value, params)) return false;
  // R' = g^s * vk^(-c); vk has order q so -c is q - (c mod q).
  BigInt c = digest_mod_q(sig.challenge, params);
  BigInt lhs = boost::multiprecision::powm(params.g, sig.response, params.p);
  BigInt rhs = boost::multiprecision::powm(vk.vk.value, params.q - c, params.p);
  BigInt r = lhs * rhs % params.p;
  Digest expect = challenge_digest(encode_bigint(r, params.element_width()), message);
  return expect == sig.challenge;
}

Bytes encode_signature(const Signature &sig, const GroupParams &params) {
  Bytes out = sig.challenge;
  Bytes s = encode_bigint(sig.response, params.scalar_width());
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

Signature decode_signature(const Bytes &raw, const GroupParams &params) {
  if (raw.size() != kDigestBytes + params.scalar_width()) {
    throw Error(ErrorCode::MalformedTranscript, "bad signature length");
  }
  Signature sig;
  sig.challenge.assign(raw.begin(), raw.begin() + kDigestBytes);
  sig.response = decode_bigint(Bytes(raw.begin() + kDigestBytes, raw.end()));
  return sig;
}

void Registry::add(const std::string &identity, const VerifyKey &vk) {
  if (entries_.count(identity)) {
    throw Error(ErrorCode::DuplicateIdentity, "registry already holds " + identity);
  }
  entries_.emplace(identity, vk);
}

const VerifyKey &Registry::lookup(const std::string &identity) const {
  auto it = entries_.find(identity);
  if (it == entries_.end()) {
    throw Error(ErrorCode::IdentityNotInRoster, "no key registered for " + identity);
  }
  return it->second;
}

bool Registry::contains(const std::string &identity) const { return entries_.count(identity) > 0; }

}  // namespace gkex
