#include "gkex/oracle.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "gkex/errors.hpp"

namespace gkex {

namespace {

Bytes hash_with(const EVP_MD *md, const Bytes &input, std::size_t out_len) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int written = 0;
  if (EVP_Digest(input.data(), input.size(), out.data(), &written, md, nullptr) != 1) {
    throw std::runtime_error("EVP_Digest failed");
  }
  if (written != out_len) throw std::runtime_error("unexpected digest length");
  out.resize(out_len);
  return out;
}

}  // namespace

Bytes oracle_preimage(OracleTag tag, const std::vector<Bytes> &fields) {
  Bytes pre;
  pre.push_back(static_cast<std::uint8_t>(tag));
  for (const Bytes &f : fields) append_prefixed(pre, f);
  return pre;
}

Digest oracle_eval(OracleTag tag, const std::vector<Bytes> &fields) {
  if (tag == OracleTag::HgWide) {
    throw Error(ErrorCode::WideTagMisuse, "HgWide requires oracle_eval_wide");
  }
  return hash_with(EVP_sha256(), oracle_preimage(tag, fields), kDigestBytes);
}

WideDigest oracle_eval_wide(const std::vector<Bytes> &fields) {
  Bytes raw = hash_with(EVP_sha512(), oracle_preimage(OracleTag::HgWide, fields), 2 * kDigestBytes);
  WideDigest out;
  out.left.assign(raw.begin(), raw.begin() + kDigestBytes);
  out.right.assign(raw.begin() + kDigestBytes, raw.end());
  return out;
}

Digest xor_digest(const Digest &a, const Digest &b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "xor over unequal digest lengths");
  }
  Digest out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

Digest zero_digest() { return Digest(kDigestBytes, 0); }

Digest sha256_bytes(const Bytes &input) { return hash_with(EVP_sha256(), input, kDigestBytes); }

}  // namespace gkex
