#include "gkex/group.hpp"

#include <boost/multiprecision/integer.hpp>

#include "gkex/errors.hpp"

namespace gkex {

namespace {

// RFC 3526 group 14. Safe prime: q = (p-1)/2 is prime and 2 generates the
// order-q subgroup (2 is a quadratic residue since p = 7 mod 8).
const char *kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

std::size_t byte_width(const BigInt &v) {
  std::size_t bits = boost::multiprecision::msb(v) + 1;
  return (bits + 7) / 8;
}

}  // namespace

GroupParams GroupParams::preset(const std::string &name) {
  if (name == "toy") {
    return GroupParams{23, 11, 2, "toy"};
  }
  if (name == "modp-2048") {
    BigInt p(std::string("0x") + kModp2048Hex);
    return GroupParams{p, (p - 1) / 2, 2, "modp-2048"};
  }
  throw Error(ErrorCode::InvalidScenario, "unknown group preset '" + name + "'");
}

std::size_t GroupParams::element_width() const { return byte_width(p); }
std::size_t GroupParams::scalar_width() const { return byte_width(q); }

Bytes encode_bigint(const BigInt &v, std::size_t width) {
  Bytes out(width, 0);
  BigInt t = v;
  for (std::size_t i = 0; i < width && t > 0; ++i) {
    out[width - 1 - i] = static_cast<std::uint8_t>(t & 0xff);
    t >>= 8;
  }
  return out;
}

BigInt decode_bigint(const Bytes &raw) {
  BigInt v = 0;
  for (std::uint8_t b : raw) {
    v <<= 8;
    v += b;
  }
  return v;
}

Scalar random_scalar(const GroupParams &params, RandomSource &rng) {
  std::size_t bits = boost::multiprecision::msb(params.q) + 1;
  std::size_t width = (bits + 7) / 8;
  std::uint8_t mask = bits % 8 == 0 ? 0xff : static_cast<std::uint8_t>((1u << (bits % 8)) - 1);
  for (;;) {
    Bytes draw = rng.bytes(width);
    draw[0] &= mask;
    BigInt v = decode_bigint(draw);
    if (v >= 1 && v <= params.q - 1) return Scalar{v};
  }
}

bool is_valid_element(const BigInt &v, const GroupParams &params) {
  if (v < 2 || v >= params.p) return false;
  return boost::multiprecision::powm(v, params.q, params.p) == 1;
}

Element exp(const Element &base, const Scalar &s, const GroupParams &params) {
  if (!is_valid_element(base.value, params)) {
    throw Error(ErrorCode::InvalidElement, "exp base fails subgroup check");
  }
  return Element{boost::multiprecision::powm(base.value, s.value, params.p)};
}

Bytes encode_element(const Element &e, const GroupParams &params) {
  return encode_bigint(e.value, params.element_width());
}

Element validate_element(const Bytes &raw, const GroupParams &params) {
  if (raw.size() != params.element_width()) {
    throw Error(ErrorCode::InvalidElement, "wrong encoded width");
  }
  BigInt v = decode_bigint(raw);
  if (v == 1) throw Error(ErrorCode::InvalidElement, "identity element");
  if (!is_valid_element(v, params)) {
    throw Error(ErrorCode::InvalidElement, "not a subgroup member");
  }
  return Element{v};
}

}  // namespace gkex
