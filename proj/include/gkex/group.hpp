#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "gkex/bytes.hpp"
#include "gkex/rng.hpp"

namespace gkex {

using BigInt = boost::multiprecision::cpp_int;

struct GroupParams;

/// Member of the order-q subgroup of Z_p*, stored as the canonical residue
/// in [2, p-1]. The identity is deliberately unrepresentable: every public
/// value in the protocol must have full order.
struct Element {
  BigInt value;

  bool operator==(const Element &) const = default;
};

/// Exponent in [1, q-1]. Zero is excluded so g^x is never the identity.
struct Scalar {
  BigInt value;

  bool operator==(const Scalar &) const = default;
};

/// Multiplicative prime-order group: the order-q subgroup of Z_p* generated
/// by g. Two presets: "toy" (p=23, q=11, g=2) small enough for exhaustive
/// tests, and "modp-2048" (RFC 3526 group 14 safe prime, q=(p-1)/2, g=2).
struct GroupParams {
  BigInt p;
  BigInt q;
  BigInt g;
  std::string name;

  static GroupParams preset(const std::string &name);  // Error(InvalidScenario) if unknown

  Element generator() const { return Element{g}; }
  std::size_t element_width() const;  // byte length of p
  std::size_t scalar_width() const;   // byte length of q
};

/// Uniform draw from [1, q-1] by rejection sampling; deterministic given the
/// source's byte stream.
Scalar random_scalar(const GroupParams &params, RandomSource &rng);

/// base^s mod p. Throws Error(InvalidElement) if base is not a valid
/// non-identity subgroup member.
Element exp(const Element &base, const Scalar &s, const GroupParams &params);

/// Fixed-width big-endian encoding, width = byte length of p.
Bytes encode_element(const Element &e, const GroupParams &params);

/// Decodes and checks subgroup membership. Rejects out-of-range values, the
/// identity, and anything with e^q != 1 (small-subgroup injection guard).
Element validate_element(const Bytes &raw, const GroupParams &params);

/// Membership predicate behind validate_element / exp.
bool is_valid_element(const BigInt &v, const GroupParams &params);

Bytes encode_bigint(const BigInt &v, std::size_t width);
BigInt decode_bigint(const Bytes &raw);

}  // namespace gkex
