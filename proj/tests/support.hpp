#pragma once

// Shared session fixture for the protocol-level tests: spins up n parties on
// the toy group, with optionally forced exponents (scripted first draw; later
// draws, e.g. signature nonces, stay seeded-random).

#include <memory>
#include <string>
#include <vector>

#include "gkex/adversary.hpp"
#include "gkex/protocol.hpp"

namespace gkex::testing {

struct TestSession {
  GroupParams params = GroupParams::preset("toy");
  std::vector<std::string> ids;
  Registry registry;
  std::vector<SigningKey> sks;
  std::vector<std::unique_ptr<RandomSource>> rngs;
  std::vector<ParticipantState> states;
  std::vector<Round1Msg> r1;
  std::vector<Round2Msg> r2;
};

/// exponents, when non-empty, pins party i's x_i to exponents[i] (1..10).
inline TestSession make_session(std::size_t n, Variant variant, std::uint64_t seed,
                                const std::vector<int> &exponents = {}) {
  TestSession s;
  for (std::size_t i = 0; i < n; ++i) s.ids.push_back("U" + std::to_string(i + 1));
  Roster roster(s.ids);
  for (std::size_t i = 0; i < n; ++i) {
    SeededSource key_rng(9000 + i);
    auto [sk, vk] = keypair(s.params, key_rng);
    s.sks.push_back(sk);
    s.registry.add(s.ids[i], vk);
    std::uint64_t party_seed = seed * 1000 + i;
    if (exponents.empty()) {
      s.rngs.push_back(std::make_unique<SeededSource>(party_seed));
    } else {
      s.rngs.push_back(std::make_unique<ScriptedSource>(
          Bytes{static_cast<std::uint8_t>(exponents[i])}, party_seed));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto [st, msg] = start_session(s.ids[i], roster, s.params, variant, s.sks[i], *s.rngs[i]);
    s.states.push_back(st);
    s.r1.push_back(msg);
  }
  return s;
}

inline void run_round2(TestSession &s) {
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    auto [st, msg] = on_round1_complete(s.states[i], s.r1, *s.rngs[i]);
    s.states[i] = st;
    s.r2.push_back(msg);
  }
}

inline void run_round2_with_insiders(TestSession &s, const AdversaryConfig &cfg) {
  std::size_t n = s.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto [st, msg] = cfg.is_insider(i, n)
                         ? malicious_round2(s.states[i], cfg, s.r1, *s.rngs[i])
                         : on_round1_complete(s.states[i], s.r1, *s.rngs[i]);
    s.states[i] = st;
    s.r2.push_back(msg);
  }
}

inline void run_group_keys(TestSession &s, const AdversaryConfig *cfg = nullptr) {
  std::size_t n = s.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    s.states[i] = cfg && cfg->is_insider(i, n)
                      ? insider_compute_group_key(s.states[i], *cfg, s.r2, s.registry)
                      : compute_group_key(s.states[i], s.r2, s.registry);
  }
}

/// Direct token oracle: H(g^{x_j x_{j+1}}, sid) from the secret exponents,
/// independent of the chain-recovery path.
inline std::vector<Digest> direct_edge_tokens(const TestSession &s, const Bytes &context) {
  std::size_t n = s.states.size();
  std::vector<Digest> tokens(n);
  for (std::size_t j = 0; j < n; ++j) {
    Element shared =
        exp(exp(s.params.generator(), s.states[(j + 1) % n].exponent, s.params),
            s.states[j].exponent, s.params);
    tokens[j] = oracle_eval(OracleTag::H, {encode_element(shared, s.params), context});
  }
  return tokens;
}

}  // namespace gkex::testing
