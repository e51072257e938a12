// Acceptance suite: runs every acceptance criterion end to end and prints one
// pass/fail line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "gkex/sim.hpp"
#include "support.hpp"

using namespace gkex;
using namespace gkex::testing;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string &)> run;  // fills a detail string
};

Digest seed_mask(std::uint64_t seed) {
  Bytes input = to_bytes("mask");
  for (int i = 7; i >= 0; --i) input.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
  return sha256_bytes(input);
}

Scenario scenario(const std::string &protocol, std::size_t n, std::uint64_t seed,
                  std::optional<std::size_t> victim = std::nullopt,
                  std::optional<Digest> mask = std::nullopt) {
  Scenario s;
  s.protocol = protocol;
  s.n = n;
  s.seed = seed;
  if (victim) s.attack = AttackSpec{*victim, mask ? *mask : seed_mask(seed)};
  return s;
}

bool all_group_fps_equal(const Transcript &t) {
  for (const auto &[id, out] : t.outcomes) {
    if (!out.group_key_fp || *out.group_key_fp != *t.outcomes[0].second.group_key_fp) {
      return false;
    }
  }
  return true;
}

// 1. Honest agreement: n in {3,4,5,8}, 50 seeds, all parties equal keys, < 1 s.
bool criterion_honest_agreement(std::string &detail) {
  auto start = std::chrono::steady_clock::now();
  std::size_t runs = 0;
  for (std::size_t n : {3u, 4u, 5u, 8u}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Transcript t = run_scenario(scenario("mbd-p", n, seed));
      if (t.classification != "agreement" || !all_group_fps_equal(t)) {
        detail = "disagreement at n=" + std::to_string(n) + " seed " + std::to_string(seed);
        return false;
      }
      ++runs;
    }
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  detail = std::to_string(runs) + " runs in " + std::to_string(ms) + " ms";
  return ms < 1000;
}

// 2. Chain recovery equals the direct token oracle: n=3 exhaustively over all
// 10^3 exponent tuples, n in {4,5} sampled.
bool criterion_chain_recovery(std::string &detail) {
  std::size_t checked = 0;
  auto check_tuple = [&](std::size_t n, const std::vector<int> &exps) {
    auto s = make_session(n, Variant::Original, 4000 + checked, exps);
    run_round2(s);
    std::vector<Digest> zs;
    for (const auto &m : s.r2) zs.push_back(m.z);
    std::vector<Digest> expected = direct_edge_tokens(s, s.states[0].sid);
    for (std::size_t i = 0; i < n; ++i) {
      if (recover_chain(s.states[i].left_token, i, zs) != expected) return false;
    }
    ++checked;
    return true;
  };

  for (int a = 1; a <= 10; ++a) {
    for (int b = 1; b <= 10; ++b) {
      for (int c = 1; c <= 10; ++c) {
        if (!check_tuple(3, {a, b, c})) {
          detail = "mismatch at exponents " + std::to_string(a) + "," + std::to_string(b) + "," +
                   std::to_string(c);
          return false;
        }
      }
    }
  }
  SeededSource rng(2024);
  for (std::size_t n : {4u, 5u}) {
    for (int trial = 0; trial < 150; ++trial) {
      std::vector<int> exps;
      for (std::size_t i = 0; i < n; ++i) {
        exps.push_back(static_cast<int>(random_scalar(GroupParams::preset("toy"), rng).value));
      }
      if (!check_tuple(n, exps)) {
        detail = "mismatch in sampled n=" + std::to_string(n) + " run";
        return false;
      }
    }
  }
  detail = std::to_string(checked) + " exponent tuples, zero mismatches";
  return true;
}

// 3. Telescoping: sum of z values is zero in every honest group and subgroup run.
bool criterion_telescoping(std::string &detail) {
  std::size_t checked = 0;
  for (std::size_t n : {3u, 4u, 5u, 6u}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto s = make_session(n, Variant::Original, 5000 + 100 * n + seed);
      run_round2(s);
      Digest sum = zero_digest();
      for (const auto &m : s.r2) sum = xor_digest(sum, m.z);
      if (sum != zero_digest()) {
        detail = "group run n=" + std::to_string(n) + " seed " + std::to_string(seed);
        return false;
      }
      ++checked;
      if (n >= 4) {
        std::vector<std::string> spid(s.ids.begin(), s.ids.end() - 1);
        Digest sub_sum = zero_digest();
        for (std::size_t i = 0; i + 1 < n; ++i) {
          auto [st, msg] = subgroup_round1(s.states[i], spid, Variant::Original, *s.rngs[i]);
          sub_sum = xor_digest(sub_sum, msg.z);
        }
        if (sub_sum != zero_digest()) {
          detail = "subgroup run n=" + std::to_string(n) + " seed " + std::to_string(seed);
          return false;
        }
        ++checked;
      }
    }
  }
  detail = std::to_string(checked) + " honest runs, all sums zero";
  return true;
}

// 4. Attack reproduction on mBD+P: split outcome in 100% of seeded runs, keys
// matching predict_divergence bit-exactly.
bool criterion_attack_group(std::string &detail) {
  std::size_t runs = 0;
  for (std::size_t n : {4u, 5u, 8u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto s = make_session(n, Variant::Original, 6000 + 1000 * n + seed);
      std::size_t victim = seed % n;
      AdversaryConfig cfg{victim, seed_mask(seed + 1)};
      run_round2_with_insiders(s, cfg);

      Digest sum = zero_digest();
      for (const auto &m : s.r2) sum = xor_digest(sum, m.z);
      bool sigs_ok = true;
      for (const auto &m : s.r2) {
        sigs_ok = sigs_ok && verify(s.registry.lookup(m.sender),
                                    round2_signed_bytes(m.sender, m.z, s.states[0].sid), m.sig,
                                    s.params);
      }
      run_group_keys(s, &cfg);

      std::vector<Scalar> exponents;
      for (const auto &st : s.states) exponents.push_back(st.exponent);
      const Bytes &sid = s.states[0].sid;
      DivergencePrediction pred =
          predict_divergence(s.params, exponents, cfg, sid, sid, Stage::Group);

      bool ok = sum == zero_digest() && sigs_ok;
      for (std::size_t i = 0; i < n && ok; ++i) {
        ok = s.states[i].phase == Phase::KeyComputed &&
             *s.states[i].key == (i == victim ? pred.victim_key : pred.honest_key);
      }
      ok = ok && pred.victim_key != pred.honest_key;
      if (!ok) {
        detail = "n=" + std::to_string(n) + " seed " + std::to_string(seed);
        return false;
      }
      ++runs;
    }
  }
  detail = std::to_string(runs) + " attack runs, all split as predicted";
  return true;
}

// 5. Same adversary on the mBD+S subgroup stage.
bool criterion_attack_subgroup(std::string &detail) {
  std::size_t runs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 5, m = 4;
    auto s = make_session(n, Variant::Original, 7000 + seed);
    run_round2(s);
    run_group_keys(s);
    std::vector<std::string> spid(s.ids.begin(), s.ids.end() - 1);
    std::size_t victim = seed % m;
    AdversaryConfig cfg{victim, seed_mask(seed + 2)};

    std::vector<Round2Msg> sub_msgs;
    std::vector<ParticipantState> members;
    for (std::size_t k = 0; k < m; ++k) {
      auto [st, msg] = cfg.is_insider(k, m)
                           ? malicious_subgroup_round1(s.states[k], cfg, spid,
                                                       Variant::Original, *s.rngs[k])
                           : subgroup_round1(s.states[k], spid, Variant::Original, *s.rngs[k]);
      members.push_back(st);
      sub_msgs.push_back(msg);
    }
    for (std::size_t k = 0; k < m; ++k) {
      members[k] = cfg.is_insider(k, m)
                       ? insider_compute_subgroup_key(members[k], cfg, sub_msgs, s.registry)
                       : compute_subgroup_key(members[k], sub_msgs, s.registry);
    }

    std::vector<Scalar> exponents;
    for (const auto &st : members) exponents.push_back(st.exponent);
    DivergencePrediction pred = predict_divergence(s.params, exponents, cfg, s.states[0].sid,
                                                   members[0].sub->ssid, Stage::Subgroup);
    bool ok = pred.victim_key != pred.honest_key;
    for (std::size_t k = 0; k < m && ok; ++k) {
      ok = members[k].sub->phase == Phase::KeyComputed &&
           *members[k].sub->key == (k == victim ? pred.victim_key : pred.honest_key);
    }
    if (!ok) {
      detail = "seed " + std::to_string(seed);
      return false;
    }
    ++runs;
  }
  detail = std::to_string(runs) + " subgroup attack runs, all split as predicted";
  return true;
}

// 6. Countermeasure: hardened variants abort on attack in 100% of runs and
// never abort on honest runs.
bool criterion_countermeasure(std::string &detail) {
  for (const std::string &protocol : {std::string("mbd-p-kc"), std::string("mbd-s-kc")}) {
    std::size_t stage_size = protocol == "mbd-p-kc" ? 5u : 4u;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::size_t victim = 1 + seed % stage_size;
      Transcript attack = run_scenario(scenario(protocol, 5, seed, victim));
      if (attack.classification != "abort-detected") {
        detail = protocol + " attack seed " + std::to_string(seed) + " classified " +
                 attack.classification;
        return false;
      }
      Transcript honest = run_scenario(scenario(protocol, 5, seed));
      if (honest.classification != "agreement") {
        detail = protocol + " honest seed " + std::to_string(seed) + " classified " +
                 honest.classification;
        return false;
      }
    }
  }
  detail = "200 attack runs detected, 200 honest runs accepted";
  return true;
}

// 7. P2P stage: symmetric pairwise keys, all distinct from the group key.
bool criterion_p2p(std::string &detail) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = make_session(5, Variant::Original, 8000 + seed);
    run_round2(s);
    run_group_keys(s);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        if (i == j) continue;
        P2PKey a = p2p_key(s.states[i], s.ids[j]);
        P2PKey b = p2p_key(s.states[j], s.ids[i]);
        if (a.key != b.key || a.key == *s.states[i].key) {
          detail = "pair " + s.ids[i] + "," + s.ids[j] + " seed " + std::to_string(seed);
          return false;
        }
      }
    }
  }
  detail = "all pairs symmetric and distinct from the group key over 20 seeds";
  return true;
}

// 8. Determinism plus mutation sweep over signed fields.
bool criterion_determinism(std::string &detail) {
  for (const Scenario &s :
       {scenario("mbd-p", 5, 42), scenario("mbd-p-kc", 5, 42), scenario("mbd-s-kc", 5, 42, 2),
        scenario("mbd-p", 5, 42, 2)}) {
    if (serialize_transcript(run_scenario(s)) != serialize_transcript(run_scenario(s))) {
      detail = "rerun of " + s.protocol + " differs";
      return false;
    }
  }

  std::size_t mutations = 0;
  for (const Scenario &s : {scenario("mbd-p-kc", 5, 42), scenario("mbd-p", 5, 42, 2)}) {
    Transcript t = run_scenario(s);
    if (!verify_transcript(t).ok) {
      detail = "verify rejected an unmodified transcript";
      return false;
    }
    for (std::size_t ri = 0; ri < t.rounds.size(); ++ri) {
      if (t.rounds[ri].name == "round1") continue;  // y values are not signed fields
      for (std::size_t mi = 0; mi < t.rounds[ri].messages.size(); ++mi) {
        WireMsg orig = parse_message(t.rounds[ri].messages[mi]);
        for (std::size_t byte = 0; byte < orig.fields[0].size(); ++byte) {
          WireMsg mutated = orig;
          mutated.fields[0][byte] ^= 0x01;
          Transcript tm = t;
          tm.rounds[ri].messages[mi] = serialize_wire(mutated);
          if (verify_transcript(tm).ok) {
            detail = "mutation in " + t.rounds[ri].name + "/" + orig.sender + " byte " +
                     std::to_string(byte) + " not rejected";
            return false;
          }
          ++mutations;
        }
      }
    }
  }
  detail = std::to_string(mutations) + " single-byte mutations all rejected";
  return true;
}

// 9. Neutrality: a zero-mask attack reproduces the honest run byte-for-byte
// (everything except the scenario echo, which records the request).
bool criterion_neutrality(std::string &detail) {
  Scenario honest = scenario("mbd-p", 5, 42);
  Scenario masked = scenario("mbd-p", 5, 42, 2, zero_digest());
  auto strip = [](const Transcript &t) {
    OrderedJson j = OrderedJson::parse(serialize_transcript(t));
    j.erase("scenario");
    return j.dump();
  };
  if (strip(run_scenario(honest)) != strip(run_scenario(masked))) {
    detail = "zero-mask attack transcript differs from the honest transcript";
    return false;
  }
  detail = "identical messages, outcomes and fingerprints";
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"1. honest agreement (n in {3,4,5,8}, 50 seeds, <1s)", criterion_honest_agreement},
      {"2. chain recovery equals direct token oracle", criterion_chain_recovery},
      {"3. telescoping XOR sum is zero in honest runs", criterion_telescoping},
      {"4. group-stage attack reproduction (n in {4,5,8}, 100 seeds)", criterion_attack_group},
      {"5. subgroup-stage attack reproduction (100 seeds)", criterion_attack_subgroup},
      {"6. key-confirmation countermeasure (100 seeds, no false positives)",
       criterion_countermeasure},
      {"7. p2p symmetry and separation from the group key", criterion_p2p},
      {"8. transcript determinism and mutation rejection", criterion_determinism},
      {"9. zero-mask neutrality", criterion_neutrality},
  };

  int failures = 0;
  for (auto &c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS  " : "FAIL  ") << c.name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures;
}
