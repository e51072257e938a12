#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gkex/errors.hpp"
#include "gkex/sim.hpp"

using namespace gkex;

namespace {

Scenario honest_mbdp(std::size_t n, std::uint64_t seed) {
  Scenario s;
  s.protocol = "mbd-p";
  s.n = n;
  s.seed = seed;
  return s;
}

Scenario attacked(const std::string &protocol, std::size_t n, std::size_t victim,
                  std::uint64_t seed, std::uint8_t fill = 0x5c) {
  Scenario s;
  s.protocol = protocol;
  s.n = n;
  s.seed = seed;
  s.attack = AttackSpec{victim, Digest(kDigestBytes, fill)};
  return s;
}

}  // namespace

TEST_CASE("honest mbd-p run agrees at all parties") {
  Transcript t = run_scenario(honest_mbdp(5, 42));
  CHECK(t.classification == "agreement");
  REQUIRE(t.outcomes.size() == 5);
  for (const auto &[id, out] : t.outcomes) {
    CHECK(out.phase == "KeyComputed");
    CHECK(out.group_key_fp == t.outcomes[0].second.group_key_fp);
  }
}

TEST_CASE("mbd-p attack run classifies as victim-divergence") {
  Transcript t = run_scenario(attacked("mbd-p", 5, 2, 42));
  CHECK(t.classification == "victim-divergence");
  for (const auto &[id, out] : t.outcomes) CHECK(out.phase == "KeyComputed");
  CHECK(*t.outcomes[1].second.group_key_fp != *t.outcomes[0].second.group_key_fp);
  CHECK(*t.outcomes[2].second.group_key_fp == *t.outcomes[0].second.group_key_fp);
}

TEST_CASE("mbd-p-kc attack run aborts everywhere with ConfirmationMismatch") {
  Transcript t = run_scenario(attacked("mbd-p-kc", 5, 2, 42));
  CHECK(t.classification == "abort-detected");
  for (const auto &[id, out] : t.outcomes) {
    CHECK(out.phase == "Aborted");
    CHECK(out.abort_reason == "ConfirmationMismatch");
    CHECK_FALSE(out.group_key_fp.has_value());
  }
}

TEST_CASE("mbd-s honest and attacked subgroup runs") {
  Scenario honest;
  honest.protocol = "mbd-s";
  honest.n = 5;
  honest.seed = 9;
  Transcript t = run_scenario(honest);
  CHECK(t.classification == "agreement");
  // default subgroup is U1..U4; U5 sits out
  CHECK(t.outcomes[3].second.sub_phase == "KeyComputed");
  CHECK_FALSE(t.outcomes[4].second.sub_phase.has_value());

  Transcript ta = run_scenario(attacked("mbd-s", 5, 2, 9));
  CHECK(ta.classification == "victim-divergence");
  CHECK(*ta.outcomes[1].second.subgroup_key_fp != *ta.outcomes[0].second.subgroup_key_fp);
  // the group stage itself stays in agreement
  CHECK(*ta.outcomes[1].second.group_key_fp == *ta.outcomes[0].second.group_key_fp);
}

TEST_CASE("mbd-s-kc attack is detected in the subgroup confirmation round") {
  Transcript t = run_scenario(attacked("mbd-s-kc", 5, 2, 10));
  CHECK(t.classification == "abort-detected");
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t.outcomes[i].second.sub_phase == "Aborted");
    CHECK(t.outcomes[i].second.sub_abort_reason == "ConfirmationMismatch");
  }
}

TEST_CASE("identical scenarios reproduce transcripts byte-identically") {
  for (const Scenario &s : {honest_mbdp(4, 1), attacked("mbd-p-kc", 5, 3, 77)}) {
    std::string a = serialize_transcript(run_scenario(s));
    std::string b = serialize_transcript(run_scenario(s));
    CHECK(a == b);
  }
}

TEST_CASE("transcript round-trips through its text form") {
  Transcript t = run_scenario(attacked("mbd-s", 5, 2, 3));
  std::string text = serialize_transcript(t);
  Transcript back = parse_transcript(text);
  CHECK(serialize_transcript(back) == text);
  CHECK(check_agreement(back).classification == t.classification);
}

TEST_CASE("verify accepts honest and attack transcripts") {
  CHECK(verify_transcript(run_scenario(honest_mbdp(5, 8))).ok);
  // the attack is check-evading: signatures and XOR sum all pass
  CHECK(verify_transcript(run_scenario(attacked("mbd-p", 5, 2, 8))).ok);
  CHECK(verify_transcript(run_scenario(attacked("mbd-s-kc", 5, 2, 8))).ok);
}

TEST_CASE("verify rejects a flipped z byte and names the message") {
  Transcript t = run_scenario(honest_mbdp(4, 11));
  for (auto &round : t.rounds) {
    if (round.name != "round2") continue;
    WireMsg m = parse_message(round.messages[2]);
    m.fields[0][5] ^= 0x80;
    round.messages[2] = serialize_wire(m);
  }
  VerifyResult res = verify_transcript(t);
  CHECK_FALSE(res.ok);
  REQUIRE_FALSE(res.diagnostics.empty());
  CHECK(res.diagnostics[0].find("U3") != std::string::npos);
}

TEST_CASE("raw session keys never appear in transcript bytes") {
  // Recompute the parties' actual keys by replaying the run, then scan.
  Scenario s = honest_mbdp(4, 12);
  Transcript t = run_scenario(s);
  std::string text = serialize_transcript(t);

  GroupParams params = GroupParams::preset("toy");
  std::vector<std::string> ids;
  Registry registry;
  std::vector<SigningKey> sks;
  std::vector<std::unique_ptr<SeededSource>> rngs;
  for (std::size_t i = 0; i < s.n; ++i) {
    ids.push_back("U" + std::to_string(i + 1));
    rngs.push_back(std::make_unique<SeededSource>(derive_party_seed(s.seed, i)));
    auto [sk, vk] = keypair(params, *rngs[i]);
    sks.push_back(sk);
    registry.add(ids[i], vk);
  }
  Roster roster(ids);
  std::vector<ParticipantState> states;
  std::vector<Round1Msg> r1;
  for (std::size_t i = 0; i < s.n; ++i) {
    auto [st, m] = start_session(ids[i], roster, params, Variant::Original, sks[i], *rngs[i]);
    states.push_back(st);
    r1.push_back(m);
  }
  std::vector<Round2Msg> r2;
  for (std::size_t i = 0; i < s.n; ++i) {
    auto [st, m] = on_round1_complete(states[i], r1, *rngs[i]);
    states[i] = st;
    r2.push_back(m);
  }
  for (auto &st : states) {
    st = compute_group_key(st, r2, registry);
    REQUIRE(st.phase == Phase::KeyComputed);
    CHECK(text.find(to_hex(*st.key)) == std::string::npos);
    CHECK(t.outcomes[st.index].second.group_key_fp == key_fingerprint(*st.key));
  }
}

TEST_CASE("bus enforces round synchrony") {
  BroadcastBus bus;
  bus.open_round("round1", {"U1", "U2", "U3"});
  bus.submit(serialize_wire({kWireRound1, "U1", {Bytes{0x08}}}));
  CHECK_THROWS_AS(bus.deliver(), std::logic_error);
  bus.submit(serialize_wire({kWireRound1, "U2", {Bytes{0x08}}}));
  CHECK_THROWS_AS(bus.submit(serialize_wire({kWireRound1, "U2", {Bytes{0x08}}})),
                  std::logic_error);
  CHECK_THROWS_AS(bus.submit(serialize_wire({kWireRound1, "U9", {Bytes{0x08}}})),
                  std::logic_error);
  bus.submit(serialize_wire({kWireRound1, "U3", {Bytes{0x08}}}));
  auto delivered = bus.deliver();
  CHECK(delivered.size() == 3);
  CHECK(parse_message(delivered[0]).sender == "U1");
}

TEST_CASE("invalid scenarios carry field-level diagnostics") {
  Scenario s;
  s.protocol = "bogus";
  s.n = 2;
  CHECK_THROWS_WITH_AS(run_scenario(s),
                       doctest::Contains("protocol: must be one of"), Error);
  Scenario sub = honest_mbdp(5, 0);
  sub.subgroup = {1, 2, 3};
  CHECK_THROWS_WITH_AS(run_scenario(sub), doctest::Contains("subgroup: only valid"), Error);
  Scenario bad_victim = attacked("mbd-p", 4, 9, 0);
  CHECK_THROWS_WITH_AS(run_scenario(bad_victim), doctest::Contains("attack.victim"), Error);
}

TEST_CASE("per-party seeds differ across parties and master seeds") {
  CHECK(derive_party_seed(1, 0) != derive_party_seed(1, 1));
  CHECK(derive_party_seed(1, 0) != derive_party_seed(2, 0));
  CHECK(derive_party_seed(1, 0) == derive_party_seed(1, 0));
}
