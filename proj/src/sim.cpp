#include "gkex/sim.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>

#include "gkex/errors.hpp"

namespace gkex {

namespace {

const std::vector<std::string> kProtocols = {"mbd-p", "mbd-s", "mbd-p-kc", "mbd-s-kc"};

std::vector<std::string> roster_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) ids.push_back("U" + std::to_string(i));
  return ids;
}

bool mask_is_zero(const Digest &mask) {
  return std::all_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace

bool is_subgroup_protocol(const std::string &protocol) {
  return protocol == "mbd-s" || protocol == "mbd-s-kc";
}

bool is_kc_protocol(const std::string &protocol) {
  return protocol == "mbd-p-kc" || protocol == "mbd-s-kc";
}

std::vector<std::size_t> effective_subgroup(const Scenario &s) {
  if (!s.subgroup.empty()) {
    std::vector<std::size_t> out;
    for (std::size_t i : s.subgroup) out.push_back(i - 1);
    return out;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < s.n; ++i) out.push_back(i);
  return out;
}

void validate_scenario(const Scenario &s) {
  std::vector<std::string> diags;
  if (std::find(kProtocols.begin(), kProtocols.end(), s.protocol) == kProtocols.end()) {
    diags.push_back("protocol: must be one of mbd-p, mbd-s, mbd-p-kc, mbd-s-kc");
  }
  if (s.n < 3) diags.push_back("n: at least 3 parties required");
  if (s.group_preset != "toy" && s.group_preset != "modp-2048") {
    diags.push_back("group: must be 'toy' or 'modp-2048'");
  }

  bool sub_proto = is_subgroup_protocol(s.protocol);
  if (!s.subgroup.empty() && !sub_proto) {
    diags.push_back("subgroup: only valid for mbd-s / mbd-s-kc");
  }
  std::size_t stage_size = s.n;
  if (sub_proto && s.n >= 3) {
    auto members = effective_subgroup(s);
    std::set<std::size_t> seen;
    for (std::size_t i : members) {
      if (i >= s.n) diags.push_back("subgroup: index " + std::to_string(i + 1) + " out of range");
      if (!seen.insert(i).second) diags.push_back("subgroup: duplicate member");
    }
    if (members.size() < 3) diags.push_back("subgroup: at least 3 members required");
    if (members.size() >= s.n) diags.push_back("subgroup: must be a proper subset of the roster");
    stage_size = members.size();
  }

  if (s.attack) {
    if (s.attack->victim < 1 || s.attack->victim > stage_size) {
      diags.push_back("attack.victim: index out of range for the attacked stage");
    }
    if (s.attack->mask.size() != kDigestBytes) {
      diags.push_back("attack.rmask: must be " + std::to_string(kDigestBytes) + " bytes");
    }
  }

  if (!diags.empty()) {
    std::string what;
    for (const auto &d : diags) what += (what.empty() ? "" : "; ") + d;
    throw Error(ErrorCode::InvalidScenario, what);
  }
}

std::string expected_classification(const Scenario &s) {
  if (!s.attack || mask_is_zero(s.attack->mask)) return "agreement";
  return is_kc_protocol(s.protocol) ? "abort-detected" : "victim-divergence";
}

void BroadcastBus::open_round(const std::string &name,
                              const std::vector<std::string> &expected_senders) {
  if (round_open_) throw std::logic_error("previous round still open");
  expected_ = expected_senders;
  pending_.clear();
  log_.push_back(RoundRecord{name, {}});
  round_open_ = true;
}

void BroadcastBus::submit(const Bytes &message) {
  if (!round_open_) throw std::logic_error("no open round");
  WireMsg m = parse_message(message);
  if (std::find(expected_.begin(), expected_.end(), m.sender) == expected_.end()) {
    throw std::logic_error("unexpected sender " + m.sender);
  }
  if (!pending_.emplace(m.sender, message).second) {
    throw std::logic_error("duplicate broadcast from " + m.sender);
  }
}

std::vector<Bytes> BroadcastBus::deliver() {
  if (!round_open_) throw std::logic_error("no open round");
  if (pending_.size() != expected_.size()) {
    throw std::logic_error("round incomplete: delivery before all parties broadcast");
  }
  std::vector<Bytes> out;
  for (const auto &id : expected_) out.push_back(pending_.at(id));
  log_.back().messages = out;
  round_open_ = false;
  return out;
}

std::uint64_t derive_party_seed(std::uint64_t master_seed, std::size_t party_index) {
  Bytes input = to_bytes("gkex-party-seed");
  for (int i = 7; i >= 0; --i) input.push_back(static_cast<std::uint8_t>(master_seed >> (8 * i)));
  append_u32(input, static_cast<std::uint32_t>(party_index));
  Digest d = sha256_bytes(input);
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | d[static_cast<std::size_t>(i)];
  return out;
}

std::string key_fingerprint(const Digest &key) {
  return to_hex(oracle_eval(OracleTag::Hkc, {to_bytes("fp"), key}));
}

Transcript run_scenario(const Scenario &s) {
  validate_scenario(s);
  GroupParams params = GroupParams::preset(s.group_preset);
  std::vector<std::string> ids = roster_ids(s.n);
  Roster roster(ids);

  std::vector<std::unique_ptr<SeededSource>> rngs;
  std::vector<SigningKey> signing_keys;
  Registry registry;
  Transcript t;
  t.scenario = s;
  for (std::size_t i = 0; i < s.n; ++i) {
    rngs.push_back(std::make_unique<SeededSource>(derive_party_seed(s.seed, i)));
    auto [sk, vk] = keypair(params, *rngs[i]);
    signing_keys.push_back(sk);
    registry.add(ids[i], vk);
    t.registry.emplace_back(ids[i], encode_element(vk.vk, params));
  }

  AdversaryConfig cfg;
  if (s.attack) cfg = AdversaryConfig{s.attack->victim - 1, s.attack->mask};
  bool group_attack = s.attack.has_value() && !is_subgroup_protocol(s.protocol);
  bool sub_attack = s.attack.has_value() && is_subgroup_protocol(s.protocol);
  Variant group_variant =
      s.protocol == "mbd-p-kc" ? Variant::KeyConfirm : Variant::Original;

  BroadcastBus bus;
  std::vector<ParticipantState> states;

  // Round 1
  bus.open_round("round1", ids);
  for (std::size_t i = 0; i < s.n; ++i) {
    auto [st, msg] = start_session(ids[i], roster, params, group_variant, signing_keys[i],
                                   *rngs[i]);
    states.push_back(st);
    bus.submit(serialize_message(msg, params));
  }
  std::vector<Round1Msg> r1;
  for (const Bytes &b : bus.deliver()) r1.push_back(to_round1(parse_message(b), params));

  // Round 2 (insiders mask their z in mbd-p attack runs)
  bus.open_round("round2", ids);
  for (std::size_t i = 0; i < s.n; ++i) {
    std::pair<ParticipantState, Round2Msg> step =
        group_attack && cfg.is_insider(i, s.n)
            ? malicious_round2(states[i], cfg, r1, *rngs[i])
            : on_round1_complete(states[i], r1, *rngs[i]);
    states[i] = step.first;
    bus.submit(serialize_message(step.second, params));
  }
  std::vector<Round2Msg> r2;
  for (const Bytes &b : bus.deliver()) r2.push_back(to_round2(parse_message(b), params));

  for (std::size_t i = 0; i < s.n; ++i) {
    states[i] = group_attack && cfg.is_insider(i, s.n)
                    ? insider_compute_group_key(states[i], cfg, r2, registry)
                    : compute_group_key(states[i], r2, registry);
  }

  // Group-stage key confirmation
  if (group_variant == Variant::KeyConfirm &&
      std::all_of(states.begin(), states.end(),
                  [](const ParticipantState &st) { return st.phase == Phase::KeyComputed; })) {
    bus.open_round("kc", ids);
    for (std::size_t i = 0; i < s.n; ++i) {
      auto [st, msg] = kc_message(states[i], *rngs[i]);
      states[i] = st;
      bus.submit(serialize_message(msg, params));
    }
    std::vector<KCMsg> kcs;
    for (const Bytes &b : bus.deliver()) kcs.push_back(to_kc(parse_message(b), params));
    for (std::size_t i = 0; i < s.n; ++i) states[i] = finalize_kc(states[i], kcs, registry);
  }

  // Subgroup stage
  if (is_subgroup_protocol(s.protocol)) {
    std::vector<std::size_t> members = effective_subgroup(s);
    std::vector<std::string> spid;
    for (std::size_t i : members) spid.push_back(ids[i]);
    Variant sub_variant =
        s.protocol == "mbd-s-kc" ? Variant::KeyConfirm : Variant::Original;

    bus.open_round("sub-round1", spid);
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::size_t i = members[k];
      std::pair<ParticipantState, Round2Msg> step =
          sub_attack && cfg.is_insider(k, members.size())
              ? malicious_subgroup_round1(states[i], cfg, spid, sub_variant, *rngs[i])
              : subgroup_round1(states[i], spid, sub_variant, *rngs[i]);
      states[i] = step.first;
      bus.submit(serialize_message(step.second, params));
    }
    std::vector<Round2Msg> sub_r;
    for (const Bytes &b : bus.deliver()) sub_r.push_back(to_round2(parse_message(b), params));
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::size_t i = members[k];
      states[i] = sub_attack && cfg.is_insider(k, members.size())
                      ? insider_compute_subgroup_key(states[i], cfg, sub_r, registry)
                      : compute_subgroup_key(states[i], sub_r, registry);
    }

    if (sub_variant == Variant::KeyConfirm &&
        std::all_of(members.begin(), members.end(), [&](std::size_t i) {
          return states[i].sub->phase == Phase::KeyComputed;
        })) {
      bus.open_round("sub-kc", spid);
      for (std::size_t i : members) {
        auto [st, msg] = subgroup_kc_message(states[i], *rngs[i]);
        states[i] = st;
        bus.submit(serialize_message(msg, params));
      }
      std::vector<KCMsg> kcs;
      for (const Bytes &b : bus.deliver()) kcs.push_back(to_kc(parse_message(b), params));
      for (std::size_t i : members) states[i] = finalize_subgroup_kc(states[i], kcs, registry);
    }
  }

  t.rounds = bus.log();
  for (std::size_t i = 0; i < s.n; ++i) {
    const ParticipantState &st = states[i];
    PartyOutcome out;
    out.phase = phase_name(st.phase);
    if (st.abort) {
      out.abort_reason = abort_reason_name(st.abort->reason);
      if (!st.abort->offender.empty()) out.abort_offender = st.abort->offender;
    }
    if (st.key && st.phase != Phase::Aborted) out.group_key_fp = key_fingerprint(*st.key);
    if (st.sub) {
      out.sub_phase = phase_name(st.sub->phase);
      if (st.sub->abort) out.sub_abort_reason = abort_reason_name(st.sub->abort->reason);
      if (st.sub->key && st.sub->phase != Phase::Aborted) {
        out.subgroup_key_fp = key_fingerprint(*st.sub->key);
      }
    }
    t.outcomes.emplace_back(ids[i], out);
  }
  t.classification = check_agreement(t).classification;
  return t;
}

OutcomeReport check_agreement(const Transcript &t) {
  const Scenario &s = t.scenario;
  bool sub_proto = is_subgroup_protocol(s.protocol);
  std::vector<std::string> ids = roster_ids(s.n);
  std::vector<std::string> members;
  if (sub_proto) {
    for (std::size_t i : effective_subgroup(s)) members.push_back(ids[i]);
  } else {
    members = ids;
  }

  std::map<std::string, const PartyOutcome *> by_id;
  for (const auto &[id, out] : t.outcomes) by_id[id] = &out;

  std::map<std::string, std::string> aborts;          // member -> reason
  std::map<std::string, std::vector<std::string>> fps;  // fingerprint -> members
  for (const auto &id : members) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::MalformedTranscript, "no outcome recorded for " + id);
    }
    const PartyOutcome &out = *it->second;
    const auto &phase = sub_proto ? out.sub_phase : std::optional<std::string>(out.phase);
    const auto &abort = sub_proto ? out.sub_abort_reason : out.abort_reason;
    const auto &fp = sub_proto ? out.subgroup_key_fp : out.group_key_fp;
    if (!phase) throw Error(ErrorCode::MalformedTranscript, "no stage outcome for " + id);
    if (*phase == "Aborted") {
      aborts[id] = abort.value_or("unknown");
    } else if (fp) {
      fps[*fp].push_back(id);
    }
  }

  std::set<std::string> honest(members.begin(), members.end());
  if (s.attack) {
    AdversaryConfig cfg{s.attack->victim - 1, s.attack->mask};
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (cfg.is_insider(k, members.size())) honest.erase(members[k]);
    }
  }

  OutcomeReport report;
  report.evidence = OrderedJson::object();
  OrderedJson fp_json = OrderedJson::object();
  for (const auto &[fp, who] : fps) fp_json[fp] = who;
  report.evidence["fingerprints"] = fp_json;
  report.evidence["aborts"] = aborts;

  std::size_t keyed = 0;
  for (const auto &[fp, who] : fps) keyed += who.size();

  if (aborts.empty() && keyed == members.size() && fps.size() == 1) {
    report.classification = "agreement";
  } else if (aborts.empty() && keyed == members.size() && fps.size() == 2) {
    auto it = fps.begin();
    std::size_t a = it->second.size();
    std::size_t b = std::next(it)->second.size();
    bool split = (a == 1 && b == members.size() - 1) || (b == 1 && a == members.size() - 1);
    report.classification = split && members.size() >= 3 ? "victim-divergence" : "unexpected";
  } else if (!honest.empty() &&
             std::all_of(honest.begin(), honest.end(), [&](const std::string &id) {
               auto it = aborts.find(id);
               return it != aborts.end() && it->second == "ConfirmationMismatch";
             })) {
    report.classification = "abort-detected";
  } else {
    report.classification = "unexpected";
  }
  return report;
}

namespace {

const RoundRecord *find_round(const Transcript &t, const std::string &name) {
  for (const auto &r : t.rounds) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

}  // namespace

VerifyResult verify_transcript(const Transcript &t) {
  VerifyResult res;
  auto diag = [&](const std::string &msg) { res.diagnostics.push_back(msg); };

  GroupParams params;
  try {
    validate_scenario(t.scenario);
    params = GroupParams::preset(t.scenario.group_preset);
  } catch (const Error &e) {
    throw Error(ErrorCode::MalformedTranscript, e.what());
  }
  std::vector<std::string> ids = roster_ids(t.scenario.n);

  Registry registry;
  for (const auto &[id, vk_bytes] : t.registry) {
    try {
      registry.add(id, VerifyKey{validate_element(vk_bytes, params)});
    } catch (const Error &e) {
      throw Error(ErrorCode::MalformedTranscript, std::string("registry entry ") + id + ": " +
                                                      e.what());
    }
  }

  const RoundRecord *r1 = find_round(t, "round1");
  if (!r1 || r1->messages.size() != ids.size()) {
    throw Error(ErrorCode::MalformedTranscript, "round1 record missing or incomplete");
  }
  std::vector<Element> ys;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    try {
      Round1Msg m = to_round1(parse_message(r1->messages[i]), params);
      if (m.sender != ids[i]) diag("round1/" + ids[i] + ": out-of-order sender " + m.sender);
      ys.push_back(m.y);
    } catch (const Error &e) {
      throw Error(ErrorCode::MalformedTranscript, "round1/" + ids[i] + ": " + e.what());
    }
  }
  Bytes sid = encode_session_id(ids, ys, params);

  auto check_round2_style = [&](const RoundRecord &rec, const std::vector<std::string> &members,
                                const Bytes &context) {
    Digest sum = zero_digest();
    for (std::size_t i = 0; i < rec.messages.size(); ++i) {
      try {
        Round2Msg m = to_round2(parse_message(rec.messages[i]), params);
        sum = xor_digest(sum, m.z);
        if (!verify(registry.lookup(m.sender), round2_signed_bytes(m.sender, m.z, context),
                    m.sig, params)) {
          diag(rec.name + "/" + m.sender + ": signature invalid");
        }
      } catch (const Error &e) {
        throw Error(ErrorCode::MalformedTranscript,
                    rec.name + "/" + members[i] + ": " + e.what());
      }
    }
    if (sum != zero_digest()) diag(rec.name + ": XOR sum of z values is nonzero");
  };

  auto check_kc_style = [&](const RoundRecord &rec, const Bytes &context) {
    for (const Bytes &raw : rec.messages) {
      try {
        KCMsg m = to_kc(parse_message(raw), params);
        if (!verify(registry.lookup(m.sender),
                    kc_signed_bytes(m.sender, m.confirmation, context), m.sig, params)) {
          diag(rec.name + "/" + m.sender + ": signature invalid");
        }
      } catch (const Error &e) {
        throw Error(ErrorCode::MalformedTranscript, rec.name + ": " + e.what());
      }
    }
  };

  if (const RoundRecord *r2 = find_round(t, "round2")) {
    if (r2->messages.size() != ids.size()) {
      throw Error(ErrorCode::MalformedTranscript, "round2 record incomplete");
    }
    check_round2_style(*r2, ids, sid);
  }
  if (const RoundRecord *kc = find_round(t, "kc")) check_kc_style(*kc, sid);

  if (is_subgroup_protocol(t.scenario.protocol)) {
    std::vector<std::size_t> members = effective_subgroup(t.scenario);
    std::vector<std::string> spid;
    std::vector<Element> sub_ys;
    for (std::size_t i : members) {
      spid.push_back(ids[i]);
      sub_ys.push_back(ys[i]);
    }
    Bytes ssid = encode_session_id(spid, sub_ys, params);
    if (const RoundRecord *sr = find_round(t, "sub-round1")) {
      if (sr->messages.size() != spid.size()) {
        throw Error(ErrorCode::MalformedTranscript, "sub-round1 record incomplete");
      }
      check_round2_style(*sr, spid, ssid);
    }
    if (const RoundRecord *skc = find_round(t, "sub-kc")) check_kc_style(*skc, ssid);
  }

  res.ok = res.diagnostics.empty();
  return res;
}

// ---- JSON (de)serialization ----

OrderedJson scenario_to_json(const Scenario &s) {
  OrderedJson j;
  j["protocol"] = s.protocol;
  j["n"] = s.n;
  j["group"] = s.group_preset;
  j["seed"] = s.seed;
  if (!s.subgroup.empty()) j["subgroup"] = s.subgroup;
  if (s.attack) {
    j["attack"] = OrderedJson{{"victim", s.attack->victim}, {"rmask", to_hex(s.attack->mask)}};
  }
  return j;
}

Scenario scenario_from_json(const OrderedJson &j) {
  try {
    Scenario s;
    s.protocol = j.at("protocol").get<std::string>();
    s.n = j.at("n").get<std::size_t>();
    s.group_preset = j.at("group").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("subgroup")) s.subgroup = j.at("subgroup").get<std::vector<std::size_t>>();
    if (j.contains("attack")) {
      AttackSpec a;
      a.victim = j.at("attack").at("victim").get<std::size_t>();
      a.mask = from_hex(j.at("attack").at("rmask").get<std::string>());
      s.attack = a;
    }
    return s;
  } catch (const std::exception &e) {
    throw Error(ErrorCode::MalformedTranscript, std::string("scenario: ") + e.what());
  }
}

std::string serialize_transcript(const Transcript &t) {
  OrderedJson j;
  j["schema"] = t.schema;
  j["scenario"] = scenario_to_json(t.scenario);
  OrderedJson reg = OrderedJson::array();
  for (const auto &[id, vk] : t.registry) {
    reg.push_back(OrderedJson{{"id", id}, {"vk", to_hex(vk)}});
  }
  j["registry"] = reg;
  OrderedJson rounds = OrderedJson::array();
  for (const auto &r : t.rounds) {
    OrderedJson msgs = OrderedJson::array();
    for (const Bytes &m : r.messages) {
      msgs.push_back(OrderedJson{{"sender", parse_message(m).sender}, {"data", to_hex(m)}});
    }
    rounds.push_back(OrderedJson{{"name", r.name}, {"messages", msgs}});
  }
  j["rounds"] = rounds;
  OrderedJson outs = OrderedJson::array();
  for (const auto &[id, out] : t.outcomes) {
    OrderedJson o;
    o["id"] = id;
    o["phase"] = out.phase;
    if (out.abort_reason) o["abort"] = *out.abort_reason;
    if (out.abort_offender) o["abort_offender"] = *out.abort_offender;
    if (out.group_key_fp) o["group_key_fp"] = *out.group_key_fp;
    if (out.sub_phase) o["sub_phase"] = *out.sub_phase;
    if (out.sub_abort_reason) o["sub_abort"] = *out.sub_abort_reason;
    if (out.subgroup_key_fp) o["subgroup_key_fp"] = *out.subgroup_key_fp;
    outs.push_back(o);
  }
  j["outcomes"] = outs;
  j["classification"] = t.classification;
  j["meta"] = OrderedJson{{"generator", "gkex 0.1.0"}};
  return j.dump(2) + "\n";
}

Transcript parse_transcript(const std::string &text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text);
  } catch (const std::exception &e) {
    throw Error(ErrorCode::MalformedTranscript, std::string("not valid JSON: ") + e.what());
  }
  try {
    Transcript t;
    t.schema = j.at("schema").get<std::string>();
    if (t.schema != "gkex-transcript-v1") {
      throw Error(ErrorCode::MalformedTranscript, "unknown schema tag " + t.schema);
    }
    t.scenario = scenario_from_json(j.at("scenario"));
    for (const auto &entry : j.at("registry")) {
      t.registry.emplace_back(entry.at("id").get<std::string>(),
                              from_hex(entry.at("vk").get<std::string>()));
    }
    for (const auto &r : j.at("rounds")) {
      RoundRecord rec;
      rec.name = r.at("name").get<std::string>();
      for (const auto &m : r.at("messages")) {
        rec.messages.push_back(from_hex(m.at("data").get<std::string>()));
      }
      t.rounds.push_back(rec);
    }
    for (const auto &o : j.at("outcomes")) {
      PartyOutcome out;
      out.phase = o.at("phase").get<std::string>();
      if (o.contains("abort")) out.abort_reason = o.at("abort").get<std::string>();
      if (o.contains("abort_offender")) {
        out.abort_offender = o.at("abort_offender").get<std::string>();
      }
      if (o.contains("group_key_fp")) out.group_key_fp = o.at("group_key_fp").get<std::string>();
      if (o.contains("sub_phase")) out.sub_phase = o.at("sub_phase").get<std::string>();
      if (o.contains("sub_abort")) out.sub_abort_reason = o.at("sub_abort").get<std::string>();
      if (o.contains("subgroup_key_fp")) {
        out.subgroup_key_fp = o.at("subgroup_key_fp").get<std::string>();
      }
      t.outcomes.emplace_back(o.at("id").get<std::string>(), out);
    }
    t.classification = j.at("classification").get<std::string>();
    return t;
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw Error(ErrorCode::MalformedTranscript, e.what());
  }
}

}  // namespace gkex
