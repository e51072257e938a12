#include "gkex/protocol.hpp"

#include <algorithm>
#include <set>

#include "gkex/errors.hpp"

namespace gkex {

namespace {

void require_phase(Phase actual, Phase expected, const char *op) {
  if (actual != expected) {
    throw Error(ErrorCode::WrongPhase,
                std::string(op) + " requires phase " + phase_name(expected) + ", state is in " +
                    phase_name(actual));
  }
}

bool sid_known(Phase p) {
  return p == Phase::SentRound2 || p == Phase::KeyComputed || p == Phase::SentKC ||
         p == Phase::Accepted;
}

/// Collects one message per expected member, in member order.
template <typename Msg>
std::vector<Msg> by_member_order(const std::vector<Msg> &msgs,
                                 const std::vector<std::string> &members, ErrorCode missing) {
  std::vector<Msg> out;
  out.reserve(members.size());
  for (const std::string &id : members) {
    auto it = std::find_if(msgs.begin(), msgs.end(),
                           [&](const Msg &m) { return m.sender == id; });
    if (it == msgs.end()) {
      throw Error(missing, "no message from " + id);
    }
    out.push_back(*it);
  }
  return out;
}

Bytes identity_y_pair(const std::string &id, const Element &y, const GroupParams &params) {
  Bytes out;
  append_prefixed(out, to_bytes(id));
  append_prefixed(out, encode_element(y, params));
  return out;
}

Digest edge_token(const Element &edge_secret, const Bytes &context, const GroupParams &params) {
  return oracle_eval(OracleTag::H, {encode_element(edge_secret, params), context});
}

struct StageKeyResult {
  std::optional<AbortInfo> abort;
  std::optional<Digest> key, kc_key;
};

/// Shared core of group and subgroup key computation: XOR-sum check,
/// signature checks, chain recovery, key derivation.
StageKeyResult stage_key(const std::vector<Round2Msg> &ordered, const Bytes &sign_context,
                         const Bytes &key_context, std::size_t pos, const Digest &left_token,
                         Variant variant, OracleTag narrow_tag, const Registry &registry,
                         const GroupParams &params) {
  StageKeyResult res;

  Digest sum = zero_digest();
  std::vector<Digest> z_by_index;
  for (const Round2Msg &m : ordered) {
    sum = xor_digest(sum, m.z);
    z_by_index.push_back(m.z);
  }
  if (sum != zero_digest()) {
    res.abort = AbortInfo{AbortReason::XorSumNonzero, ""};
    return res;
  }
  for (const Round2Msg &m : ordered) {
    Bytes signed_bytes = round2_signed_bytes(m.sender, m.z, sign_context);
    if (!verify(registry.lookup(m.sender), signed_bytes, m.sig, params)) {
      res.abort = AbortInfo{AbortReason::BadSignature, m.sender};
      return res;
    }
  }

  std::vector<Digest> tokens = recover_chain(left_token, pos, z_by_index);
  std::vector<Bytes> fields(tokens.begin(), tokens.end());
  fields.push_back(key_context);
  if (variant == Variant::Original) {
    res.key = oracle_eval(narrow_tag, fields);
  } else {
    WideDigest wide = oracle_eval_wide(fields);
    res.key = wide.left;
    res.kc_key = wide.right;
  }
  return res;
}

struct KCResult {
  bool accepted = false;
  std::optional<AbortInfo> abort;
};

KCResult finalize_kc_core(const std::vector<KCMsg> &ordered, const Bytes &context,
                          const Digest &own_confirmation, const Registry &registry,
                          const GroupParams &params) {
  KCResult res;
  for (const KCMsg &m : ordered) {
    Bytes signed_bytes = kc_signed_bytes(m.sender, m.confirmation, context);
    if (!verify(registry.lookup(m.sender), signed_bytes, m.sig, params)) {
      res.abort = AbortInfo{AbortReason::BadSignature, m.sender};
      return res;
    }
  }
  for (const KCMsg &m : ordered) {
    if (m.confirmation != own_confirmation) {
      res.abort = AbortInfo{AbortReason::ConfirmationMismatch, m.sender};
      return res;
    }
  }
  res.accepted = true;
  return res;
}

}  // namespace

const char *phase_name(Phase p) {
  switch (p) {
    case Phase::Init: return "Init";
    case Phase::SentRound1: return "SentRound1";
    case Phase::SentRound2: return "SentRound2";
    case Phase::KeyComputed: return "KeyComputed";
    case Phase::SentKC: return "SentKC";
    case Phase::Accepted: return "Accepted";
    case Phase::Aborted: return "Aborted";
  }
  return "?";
}

const char *abort_reason_name(AbortReason r) {
  switch (r) {
    case AbortReason::XorSumNonzero: return "XorSumNonzero";
    case AbortReason::BadSignature: return "BadSignature";
    case AbortReason::ConfirmationMismatch: return "ConfirmationMismatch";
  }
  return "?";
}

Roster::Roster(std::vector<std::string> ids) : ids_(std::move(ids)) {
  if (ids_.size() < 3) {
    throw Error(ErrorCode::RosterTooSmall, "group key exchange needs at least 3 parties");
  }
  std::set<std::string> seen;
  for (const auto &id : ids_) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateIdentity, id + " appears twice in roster");
    }
  }
}

std::size_t Roster::index_of(const std::string &id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) {
    throw Error(ErrorCode::IdentityNotInRoster, id);
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

bool Roster::contains(const std::string &id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

Bytes encode_session_id(const std::vector<std::string> &ids, const std::vector<Element> &ys,
                        const GroupParams &params) {
  Bytes out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Bytes pair = identity_y_pair(ids[i], ys[i], params);
    out.insert(out.end(), pair.begin(), pair.end());
  }
  return out;
}

Bytes round2_signed_bytes(const std::string &id, const Digest &z, const Bytes &context) {
  Bytes out;
  append_prefixed(out, to_bytes(id));
  append_prefixed(out, z);
  append_prefixed(out, context);
  return out;
}

Bytes kc_signed_bytes(const std::string &id, const Digest &confirmation, const Bytes &context) {
  Bytes out;
  append_prefixed(out, to_bytes(id));
  append_prefixed(out, confirmation);
  append_prefixed(out, context);
  return out;
}

std::pair<ParticipantState, Round1Msg> start_session(const std::string &identity,
                                                     const Roster &roster,
                                                     const GroupParams &params, Variant variant,
                                                     const SigningKey &signing_key,
                                                     RandomSource &rng) {
  ParticipantState st;
  st.identity = identity;
  st.index = roster.index_of(identity);
  st.roster = roster.ids();
  st.params = params;
  st.variant = variant;
  st.signing_key = signing_key;
  st.exponent = random_scalar(params, rng);
  st.phase = Phase::SentRound1;
  Element y = exp(params.generator(), st.exponent, params);
  return {st, Round1Msg{identity, y}};
}

namespace detail {

std::pair<ParticipantState, Round2Msg> round2_with_mask(const ParticipantState &state,
                                                        const std::vector<Round1Msg> &msgs,
                                                        RandomSource &rng,
                                                        const std::optional<Digest> &mask) {
  require_phase(state.phase, Phase::SentRound1, "on_round1_complete");
  std::size_t n = state.roster.size();
  auto ordered = by_member_order(msgs, state.roster, ErrorCode::MissingRound1);

  ParticipantState st = state;
  st.public_values.clear();
  for (const Round1Msg &m : ordered) {
    if (!is_valid_element(m.y.value, state.params)) {
      throw Error(ErrorCode::InvalidElement, "round-1 value from " + m.sender);
    }
    st.public_values.push_back(m.y);
  }
  st.sid = encode_session_id(st.roster, st.public_values, st.params);

  std::size_t i = st.index;
  const Element &y_prev = st.public_values[(i + n - 1) % n];
  const Element &y_next = st.public_values[(i + 1) % n];
  st.left_secret = exp(y_prev, st.exponent, st.params);
  st.right_secret = exp(y_next, st.exponent, st.params);
  st.left_token = edge_token(st.left_secret, st.sid, st.params);
  st.right_token = edge_token(st.right_secret, st.sid, st.params);
  st.own_z = xor_digest(st.left_token, st.right_token);

  Digest emitted = mask ? xor_digest(st.own_z, *mask) : st.own_z;
  Signature sig = sign(st.signing_key, round2_signed_bytes(st.identity, emitted, st.sid),
                       st.params, rng);
  st.phase = Phase::SentRound2;
  return {st, Round2Msg{st.identity, emitted, sig}};
}

std::pair<ParticipantState, Round2Msg> subgroup_round1_with_mask(
    const ParticipantState &state, const std::vector<std::string> &spid, Variant variant,
    RandomSource &rng, bool ssid_tokens, const std::optional<Digest> &mask) {
  if (!sid_known(state.phase)) {
    throw Error(ErrorCode::WrongPhase, "subgroup stage needs the group round-1 values");
  }
  std::size_t m = spid.size();
  if (m < 3) {
    throw Error(ErrorCode::SubgroupTooSmall, "subgroup needs at least 3 members");
  }
  if (m >= state.roster.size()) {
    throw Error(ErrorCode::SubgroupNotSubsetOfRoster, "spid must be a proper subset of pid");
  }
  std::set<std::string> seen;
  Roster roster(state.roster);
  for (const auto &id : spid) {
    if (!roster.contains(id)) {
      throw Error(ErrorCode::SubgroupNotSubsetOfRoster, id + " is not in the roster");
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateIdentity, id + " appears twice in spid");
    }
  }
  auto self = std::find(spid.begin(), spid.end(), state.identity);
  if (self == spid.end()) {
    throw Error(ErrorCode::NotInSubgroup, state.identity + " is not in spid");
  }

  SubgroupContext sub;
  sub.members = spid;
  sub.pos = static_cast<std::size_t>(self - spid.begin());
  sub.variant = variant;
  sub.ssid_tokens = ssid_tokens;

  std::vector<Element> sub_ys;
  for (const auto &id : spid) sub_ys.push_back(state.public_values[roster.index_of(id)]);
  sub.ssid = encode_session_id(spid, sub_ys, state.params);

  const Element &y_prev = sub_ys[(sub.pos + m - 1) % m];
  const Element &y_next = sub_ys[(sub.pos + 1) % m];
  sub.left_secret = exp(y_prev, state.exponent, state.params);
  sub.right_secret = exp(y_next, state.exponent, state.params);
  // Tokens hash with the full-group sid by default; ssid_tokens switches to
  // hashing with ssid instead. The signature always covers ssid.
  const Bytes &token_context = ssid_tokens ? sub.ssid : state.sid;
  sub.left_token = edge_token(sub.left_secret, token_context, state.params);
  sub.right_token = edge_token(sub.right_secret, token_context, state.params);
  sub.own_z = xor_digest(sub.left_token, sub.right_token);

  Digest emitted = mask ? xor_digest(sub.own_z, *mask) : sub.own_z;
  Signature sig = sign(state.signing_key,
                       round2_signed_bytes(state.identity, emitted, sub.ssid), state.params, rng);
  sub.phase = Phase::SentRound2;

  ParticipantState st = state;
  st.sub = sub;
  return {st, Round2Msg{st.identity, emitted, sig}};
}

}  // namespace detail

std::pair<ParticipantState, Round2Msg> on_round1_complete(const ParticipantState &state,
                                                          const std::vector<Round1Msg> &msgs,
                                                          RandomSource &rng) {
  return detail::round2_with_mask(state, msgs, rng, std::nullopt);
}

std::vector<Digest> recover_chain(const Digest &start_token, std::size_t start_index,
                                  const std::vector<Digest> &z_by_index) {
  std::size_t n = z_by_index.size();
  std::vector<Digest> edges(n);
  Digest cur = start_token;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t j = (start_index + step) % n;
    cur = xor_digest(cur, z_by_index[j]);
    edges[j] = cur;  // z'_{j,j+1}
  }
  return edges;
}

ParticipantState compute_group_key(const ParticipantState &state,
                                   const std::vector<Round2Msg> &msgs, const Registry &registry) {
  require_phase(state.phase, Phase::SentRound2, "compute_group_key");
  auto ordered = by_member_order(msgs, state.roster, ErrorCode::MissingRound2);

  ParticipantState st = state;
  StageKeyResult res = stage_key(ordered, st.sid, st.sid, st.index, st.left_token, st.variant,
                                 OracleTag::Hg, registry, st.params);
  if (res.abort) {
    st.phase = Phase::Aborted;
    st.abort = res.abort;
    return st;
  }
  st.key = res.key;
  st.kc_key = res.kc_key;
  st.phase = Phase::KeyComputed;
  return st;
}

P2PKey p2p_key(const ParticipantState &state, const std::string &peer) {
  if (!sid_known(state.phase)) {
    throw Error(ErrorCode::WrongPhase, "p2p key needs the session id");
  }
  if (peer == state.identity) {
    throw Error(ErrorCode::SelfPeer, "p2p peer must differ from self");
  }
  Roster roster(state.roster);
  if (!roster.contains(peer)) {
    throw Error(ErrorCode::PeerNotInRoster, peer);
  }
  std::size_t j = roster.index_of(peer);
  Element shared = exp(state.public_values[j], state.exponent, state.params);

  // Canonical pair order (by roster index) so both sides derive the same key.
  std::size_t a = std::min(state.index, j), b = std::max(state.index, j);
  Digest key = oracle_eval(
      OracleTag::Hp,
      {encode_element(shared, state.params),
       identity_y_pair(state.roster[a], state.public_values[a], state.params),
       identity_y_pair(state.roster[b], state.public_values[b], state.params)});
  return P2PKey{key, state.roster[a], state.roster[b]};
}

std::pair<ParticipantState, Round2Msg> subgroup_round1(const ParticipantState &state,
                                                       const std::vector<std::string> &spid,
                                                       Variant variant, RandomSource &rng,
                                                       bool ssid_tokens) {
  return detail::subgroup_round1_with_mask(state, spid, variant, rng, ssid_tokens, std::nullopt);
}

ParticipantState compute_subgroup_key(const ParticipantState &state,
                                      const std::vector<Round2Msg> &msgs,
                                      const Registry &registry) {
  if (!state.sub) {
    throw Error(ErrorCode::WrongPhase, "no subgroup round in progress");
  }
  require_phase(state.sub->phase, Phase::SentRound2, "compute_subgroup_key");
  auto ordered = by_member_order(msgs, state.sub->members, ErrorCode::MissingRound2);

  ParticipantState st = state;
  SubgroupContext &sub = *st.sub;
  StageKeyResult res = stage_key(ordered, sub.ssid, sub.ssid, sub.pos, sub.left_token,
                                 sub.variant, OracleTag::Hs, registry, st.params);
  if (res.abort) {
    sub.phase = Phase::Aborted;
    sub.abort = res.abort;
    return st;
  }
  sub.key = res.key;
  sub.kc_key = res.kc_key;
  sub.phase = Phase::KeyComputed;
  return st;
}

std::pair<ParticipantState, KCMsg> kc_message(const ParticipantState &state, RandomSource &rng) {
  if (state.variant != Variant::KeyConfirm) {
    throw Error(ErrorCode::WrongVariant, "key confirmation requires the KeyConfirm variant");
  }
  require_phase(state.phase, Phase::KeyComputed, "kc_message");

  ParticipantState st = state;
  st.own_confirmation = oracle_eval(OracleTag::Hkc, {*st.kc_key, st.sid});
  Signature sig = sign(st.signing_key,
                       kc_signed_bytes(st.identity, *st.own_confirmation, st.sid), st.params, rng);
  st.phase = Phase::SentKC;
  return {st, KCMsg{st.identity, *st.own_confirmation, sig}};
}

ParticipantState finalize_kc(const ParticipantState &state, const std::vector<KCMsg> &msgs,
                             const Registry &registry) {
  require_phase(state.phase, Phase::SentKC, "finalize_kc");
  auto ordered = by_member_order(msgs, state.roster, ErrorCode::MissingKC);

  ParticipantState st = state;
  KCResult res = finalize_kc_core(ordered, st.sid, *st.own_confirmation, registry, st.params);
  if (res.accepted) {
    st.phase = Phase::Accepted;
  } else {
    st.phase = Phase::Aborted;
    st.abort = res.abort;
    st.key.reset();
    st.kc_key.reset();
  }
  return st;
}

std::pair<ParticipantState, KCMsg> subgroup_kc_message(const ParticipantState &state,
                                                       RandomSource &rng) {
  if (!state.sub || state.sub->variant != Variant::KeyConfirm) {
    throw Error(ErrorCode::WrongVariant, "subgroup key confirmation requires KeyConfirm");
  }
  require_phase(state.sub->phase, Phase::KeyComputed, "subgroup_kc_message");

  ParticipantState st = state;
  SubgroupContext &sub = *st.sub;
  sub.own_confirmation = oracle_eval(OracleTag::Hkc, {*sub.kc_key, sub.ssid});
  Signature sig = sign(st.signing_key,
                       kc_signed_bytes(st.identity, *sub.own_confirmation, sub.ssid), st.params,
                       rng);
  sub.phase = Phase::SentKC;
  return {st, KCMsg{st.identity, *sub.own_confirmation, sig}};
}

ParticipantState finalize_subgroup_kc(const ParticipantState &state,
                                      const std::vector<KCMsg> &msgs, const Registry &registry) {
  if (!state.sub) {
    throw Error(ErrorCode::WrongPhase, "no subgroup round in progress");
  }
  require_phase(state.sub->phase, Phase::SentKC, "finalize_subgroup_kc");
  auto ordered = by_member_order(msgs, state.sub->members, ErrorCode::MissingKC);

  ParticipantState st = state;
  SubgroupContext &sub = *st.sub;
  KCResult res = finalize_kc_core(ordered, sub.ssid, *sub.own_confirmation, registry, st.params);
  if (res.accepted) {
    sub.phase = Phase::Accepted;
  } else {
    sub.phase = Phase::Aborted;
    sub.abort = res.abort;
    sub.key.reset();
    sub.kc_key.reset();
  }
  return st;
}

// ---- wire format ----

Bytes serialize_wire(const WireMsg &m) {
  Bytes out;
  out.push_back(m.kind);
  append_prefixed(out, to_bytes(m.sender));
  for (const Bytes &f : m.fields) append_prefixed(out, f);
  return out;
}

Bytes serialize_message(const Round1Msg &m, const GroupParams &params) {
  return serialize_wire({kWireRound1, m.sender, {encode_element(m.y, params)}});
}

Bytes serialize_message(const Round2Msg &m, const GroupParams &params) {
  return serialize_wire({kWireRound2, m.sender, {m.z, encode_signature(m.sig, params)}});
}

Bytes serialize_message(const KCMsg &m, const GroupParams &params) {
  return serialize_wire({kWireKC, m.sender, {m.confirmation, encode_signature(m.sig, params)}});
}

WireMsg parse_message(const Bytes &raw) {
  WireMsg m;
  std::size_t off = 0;
  auto take_field = [&]() {
    if (off + 4 > raw.size()) throw Error(ErrorCode::MalformedTranscript, "truncated field");
    std::uint32_t len = (std::uint32_t(raw[off]) << 24) | (std::uint32_t(raw[off + 1]) << 16) |
                        (std::uint32_t(raw[off + 2]) << 8) | std::uint32_t(raw[off + 3]);
    off += 4;
    if (off + len > raw.size()) throw Error(ErrorCode::MalformedTranscript, "truncated field");
    Bytes f(raw.begin() + off, raw.begin() + off + len);
    off += len;
    return f;
  };
  if (raw.empty()) throw Error(ErrorCode::MalformedTranscript, "empty message");
  m.kind = raw[off++];
  Bytes sender = take_field();
  m.sender.assign(sender.begin(), sender.end());
  while (off < raw.size()) m.fields.push_back(take_field());
  return m;
}

Round1Msg to_round1(const WireMsg &m, const GroupParams &params) {
  if (m.kind != kWireRound1 || m.fields.size() != 1) {
    throw Error(ErrorCode::MalformedTranscript, "not a round-1 message");
  }
  return Round1Msg{m.sender, validate_element(m.fields[0], params)};
}

Round2Msg to_round2(const WireMsg &m, const GroupParams &params) {
  if (m.kind != kWireRound2 || m.fields.size() != 2 || m.fields[0].size() != kDigestBytes) {
    throw Error(ErrorCode::MalformedTranscript, "not a round-2 message");
  }
  return Round2Msg{m.sender, m.fields[0], decode_signature(m.fields[1], params)};
}

KCMsg to_kc(const WireMsg &m, const GroupParams &params) {
  if (m.kind != kWireKC || m.fields.size() != 2 || m.fields[0].size() != kDigestBytes) {
    throw Error(ErrorCode::MalformedTranscript, "not a key-confirmation message");
  }
  return KCMsg{m.sender, m.fields[0], decode_signature(m.fields[1], params)};
}

}  // namespace gkex
