#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkex/auth.hpp"
#include "gkex/group.hpp"
#include "gkex/oracle.hpp"
#include "gkex/rng.hpp"

namespace gkex {

enum class Phase { Init, SentRound1, SentRound2, KeyComputed, SentKC, Accepted, Aborted };
enum class Variant { Original, KeyConfirm };
enum class AbortReason { XorSumNonzero, BadSignature, ConfirmationMismatch };

const char *phase_name(Phase p);
const char *abort_reason_name(AbortReason r);

struct AbortInfo {
  AbortReason reason;
  std::string offender;  // empty when no single party is implicated
};

/// Ordered participant list; index arithmetic is cyclic.
class Roster {
 public:
  explicit Roster(std::vector<std::string> ids);  // RosterTooSmall / DuplicateIdentity

  const std::vector<std::string> &ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t index_of(const std::string &id) const;  // IdentityNotInRoster
  bool contains(const std::string &id) const;

 private:
  std::vector<std::string> ids_;
};

struct Round1Msg {
  std::string sender;
  Element y;
};

struct Round2Msg {
  std::string sender;
  Digest z;
  Signature sig;
};

struct KCMsg {
  std::string sender;
  Digest confirmation;  // M_i
  Signature sig;
};

/// Subgroup-stage state, tracked alongside the group stage with its own
/// phase machine (SentRound2 -> KeyComputed -> SentKC -> Accepted/Aborted).
struct SubgroupContext {
  std::vector<std::string> members;  // spid, cyclic order
  std::size_t pos = 0;
  Bytes ssid;
  Variant variant = Variant::Original;
  bool ssid_tokens = false;
  Phase phase = Phase::Init;
  Element left_secret, right_secret;
  Digest left_token, right_token, own_z;
  std::optional<Digest> key, kc_key, own_confirmation;
  std::optional<AbortInfo> abort;
};

/// One user's evolving protocol state. Value semantics: operations consume a
/// state and produce a new one. The secret exponent and edge secrets never
/// leave the state in any emitted message.
struct ParticipantState {
  std::string identity;
  std::size_t index = 0;  // 0-based roster position
  std::vector<std::string> roster;
  GroupParams params;
  Variant variant = Variant::Original;
  SigningKey signing_key;
  Phase phase = Phase::Init;
  Scalar exponent;                     // x_i
  std::vector<Element> public_values;  // y_1..y_n in roster order, set in round 2
  Bytes sid;
  Element left_secret, right_secret;  // k'_{i-1,i}, k'_{i,i+1}
  Digest left_token, right_token;     // z'_{i-1,i}, z'_{i,i+1}
  Digest own_z;
  std::optional<Digest> key, kc_key, own_confirmation;
  std::optional<AbortInfo> abort;
  std::optional<SubgroupContext> sub;
};

struct P2PKey {
  Digest key;
  std::string first, second;  // pair ordered by roster index
};

// ---- context encodings (wire-stable) ----

/// sid/ssid: ordered concatenation of length-prefixed (identity, encoded y)
/// pairs.
Bytes encode_session_id(const std::vector<std::string> &ids, const std::vector<Element> &ys,
                        const GroupParams &params);

/// Signed tuple for round-2 style messages: lp(id) || lp(z) || lp(context).
Bytes round2_signed_bytes(const std::string &id, const Digest &z, const Bytes &context);
/// Signed tuple for confirmation messages: lp(id) || lp(M) || lp(context).
Bytes kc_signed_bytes(const std::string &id, const Digest &confirmation, const Bytes &context);

// ---- group stage ----

std::pair<ParticipantState, Round1Msg> start_session(const std::string &identity,
                                                     const Roster &roster,
                                                     const GroupParams &params, Variant variant,
                                                     const SigningKey &signing_key,
                                                     RandomSource &rng);

std::pair<ParticipantState, Round2Msg> on_round1_complete(const ParticipantState &state,
                                                          const std::vector<Round1Msg> &msgs,
                                                          RandomSource &rng);

ParticipantState compute_group_key(const ParticipantState &state,
                                   const std::vector<Round2Msg> &msgs, const Registry &registry);

/// Rebuilds all edge tokens from one known token and the broadcast z values,
/// reindexed to canonical order: result[j] = z'_{j,j+1} (0-based, cyclic).
/// start_index i means start_token = z'_{i-1,i}.
std::vector<Digest> recover_chain(const Digest &start_token, std::size_t start_index,
                                  const std::vector<Digest> &z_by_index);

// ---- p2p stage ----

P2PKey p2p_key(const ParticipantState &state, const std::string &peer);

// ---- subgroup stage ----

std::pair<ParticipantState, Round2Msg> subgroup_round1(const ParticipantState &state,
                                                       const std::vector<std::string> &spid,
                                                       Variant variant, RandomSource &rng,
                                                       bool ssid_tokens = false);

ParticipantState compute_subgroup_key(const ParticipantState &state,
                                      const std::vector<Round2Msg> &msgs,
                                      const Registry &registry);

// ---- key confirmation ----

std::pair<ParticipantState, KCMsg> kc_message(const ParticipantState &state, RandomSource &rng);

ParticipantState finalize_kc(const ParticipantState &state, const std::vector<KCMsg> &msgs,
                             const Registry &registry);

std::pair<ParticipantState, KCMsg> subgroup_kc_message(const ParticipantState &state,
                                                       RandomSource &rng);

ParticipantState finalize_subgroup_kc(const ParticipantState &state,
                                      const std::vector<KCMsg> &msgs, const Registry &registry);

// ---- wire format ----

constexpr std::uint8_t kWireRound1 = 0x01;
constexpr std::uint8_t kWireRound2 = 0x02;
constexpr std::uint8_t kWireKC = 0x03;

struct WireMsg {
  std::uint8_t kind = 0;
  std::string sender;
  std::vector<Bytes> fields;
};

Bytes serialize_message(const Round1Msg &m, const GroupParams &params);
Bytes serialize_message(const Round2Msg &m, const GroupParams &params);
Bytes serialize_message(const KCMsg &m, const GroupParams &params);
Bytes serialize_wire(const WireMsg &m);
WireMsg parse_message(const Bytes &raw);  // Error(MalformedTranscript) on bad framing

Round1Msg to_round1(const WireMsg &m, const GroupParams &params);
Round2Msg to_round2(const WireMsg &m, const GroupParams &params);
KCMsg to_kc(const WireMsg &m, const GroupParams &params);

namespace detail {

/// Round-2 computation with an optional XOR mask applied to the emitted z
/// before signing. The honest path passes no mask; the adversary passes r_M.
/// The rng draw pattern is identical either way, so a zero mask reproduces
/// the honest message bit-for-bit.
std::pair<ParticipantState, Round2Msg> round2_with_mask(const ParticipantState &state,
                                                        const std::vector<Round1Msg> &msgs,
                                                        RandomSource &rng,
                                                        const std::optional<Digest> &mask);

std::pair<ParticipantState, Round2Msg> subgroup_round1_with_mask(
    const ParticipantState &state, const std::vector<std::string> &spid, Variant variant,
    RandomSource &rng, bool ssid_tokens, const std::optional<Digest> &mask);

}  // namespace detail

}  // namespace gkex
