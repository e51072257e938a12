#pragma once

#include "gkex/protocol.hpp"

namespace gkex {

/// The colluding-pair insider configuration: the insiders are exactly the
/// victim's cyclic neighbors and share the XOR mask applied to both of their
/// broadcast z values. A zero mask degenerates to the honest run.
struct AdversaryConfig {
  std::size_t victim = 0;  // 0-based index within the attacked stage's member order
  Digest mask;             // r_M, tau bits

  bool is_insider(std::size_t index, std::size_t member_count) const {
    return index == (victim + member_count - 1) % member_count ||
           index == (victim + 1) % member_count;
  }
};

/// What the attack does to an Original-variant run: honest non-victims agree
/// on one key, the victim computes another. The token tuples are the exact
/// oracle inputs each side hashes.
struct DivergencePrediction {
  Digest honest_key;
  Digest victim_key;
  std::vector<Digest> honest_tokens;
  std::vector<Digest> victim_tokens;
};

enum class Stage { Group, Subgroup };

/// Insider round 2: the honest computation with z XOR-masked before signing.
/// The signature is the insider's own and valid, so receivers' checks pass.
std::pair<ParticipantState, Round2Msg> malicious_round2(const ParticipantState &state,
                                                        const AdversaryConfig &config,
                                                        const std::vector<Round1Msg> &msgs,
                                                        RandomSource &rng);

/// Same deviation mounted on the subgroup stage; config indices are
/// positions within spid.
std::pair<ParticipantState, Round2Msg> malicious_subgroup_round1(
    const ParticipantState &state, const AdversaryConfig &config,
    const std::vector<std::string> &spid, Variant variant, RandomSource &rng,
    bool ssid_tokens = false);

/// Insider key computation: insiders know r_M and compensate during chain
/// recovery so they land on the same key as the honest non-victims. Running
/// the plain computation instead would leave the successor insider on the
/// victim's side of the split.
ParticipantState insider_compute_group_key(const ParticipantState &state,
                                           const AdversaryConfig &config,
                                           const std::vector<Round2Msg> &msgs,
                                           const Registry &registry);

ParticipantState insider_compute_subgroup_key(const ParticipantState &state,
                                              const AdversaryConfig &config,
                                              const std::vector<Round2Msg> &msgs,
                                              const Registry &registry);

/// Test-harness oracle: given every member's secret exponent, computes both
/// token tuples and both keys the attack produces. Group stage hashes keys
/// over token_context == key_context == sid; the subgroup stage hashes
/// tokens with the full sid but keys over ssid.
DivergencePrediction predict_divergence(const GroupParams &params,
                                        const std::vector<Scalar> &exponents,
                                        const AdversaryConfig &config, const Bytes &token_context,
                                        const Bytes &key_context, Stage stage);

}  // namespace gkex
