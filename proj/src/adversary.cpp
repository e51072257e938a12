#include "gkex/adversary.hpp"

#include "gkex/errors.hpp"

namespace gkex {

std::pair<ParticipantState, Round2Msg> malicious_round2(const ParticipantState &state,
                                                        const AdversaryConfig &config,
                                                        const std::vector<Round1Msg> &msgs,
                                                        RandomSource &rng) {
  if (!config.is_insider(state.index, state.roster.size())) {
    throw Error(ErrorCode::NotAnInsider, state.identity + " is not a configured insider");
  }
  return detail::round2_with_mask(state, msgs, rng, config.mask);
}

std::pair<ParticipantState, Round2Msg> malicious_subgroup_round1(
    const ParticipantState &state, const AdversaryConfig &config,
    const std::vector<std::string> &spid, Variant variant, RandomSource &rng, bool ssid_tokens) {
  auto self = std::find(spid.begin(), spid.end(), state.identity);
  if (self == spid.end()) {
    throw Error(ErrorCode::NotInSubgroup, state.identity + " is not in spid");
  }
  std::size_t pos = static_cast<std::size_t>(self - spid.begin());
  if (!config.is_insider(pos, spid.size())) {
    throw Error(ErrorCode::NotAnInsider, state.identity + " is not a configured insider");
  }
  return detail::subgroup_round1_with_mask(state, spid, variant, rng, ssid_tokens, config.mask);
}

ParticipantState insider_compute_group_key(const ParticipantState &state,
                                           const AdversaryConfig &config,
                                           const std::vector<Round2Msg> &msgs,
                                           const Registry &registry) {
  std::size_t n = state.roster.size();
  if (!config.is_insider(state.index, n)) {
    throw Error(ErrorCode::NotAnInsider, state.identity + " is not a configured insider");
  }
  // The predecessor insider's naive chain recovery already reproduces the
  // honest parties' (masked) view. The successor insider starts its chain at
  // an edge the honest parties see masked, so it pre-masks the start token.
  ParticipantState st = state;
  if (state.index == (config.victim + 1) % n) {
    st.left_token = xor_digest(st.left_token, config.mask);
  }
  st = compute_group_key(st, msgs, registry);
  st.left_token = state.left_token;
  return st;
}

ParticipantState insider_compute_subgroup_key(const ParticipantState &state,
                                              const AdversaryConfig &config,
                                              const std::vector<Round2Msg> &msgs,
                                              const Registry &registry) {
  if (!state.sub) {
    throw Error(ErrorCode::WrongPhase, "no subgroup round in progress");
  }
  std::size_t m = state.sub->members.size();
  if (!config.is_insider(state.sub->pos, m)) {
    throw Error(ErrorCode::NotAnInsider, state.identity + " is not a configured insider");
  }
  ParticipantState st = state;
  if (state.sub->pos == (config.victim + 1) % m) {
    st.sub->left_token = xor_digest(st.sub->left_token, config.mask);
  }
  st = compute_subgroup_key(st, msgs, registry);
  st.sub->left_token = state.sub->left_token;
  return st;
}

DivergencePrediction predict_divergence(const GroupParams &params,
                                        const std::vector<Scalar> &exponents,
                                        const AdversaryConfig &config, const Bytes &token_context,
                                        const Bytes &key_context, Stage stage) {
  std::size_t m = exponents.size();

  // True edge tokens from the secret exponents: edge j connects members j
  // and j+1 (cyclic), token = H(g^{x_j x_{j+1}}, token_context).
  std::vector<Digest> true_tokens(m);
  for (std::size_t j = 0; j < m; ++j) {
    Element y_next = exp(params.generator(), exponents[(j + 1) % m], params);
    Element shared = exp(y_next, exponents[j], params);
    true_tokens[j] = oracle_eval(OracleTag::H, {encode_element(shared, params), token_context});
  }

  // Honest non-victims recover the victim's two incident edges masked by
  // r_M and everything else clean; the victim recovers the complement.
  std::size_t left_edge = (config.victim + m - 1) % m;
  std::size_t right_edge = config.victim;
  DivergencePrediction pred;
  pred.honest_tokens = true_tokens;
  pred.victim_tokens = true_tokens;
  for (std::size_t j = 0; j < m; ++j) {
    bool incident = (j == left_edge || j == right_edge);
    if (incident) {
      pred.honest_tokens[j] = xor_digest(pred.honest_tokens[j], config.mask);
    } else {
      pred.victim_tokens[j] = xor_digest(pred.victim_tokens[j], config.mask);
    }
  }

  OracleTag key_tag = stage == Stage::Group ? OracleTag::Hg : OracleTag::Hs;
  auto derive = [&](const std::vector<Digest> &tokens) {
    std::vector<Bytes> fields(tokens.begin(), tokens.end());
    fields.push_back(key_context);
    return oracle_eval(key_tag, fields);
  };
  pred.honest_key = derive(pred.honest_tokens);
  pred.victim_key = derive(pred.victim_tokens);
  return pred;
}

}  // namespace gkex
