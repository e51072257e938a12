#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gkex/adversary.hpp"
#include "gkex/protocol.hpp"

namespace gkex {

using OrderedJson = nlohmann::ordered_json;

struct AttackSpec {
  std::size_t victim = 1;  // 1-based index within the attacked stage's member order
  Digest mask;             // r_M
};

struct Scenario {
  std::string protocol;                // mbd-p | mbd-s | mbd-p-kc | mbd-s-kc
  std::size_t n = 0;
  std::vector<std::size_t> subgroup;   // 1-based roster indices; empty = default (1..n-1)
  std::optional<AttackSpec> attack;
  std::string group_preset = "toy";
  std::uint64_t seed = 0;
};

/// Throws Error(InvalidScenario) with field-level diagnostics.
void validate_scenario(const Scenario &s);

bool is_subgroup_protocol(const std::string &protocol);
bool is_kc_protocol(const std::string &protocol);

/// The classification a correctly behaving run of this scenario produces.
std::string expected_classification(const Scenario &s);

/// Effective subgroup member indices (0-based) after defaulting.
std::vector<std::size_t> effective_subgroup(const Scenario &s);

struct RoundRecord {
  std::string name;
  std::vector<Bytes> messages;  // serialized wire messages in delivery order
};

struct PartyOutcome {
  std::string phase;
  std::optional<std::string> abort_reason;
  std::optional<std::string> abort_offender;
  std::optional<std::string> group_key_fp;  // hex fingerprint, never the raw key
  std::optional<std::string> sub_phase;
  std::optional<std::string> sub_abort_reason;
  std::optional<std::string> subgroup_key_fp;
};

struct Transcript {
  std::string schema = "gkex-transcript-v1";
  Scenario scenario;
  std::vector<std::pair<std::string, Bytes>> registry;  // identity -> encoded vk, roster order
  std::vector<RoundRecord> rounds;
  std::vector<std::pair<std::string, PartyOutcome>> outcomes;  // roster order
  std::string classification;
};

struct OutcomeReport {
  std::string classification;  // agreement | victim-divergence | abort-detected | unexpected
  OrderedJson evidence;
};

struct VerifyResult {
  bool ok = false;
  std::vector<std::string> diagnostics;
};

/// Synchronous lossless broadcast: within a round every party receives every
/// broadcast exactly once, in sender roster order. Delivery refuses to start
/// until all expected senders have submitted.
class BroadcastBus {
 public:
  void open_round(const std::string &name, const std::vector<std::string> &expected_senders);
  void submit(const Bytes &message);  // sender parsed from the wire record
  std::vector<Bytes> deliver();       // throws if the round is incomplete
  const std::vector<RoundRecord> &log() const { return log_; }

 private:
  std::vector<std::string> expected_;
  std::map<std::string, Bytes> pending_;
  std::vector<RoundRecord> log_;
  bool round_open_ = false;
};

/// Per-party seed derived from the master seed, so runs are reproducible yet
/// per-party independent.
std::uint64_t derive_party_seed(std::uint64_t master_seed, std::size_t party_index);

/// Hkc-tagged fingerprint of a session key; safe to persist.
std::string key_fingerprint(const Digest &key);

Transcript run_scenario(const Scenario &s);

OutcomeReport check_agreement(const Transcript &t);  // Error(MalformedTranscript)

VerifyResult verify_transcript(const Transcript &t);

std::string serialize_transcript(const Transcript &t);
Transcript parse_transcript(const std::string &text);  // Error(MalformedTranscript)

OrderedJson scenario_to_json(const Scenario &s);
Scenario scenario_from_json(const OrderedJson &j);

}  // namespace gkex
