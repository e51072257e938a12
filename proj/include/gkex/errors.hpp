#pragma once

#include <stdexcept>
#include <string>

namespace gkex {

enum class ErrorCode {
  InvalidElement,
  WideTagMisuse,
  LengthMismatch,
  RosterTooSmall,
  DuplicateIdentity,
  IdentityNotInRoster,
  MissingRound1,
  MissingRound2,
  MissingKC,
  WrongPhase,
  WrongVariant,
  PeerNotInRoster,
  SelfPeer,
  NotInSubgroup,
  SubgroupTooSmall,
  SubgroupNotSubsetOfRoster,
  NotAnInsider,
  InvalidScenario,
  MalformedTranscript,
};

const char *error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gkex
