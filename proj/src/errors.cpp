#include "gkex/errors.hpp"

namespace gkex {

const char *error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::WideTagMisuse: return "WideTagMisuse";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RosterTooSmall: return "RosterTooSmall";
    case ErrorCode::DuplicateIdentity: return "DuplicateIdentity";
    case ErrorCode::IdentityNotInRoster: return "IdentityNotInRoster";
    case ErrorCode::MissingRound1: return "MissingRound1";
    case ErrorCode::MissingRound2: return "MissingRound2";
    case ErrorCode::MissingKC: return "MissingKC";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::WrongVariant: return "WrongVariant";
    case ErrorCode::PeerNotInRoster: return "PeerNotInRoster";
    case ErrorCode::SelfPeer: return "SelfPeer";
    case ErrorCode::NotInSubgroup: return "NotInSubgroup";
    case ErrorCode::SubgroupTooSmall: return "SubgroupTooSmall";
    case ErrorCode::SubgroupNotSubsetOfRoster: return "SubgroupNotSubsetOfRoster";
    case ErrorCode::NotAnInsider: return "NotAnInsider";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::MalformedTranscript: return "MalformedTranscript";
  }
  return "UnknownError";
}

}  // namespace gkex
