#include "navgaze/errors.hpp"

namespace navgaze {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateCloud: return "DegenerateCloud";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::EmptyObject: return "EmptyObject";
    case ErrorCode::NoQueriedObject: return "NoQueriedObject";
    case ErrorCode::EmptyObjectIndex: return "EmptyObjectIndex";
    case ErrorCode::NoFeasibleCandidate: return "NoFeasibleCandidate";
    case ErrorCode::NoOperationDirection: return "NoOperationDirection";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::GoalTooDeep: return "GoalTooDeep";
    case ErrorCode::Stuck: return "Stuck";
    case ErrorCode::ObjectNotFound: return "ObjectNotFound";
    case ErrorCode::SegmentNotFound: return "SegmentNotFound";
    case ErrorCode::NoVisibleCandidates: return "NoVisibleCandidates";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
  }
  return "Unknown";
}

}  // namespace navgaze
