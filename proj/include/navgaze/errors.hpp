#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace navgaze {

enum class ErrorCode {
  DegenerateCloud,
  EmptyIndex,
  EmptyObject,
  NoQueriedObject,
  EmptyObjectIndex,
  NoFeasibleCandidate,
  NoOperationDirection,
  Unreachable,
  GoalTooDeep,
  Stuck,
  ObjectNotFound,
  SegmentNotFound,
  NoVisibleCandidates,
  Transport,
  Malformed,
  LengthMismatch,
  EmptyResults,
  UnknownTemplate,
  MalformedTrace,
  InvalidScene,
  InvalidConfig,
  Precondition,
  ScriptExhausted,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type so
// the pipeline can record the code in an episode row instead of crashing.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace navgaze
