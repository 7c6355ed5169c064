#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace noteg {

enum class ErrorCode {
  SpawnOutOfBounds,
  UnknownEntity,
  InvalidCell,
  Parse,
  Runtime,
  TypeMismatch,
  AlreadyStarted,
  InvalidColor,
  NoScene,
  NoMap,
  RaggedGrid,
  UnknownTileId,
  PlayerExists,
  NoPlayer,
  BadProbability,
  ArityMismatch,
  MissingAsset,
  BadDimensions,
  IndexOutOfRange,
  MissingDecoder,
  Schema,
  UnknownCell,
  MalformedMessage,
  Schedule,
};

std::string_view code_name(ErrorCode code);

/// Base for every error the engine reports. `what()` is prefixed with the
/// code name, e.g. "SpawnOutOfBounds: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

/// One call frame of a script traceback.
struct TraceFrame {
  std::string fn;
  std::string cell_id;
  int line = 0;
  int col = 0;

  bool operator==(const TraceFrame&) const = default;
};

/// A script failure with its traceback, innermost frame first.
class RuntimeError : public Error {
 public:
  RuntimeError(std::string message, std::vector<TraceFrame> trace);

  const std::vector<TraceFrame>& trace() const { return trace_; }

 private:
  std::vector<TraceFrame> trace_;
};

}  // namespace noteg
