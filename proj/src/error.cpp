#include "noteg/error.hpp"

namespace noteg {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SpawnOutOfBounds: return "SpawnOutOfBounds";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::InvalidCell: return "InvalidCell";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Runtime: return "RuntimeError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::AlreadyStarted: return "AlreadyStarted";
    case ErrorCode::InvalidColor: return "InvalidColor";
    case ErrorCode::NoScene: return "NoScene";
    case ErrorCode::NoMap: return "NoMap";
    case ErrorCode::RaggedGrid: return "RaggedGrid";
    case ErrorCode::UnknownTileId: return "UnknownTileId";
    case ErrorCode::PlayerExists: return "PlayerExists";
    case ErrorCode::NoPlayer: return "NoPlayer";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::MissingAsset: return "MissingAsset";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MissingDecoder: return "MissingDecoder";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::UnknownCell: return "UnknownCell";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::Schedule: return "ScheduleError";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(code_name(code)) + ": " + message),
      code_(code),
      message_(message) {}

RuntimeError::RuntimeError(std::string message, std::vector<TraceFrame> trace)
    : Error(ErrorCode::Runtime, message), trace_(std::move(trace)) {}

}  // namespace noteg
