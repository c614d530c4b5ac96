#include "genreflow/error.hpp"

namespace genreflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownGenre: return "UnknownGenre";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::InvalidStride: return "InvalidStride";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::PluginFailure: return "PluginFailure";
    case ErrorCode::PluginTimeout: return "PluginTimeout";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::AllEmptyCorpus: return "AllEmptyCorpus";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::StaleCache: return "StaleCache";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::NoPositives: return "NoPositives";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace genreflow
