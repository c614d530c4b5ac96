#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genreflow {

/// Failure categories surfaced by the library. The CLI maps these onto
/// stable process exit codes.
enum class ErrorCode {
  InvalidArgument,
  IoError,
  MalformedCsv,
  MissingColumn,
  UnknownGenre,
  DuplicateId,
  InvalidRecord,
  EmptyInput,
  EmptyCorpus,
  MalformedFile,
  InvalidStride,
  EmptyCandidates,
  PluginFailure,
  PluginTimeout,
  MalformedResponse,
  MissingEntry,
  AllEmptyCorpus,
  IndexOutOfRange,
  ShapeMismatch,
  NonFinite,
  StaleCache,
  InvalidConfig,
  NonFiniteLoss,
  HashMismatch,
  CorruptCheckpoint,
  VersionMismatch,
  NoPositives,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace genreflow
