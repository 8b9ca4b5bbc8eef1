#pragma once

#include <stdexcept>
#include <string>

namespace dictid {

/// Structured error with a stable machine-readable code ("ZeroColumn",
/// "DimensionMismatch", ...) plus a human-readable detail string. The CLI
/// maps these to exit code 2 and a JSON {error, detail} object on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] void fail(std::string code, const std::string& detail);

namespace errc {
inline constexpr const char* kZeroColumn = "ZeroColumn";
inline constexpr const char* kDimensionMismatch = "DimensionMismatch";
inline constexpr const char* kSolverError = "SolverError";
inline constexpr const char* kUnsupportedMode = "UnsupportedMode";
inline constexpr const char* kNotZeroDiagonal = "NotZeroDiagonal";
inline constexpr const char* kNotInNullSpace = "NotInNullSpace";
inline constexpr const char* kDegenerateDirection = "DegenerateDirection";
inline constexpr const char* kSingularPerturbedDictionary = "SingularPerturbedDictionary";
inline constexpr const char* kPreconditionFailed = "PreconditionFailed";
inline constexpr const char* kUnknownBoundId = "UnknownBoundId";
inline constexpr const char* kEmptyGrid = "EmptyGrid";
inline constexpr const char* kDomainError = "DomainError";
inline constexpr const char* kIoError = "IoError";
}  // namespace errc

}  // namespace dictid
