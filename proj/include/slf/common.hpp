#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slf {

enum class Label : std::uint8_t { kReal = 0, kFake = 1, kUnlabeled = 2 };

inline const char* to_string(Label label) {
  switch (label) {
    case Label::kReal: return "real";
    case Label::kFake: return "fake";
    case Label::kUnlabeled: return "unlabeled";
  }
  return "?";
}

Label label_from_string(const std::string& s);

// Every failure mode named by the module contracts. CLI maps any of these to
// exit code 2; tests match on the code, not the message.
enum class ErrorCode {
  kNoFaceFound,
  kDimensionMismatch,
  kClipLengthError,
  kEncoderFailure,
  kCorruptCache,
  kTooShort,
  kEmptySet,
  kEmptyList,
  kShapeError,
  kInsufficientData,
  kNonFiniteLoss,
  kMissingStage1,
  kSingleClass,
  kUnknownKind,
  kUnknownKey,
  kTypeMismatch,
  kRangeError,
  kIoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

// FNV-1a 64-bit. Used for encoder fingerprints and weight-blob content hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

std::string hex64(std::uint64_t value);

}  // namespace slf
