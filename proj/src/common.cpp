#include "slf/common.hpp"

#include <array>
#include <cstdio>

namespace slf {

Label label_from_string(const std::string& s) {
  if (s == "real") return Label::kReal;
  if (s == "fake") return Label::kFake;
  if (s == "unlabeled") return Label::kUnlabeled;
  fail(ErrorCode::kTypeMismatch, "unknown label '" + s + "'");
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoFaceFound: return "NO_FACE_FOUND";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kClipLengthError: return "CLIP_LENGTH_ERROR";
    case ErrorCode::kEncoderFailure: return "ENCODER_FAILURE";
    case ErrorCode::kCorruptCache: return "CORRUPT_CACHE";
    case ErrorCode::kTooShort: return "TOO_SHORT";
    case ErrorCode::kEmptySet: return "EMPTY_SET";
    case ErrorCode::kEmptyList: return "EMPTY_LIST";
    case ErrorCode::kShapeError: return "SHAPE_ERROR";
    case ErrorCode::kInsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::kNonFiniteLoss: return "NON_FINITE_LOSS";
    case ErrorCode::kMissingStage1: return "MISSING_STAGE1";
    case ErrorCode::kSingleClass: return "SINGLE_CLASS";
    case ErrorCode::kUnknownKind: return "UNKNOWN_KIND";
    case ErrorCode::kUnknownKey: return "UNKNOWN_KEY";
    case ErrorCode::kTypeMismatch: return "TYPE_MISMATCH";
    case ErrorCode::kRangeError: return "RANGE_ERROR";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN_ERROR";
}

std::string hex64(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf.data(), 16);
}

}  // namespace slf
