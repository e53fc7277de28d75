#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slf/common.hpp"
#include "slf/image.hpp"
#include "slf/tensor.hpp"

namespace slf {

inline constexpr int kLatentLevels = 18;
inline constexpr int kLatentChannels = 512;
inline constexpr int kLatentFaceSize = 256;
inline constexpr int kContentFaceSize = 224;
inline constexpr int kDefaultClipLength = 32;

struct VideoClip {
  std::vector<Image> frames;
  std::string source_id;
  int start_frame = 0;
  Label label = Label::kUnlabeled;
};

struct FaceBox {
  int x0 = 0;
  int y0 = 0;
  int size = 0;
  // Five-point layout: eyes, nose tip, mouth corners, in crop coordinates.
  std::array<std::array<double, 2>, 5> landmarks{};
};

struct FaceClip {
  std::vector<Image> latent_faces;   // 256x256, inversion-encoder input
  std::vector<Image> content_faces;  // 224x224, content-backbone input
  std::vector<FaceBox> alignment;
  std::string source_id;
  Label label = Label::kUnlabeled;

  int length() const { return static_cast<int>(latent_faces.size()); }
};

struct StyleLatentSequence {
  LatentTensor latents;  // frames x 18 x 512
  std::string source_id;
  Label label = Label::kUnlabeled;

  int frames() const { return latents.frames; }
};

// ---- face detection seam ----

// Adapters for real detectors (dlib/RetinaFace style) implement this: one
// image in, an aligned square crop box plus landmarks out, or nullopt when
// no face is present.
class FaceDetectorInterface {
 public:
  virtual ~FaceDetectorInterface() = default;
  virtual std::optional<FaceBox> detect(const Image& frame) const = 0;
  virtual std::string name() const = 0;
};

// Deterministic stand-in: centered square over the largest inscribed box,
// landmarks at fixed fractions of the crop.
class CenterCropDetector : public FaceDetectorInterface {
 public:
  std::optional<FaceBox> detect(const Image& frame) const override;
  std::string name() const override { return "center-crop-stub"; }
};

FaceClip detect_and_align(const VideoClip& video,
                          const FaceDetectorInterface& detector,
                          int clip_length = kDefaultClipLength);

// ---- inversion encoder seam ----

// Adapters for real GAN-inversion encoders implement this: one 256x256x3
// face in, an 18x512 style latent out. The fingerprint identifies the
// weights so cached latents can be invalidated.
class InversionEncoderInterface {
 public:
  virtual ~InversionEncoderInterface() = default;
  // Returns the latent as an 18x512 row-major matrix.
  virtual Eigen::MatrixXf encode(const Image& face256) const = 0;
  virtual std::uint64_t fingerprint() const = 0;
  virtual std::string name() const = 0;
};

// Seeded stand-in encoder: fixed random linear projection of the 8x8
// grayscale block-downsample of the face, plus a fixed per-level offset.
class MockProjectionEncoder : public InversionEncoderInterface {
 public:
  explicit MockProjectionEncoder(std::uint64_t seed);

  Eigen::MatrixXf encode(const Image& face256) const override;
  std::uint64_t fingerprint() const override { return fingerprint_; }
  std::string name() const override { return "mock-projection"; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t fingerprint_;
  Eigen::MatrixXf projection_;     // (18*512) x 64
  Eigen::VectorXf level_offsets_;  // 18
};

StyleLatentSequence extract_style_latents(const FaceClip& clip,
                                          const InversionEncoderInterface& encoder);

// ---- latent cache ----
//
// Single binary file per video. 64-byte header, then frame-major float32
// payload (little endian):
//   [0..3]   magic "SLF1"
//   [4..7]   u32 frame_count
//   [8..11]  u32 level_count   (18)
//   [12..15] u32 channel_count (512)
//   [16]     u8  label
//   [17..19] pad
//   [20..27] u64 encoder_fingerprint
//   [28..63] source_id, NUL padded (at most 35 bytes)

struct LatentCacheHeader {
  std::uint32_t frame_count = 0;
  std::uint32_t level_count = kLatentLevels;
  std::uint32_t channel_count = kLatentChannels;
  Label label = Label::kUnlabeled;
  std::uint64_t encoder_fingerprint = 0;
  std::string source_id;
};

void cache_store(const StyleLatentSequence& seq, std::uint64_t encoder_fingerprint,
                 const std::string& path);
StyleLatentSequence cache_load(const std::string& path,
                               LatentCacheHeader* header_out = nullptr);

// ---- frame-directory reader ----

// Reads every "*.ppm" in the directory in lexicographic order.
VideoClip read_frame_dir(const std::string& dir, const std::string& source_id,
                         Label label);

}  // namespace slf
