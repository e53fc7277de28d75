#include "slf/pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "slf/rng.hpp"

namespace slf {

std::optional<FaceBox> CenterCropDetector::detect(const Image& frame) const {
  if (frame.width < 8 || frame.height < 8) return std::nullopt;
  FaceBox box;
  box.size = std::min(frame.width, frame.height);
  box.x0 = (frame.width - box.size) / 2;
  box.y0 = (frame.height - box.size) / 2;
  const double s = box.size;
  box.landmarks = {{{0.3 * s, 0.38 * s},
                    {0.7 * s, 0.38 * s},
                    {0.5 * s, 0.55 * s},
                    {0.35 * s, 0.75 * s},
                    {0.65 * s, 0.75 * s}}};
  return box;
}

FaceClip detect_and_align(const VideoClip& video,
                          const FaceDetectorInterface& detector,
                          int clip_length) {
  require(!video.frames.empty(), ErrorCode::kClipLengthError,
          "empty video clip " + video.source_id);
  require(static_cast<int>(video.frames.size()) == clip_length,
          ErrorCode::kClipLengthError,
          video.source_id + ": expected " + std::to_string(clip_length) +
              " frames, got " + std::to_string(video.frames.size()));
  for (std::size_t i = 1; i < video.frames.size(); ++i) {
    require(video.frames[i].same_shape(video.frames[0]),
            ErrorCode::kDimensionMismatch,
            video.source_id + ": ragged frame " + std::to_string(i));
  }

  FaceClip clip;
  clip.source_id = video.source_id;
  clip.label = video.label;
  clip.latent_faces.reserve(video.frames.size());
  clip.content_faces.reserve(video.frames.size());
  clip.alignment.reserve(video.frames.size());
  for (std::size_t i = 0; i < video.frames.size(); ++i) {
    std::optional<FaceBox> box = detector.detect(video.frames[i]);
    require(box.has_value(), ErrorCode::kNoFaceFound,
            video.source_id + ": no face in frame " + std::to_string(i));
    Image face = crop(video.frames[i], box->x0, box->y0, box->size, box->size);
    clip.latent_faces.push_back(
        resize_bilinear(face, kLatentFaceSize, kLatentFaceSize));
    clip.content_faces.push_back(
        resize_bilinear(face, kContentFaceSize, kContentFaceSize));
    clip.alignment.push_back(*box);
  }
  return clip;
}

MockProjectionEncoder::MockProjectionEncoder(std::uint64_t seed) : seed_(seed) {
  Pcg32 rng(seed, /*stream=*/0x6d6f636bULL);  // "mock"
  const int dim = kLatentLevels * kLatentChannels;
  projection_.resize(dim, 64);
  const float scale = 1.0f / 8.0f;  // 1/sqrt(64)
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < 64; ++j) {
      projection_(i, j) = scale * static_cast<float>(rng.gaussian());
    }
  }
  level_offsets_.resize(kLatentLevels);
  for (int l = 0; l < kLatentLevels; ++l) {
    level_offsets_(l) = 0.5f * static_cast<float>(rng.gaussian());
  }

  std::uint64_t h = fnv1a64(name());
  h = fnv1a64(&seed_, sizeof(seed_), h);
  std::uint32_t dims[2] = {kLatentLevels, kLatentChannels};
  fingerprint_ = fnv1a64(dims, sizeof(dims), h);
}

Eigen::MatrixXf MockProjectionEncoder::encode(const Image& face256) const {
  require(face256.width == kLatentFaceSize && face256.height == kLatentFaceSize,
          ErrorCode::kEncoderFailure,
          "mock encoder expects 256x256 input, got " +
              std::to_string(face256.width) + "x" +
              std::to_string(face256.height));
  Eigen::MatrixXd gray8 = block_downsample(to_gray(face256), 8, 8);
  Eigen::VectorXf x(64);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) x(i * 8 + j) = static_cast<float>(gray8(i, j));

  Eigen::VectorXf flat = projection_ * x;
  Eigen::MatrixXf latent(kLatentLevels, kLatentChannels);
  for (int l = 0; l < kLatentLevels; ++l) {
    for (int c = 0; c < kLatentChannels; ++c) {
      latent(l, c) = flat(l * kLatentChannels + c) + level_offsets_(l);
    }
  }
  return latent;
}

StyleLatentSequence extract_style_latents(
    const FaceClip& clip, const InversionEncoderInterface& encoder) {
  require(clip.length() > 0, ErrorCode::kClipLengthError, "empty face clip");
  StyleLatentSequence seq;
  seq.source_id = clip.source_id;
  seq.label = clip.label;
  seq.latents = LatentTensor(clip.length(), kLatentLevels, kLatentChannels);
  for (int f = 0; f < clip.length(); ++f) {
    const Image& face = clip.latent_faces[static_cast<std::size_t>(f)];
    require(face.width == kLatentFaceSize && face.height == kLatentFaceSize,
            ErrorCode::kDimensionMismatch,
            clip.source_id + ": latent-path crop must be 256x256");
    Eigen::MatrixXf latent;
    try {
      latent = encoder.encode(face);
    } catch (const Error& e) {
      fail(ErrorCode::kEncoderFailure,
           clip.source_id + " frame " + std::to_string(f) + ": " + e.what());
    }
    require(latent.rows() == kLatentLevels && latent.cols() == kLatentChannels,
            ErrorCode::kEncoderFailure,
            "encoder returned wrong latent shape for frame " +
                std::to_string(f));
    for (int l = 0; l < kLatentLevels; ++l) {
      for (int c = 0; c < kLatentChannels; ++c) {
        seq.latents.at(f, l, c) = latent(l, c);
      }
    }
  }
  return seq;
}

namespace {

constexpr char kCacheMagic[4] = {'S', 'L', 'F', '1'};
constexpr std::size_t kHeaderSize = 64;
constexpr std::size_t kSourceIdField = 36;

void put_u32(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u64(unsigned char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void cache_store(const StyleLatentSequence& seq,
                 std::uint64_t encoder_fingerprint, const std::string& path) {
  require(seq.latents.levels == kLatentLevels &&
              seq.latents.channels == kLatentChannels,
          ErrorCode::kShapeError, "cache_store: latent tensor must be 18x512");
  require(seq.source_id.size() < kSourceIdField, ErrorCode::kRangeError,
          "source_id longer than " + std::to_string(kSourceIdField - 1) +
              " bytes: " + seq.source_id);

  unsigned char header[kHeaderSize] = {0};
  std::memcpy(header, kCacheMagic, 4);
  put_u32(header + 4, static_cast<std::uint32_t>(seq.latents.frames));
  put_u32(header + 8, static_cast<std::uint32_t>(seq.latents.levels));
  put_u32(header + 12, static_cast<std::uint32_t>(seq.latents.channels));
  header[16] = static_cast<unsigned char>(seq.label);
  put_u64(header + 20, encoder_fingerprint);
  std::memcpy(header + 28, seq.source_id.data(), seq.source_id.size());

  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  f.write(reinterpret_cast<const char*>(header), kHeaderSize);
  f.write(reinterpret_cast<const char*>(seq.latents.data.data()),
          static_cast<std::streamsize>(seq.latents.data.size() * sizeof(float)));
  require(f.good(), ErrorCode::kIoError, "short write to " + path);
}

StyleLatentSequence cache_load(const std::string& path,
                               LatentCacheHeader* header_out) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  unsigned char header[kHeaderSize];
  f.read(reinterpret_cast<char*>(header), kHeaderSize);
  require(f.gcount() == static_cast<std::streamsize>(kHeaderSize),
          ErrorCode::kCorruptCache, path + ": truncated header");
  require(std::memcmp(header, kCacheMagic, 4) == 0, ErrorCode::kCorruptCache,
          path + ": bad magic");

  LatentCacheHeader h;
  h.frame_count = get_u32(header + 4);
  h.level_count = get_u32(header + 8);
  h.channel_count = get_u32(header + 12);
  require(header[16] <= 2, ErrorCode::kCorruptCache, path + ": bad label byte");
  h.label = static_cast<Label>(header[16]);
  h.encoder_fingerprint = get_u64(header + 20);
  const char* sid = reinterpret_cast<const char*>(header + 28);
  h.source_id.assign(sid, strnlen(sid, kSourceIdField));

  require(h.level_count == kLatentLevels && h.channel_count == kLatentChannels,
          ErrorCode::kCorruptCache,
          path + ": unexpected level/channel counts in header");
  require(h.frame_count > 0, ErrorCode::kCorruptCache,
          path + ": zero frame count");

  StyleLatentSequence seq;
  seq.source_id = h.source_id;
  seq.label = h.label;
  seq.latents = LatentTensor(static_cast<int>(h.frame_count), kLatentLevels,
                             kLatentChannels);
  const std::streamsize expected =
      static_cast<std::streamsize>(seq.latents.data.size() * sizeof(float));
  f.read(reinterpret_cast<char*>(seq.latents.data.data()), expected);
  require(f.gcount() == expected, ErrorCode::kCorruptCache,
          path + ": payload shorter than header frame_count");
  f.peek();
  require(f.eof(), ErrorCode::kCorruptCache,
          path + ": trailing bytes after payload");

  if (header_out != nullptr) *header_out = h;
  return seq;
}

VideoClip read_frame_dir(const std::string& dir, const std::string& source_id,
                         Label label) {
  namespace fs = std::filesystem;
  require(fs::is_directory(dir), ErrorCode::kIoError,
          dir + " is not a directory");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".ppm") {
      names.push_back(entry.path().string());
    }
  }
  std::sort(names.begin(), names.end());
  require(!names.empty(), ErrorCode::kIoError, dir + ": no .ppm frames");

  VideoClip clip;
  clip.source_id = source_id;
  clip.label = label;
  clip.frames.reserve(names.size());
  for (const std::string& name : names) clip.frames.push_back(read_ppm(name));
  return clip;
}

}  // namespace slf
