#include "slf/style_flow.hpp"

#include <cmath>

namespace slf {

const char* to_string(LevelBand band) {
  switch (band) {
    case LevelBand::kCoarse: return "coarse";
    case LevelBand::kMiddle: return "middle";
    case LevelBand::kFine: return "fine";
    case LevelBand::kTotal: return "total";
  }
  return "?";
}

LevelBand band_from_string(const std::string& s) {
  if (s == "coarse") return LevelBand::kCoarse;
  if (s == "middle") return LevelBand::kMiddle;
  if (s == "fine") return LevelBand::kFine;
  if (s == "total") return LevelBand::kTotal;
  fail(ErrorCode::kTypeMismatch, "unknown level band '" + s + "'");
}

LevelRange band_range(LevelBand band) {
  switch (band) {
    case LevelBand::kCoarse: return {0, 3};
    case LevelBand::kMiddle: return {3, 4};
    case LevelBand::kFine: return {7, 11};
    case LevelBand::kTotal: return {0, kLatentLevels};
  }
  return {0, 0};
}

StyleFlow compute_style_flow(const StyleLatentSequence& seq) {
  require(seq.frames() >= 2, ErrorCode::kTooShort,
          seq.source_id + ": style flow needs at least 2 frames, got " +
              std::to_string(seq.frames()));
  const LatentTensor& s = seq.latents;
  StyleFlow out;
  out.source_id = seq.source_id;
  out.label = seq.label;
  out.flow = LatentTensor(s.frames - 1, s.levels, s.channels);
  const std::size_t stride = static_cast<std::size_t>(s.levels) * s.channels;
  for (int f = 0; f + 1 < s.frames; ++f) {
    const float* cur = &s.data[static_cast<std::size_t>(f) * stride];
    const float* next = cur + stride;
    float* dst = &out.flow.data[static_cast<std::size_t>(f) * stride];
    for (std::size_t i = 0; i < stride; ++i) dst[i] = next[i] - cur[i];
  }
  return out;
}

namespace {

LatentTensor slice_tensor(const LatentTensor& t, LevelRange range) {
  LatentTensor out(t.frames, range.count, t.channels);
  for (int f = 0; f < t.frames; ++f) {
    for (int l = 0; l < range.count; ++l) {
      const float* src = &t.data[t.index(f, range.first + l, 0)];
      float* dst = &out.data[out.index(f, l, 0)];
      std::copy(src, src + t.channels, dst);
    }
  }
  return out;
}

}  // namespace

StyleLatentSequence slice_levels(const StyleLatentSequence& seq,
                                 LevelBand band) {
  if (band == LevelBand::kTotal) return seq;
  StyleLatentSequence out;
  out.source_id = seq.source_id;
  out.label = seq.label;
  out.latents = slice_tensor(seq.latents, band_range(band));
  return out;
}

StyleFlow slice_levels(const StyleFlow& flow, LevelBand band) {
  if (band == LevelBand::kTotal) return flow;
  StyleFlow out;
  out.source_id = flow.source_id;
  out.label = flow.label;
  out.flow = slice_tensor(flow.flow, band_range(band));
  return out;
}

VarianceProfile level_variance_profile(const std::vector<StyleFlow>& flows,
                                       VarianceMode mode, Label class_label) {
  require(!flows.empty(), ErrorCode::kEmptySet,
          "variance profile of an empty flow set");
  const int levels = flows[0].flow.levels;
  const int channels = flows[0].flow.channels;
  for (const StyleFlow& f : flows) {
    require(f.flow.levels == levels && f.flow.channels == channels,
            ErrorCode::kShapeError,
            "variance profile: non-uniform flow shapes");
  }

  VarianceProfile profile;
  profile.clip_count = static_cast<int>(flows.size());
  profile.class_label = class_label;
  profile.per_level_variance.assign(static_cast<std::size_t>(levels), 0.0);

  if (mode == VarianceMode::kPooled) {
    // Two passes: pooled mean, then pooled squared deviation.
    std::vector<double> sum(static_cast<std::size_t>(levels), 0.0);
    std::vector<double> count(static_cast<std::size_t>(levels), 0.0);
    for (const StyleFlow& f : flows) {
      for (int t = 0; t < f.flow.frames; ++t) {
        for (int l = 0; l < levels; ++l) {
          const float* p = &f.flow.data[f.flow.index(t, l, 0)];
          double s = 0.0;
          for (int c = 0; c < channels; ++c) s += p[c];
          sum[static_cast<std::size_t>(l)] += s;
          count[static_cast<std::size_t>(l)] += channels;
        }
      }
    }
    std::vector<double> mean(static_cast<std::size_t>(levels), 0.0);
    for (int l = 0; l < levels; ++l) {
      mean[static_cast<std::size_t>(l)] =
          sum[static_cast<std::size_t>(l)] / count[static_cast<std::size_t>(l)];
    }
    for (const StyleFlow& f : flows) {
      for (int t = 0; t < f.flow.frames; ++t) {
        for (int l = 0; l < levels; ++l) {
          const float* p = &f.flow.data[f.flow.index(t, l, 0)];
          double m = mean[static_cast<std::size_t>(l)];
          double acc = 0.0;
          for (int c = 0; c < channels; ++c) {
            double d = p[c] - m;
            acc += d * d;
          }
          profile.per_level_variance[static_cast<std::size_t>(l)] += acc;
        }
      }
    }
    for (int l = 0; l < levels; ++l) {
      profile.per_level_variance[static_cast<std::size_t>(l)] /=
          count[static_cast<std::size_t>(l)];
    }
  } else {
    for (const StyleFlow& f : flows) {
      for (int l = 0; l < levels; ++l) {
        double s = 0.0, s2 = 0.0;
        double n = static_cast<double>(f.flow.frames) * channels;
        for (int t = 0; t < f.flow.frames; ++t) {
          const float* p = &f.flow.data[f.flow.index(t, l, 0)];
          for (int c = 0; c < channels; ++c) {
            s += p[c];
            s2 += static_cast<double>(p[c]) * p[c];
          }
        }
        double m = s / n;
        profile.per_level_variance[static_cast<std::size_t>(l)] +=
            s2 / n - m * m;
      }
    }
    for (double& v : profile.per_level_variance) {
      v /= static_cast<double>(flows.size());
      if (v < 0.0) v = 0.0;  // guard tiny negative from cancellation
    }
  }
  return profile;
}

}  // namespace slf
