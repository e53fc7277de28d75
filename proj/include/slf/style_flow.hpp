#pragma once

#include <string>
#include <vector>

#include "slf/pipeline.hpp"
#include "slf/tensor.hpp"

namespace slf {

// First-order temporal difference of a latent sequence:
// flow[i] = latents[i+1] - latents[i], shape (frames-1) x 18 x 512.
struct StyleFlow {
  LatentTensor flow;
  std::string source_id;
  Label label = Label::kUnlabeled;

  int timesteps() const { return flow.frames; }
};

enum class LevelBand { kCoarse, kMiddle, kFine, kTotal };

const char* to_string(LevelBand band);
LevelBand band_from_string(const std::string& s);

// Half-open level range [first, first+count) for a band of an 18-level
// tensor: coarse 0-2, middle 3-6, fine 7-17, total identity.
struct LevelRange {
  int first = 0;
  int count = 0;
};
LevelRange band_range(LevelBand band);

StyleFlow compute_style_flow(const StyleLatentSequence& seq);

StyleLatentSequence slice_levels(const StyleLatentSequence& seq, LevelBand band);
StyleFlow slice_levels(const StyleFlow& flow, LevelBand band);

struct VarianceProfile {
  std::vector<double> per_level_variance;  // one entry per level
  int clip_count = 0;
  Label class_label = Label::kUnlabeled;
};

enum class VarianceMode {
  kPooled,          // population variance over all (clip, frame, channel)
  kPerClipAverage,  // per-clip population variance, averaged over clips
};

VarianceProfile level_variance_profile(
    const std::vector<StyleFlow>& flows,
    VarianceMode mode = VarianceMode::kPooled,
    Label class_label = Label::kUnlabeled);

}  // namespace slf
