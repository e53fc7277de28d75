#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slf/common.hpp"

namespace slf {

// Frame-major (frames x levels x channels) float32 tensor. Holds per-frame
// style latents and their temporal differences; float32 matches the on-disk
// cache payload bit for bit.
struct LatentTensor {
  int frames = 0;
  int levels = 0;
  int channels = 0;
  std::vector<float> data;

  LatentTensor() = default;
  LatentTensor(int f, int l, int c)
      : frames(f), levels(l), channels(c),
        data(static_cast<std::size_t>(f) * l * c, 0.0f) {}

  std::size_t index(int f, int l, int c) const {
    return (static_cast<std::size_t>(f) * levels + l) * channels + c;
  }
  float& at(int f, int l, int c) { return data[index(f, l, c)]; }
  float at(int f, int l, int c) const { return data[index(f, l, c)]; }

  std::size_t size() const { return data.size(); }
  int flat_dim() const { return levels * channels; }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  // One frame as a flattened column (levels*channels), level-major.
  Eigen::VectorXd frame_vector(int f) const {
    Eigen::VectorXd v(flat_dim());
    const float* p = &data[index(f, 0, 0)];
    for (int i = 0; i < flat_dim(); ++i) v(i) = p[i];
    return v;
  }

  // Window [start, start+count) copied into a fresh tensor.
  LatentTensor window(int start, int count) const {
    require(start >= 0 && start + count <= frames, ErrorCode::kShapeError,
            "tensor window out of range");
    LatentTensor out(count, levels, channels);
    std::copy(data.begin() + static_cast<std::ptrdiff_t>(index(start, 0, 0)),
              data.begin() + static_cast<std::ptrdiff_t>(index(start + count - 1,
                                                               levels - 1,
                                                               channels - 1)) +
                  1,
              out.data.begin());
    return out;
  }
};

}  // namespace slf
