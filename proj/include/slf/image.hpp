#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace slf {

// 8-bit interleaved RGB image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c = 3)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, 0) {}

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }
};

Image crop(const Image& img, int x0, int y0, int w, int h);
Image resize_bilinear(const Image& img, int out_w, int out_h);

// Luma in [0,1], BT.601 weights.
Eigen::MatrixXd to_gray(const Image& img);

// Exact block-average downsample of a grayscale matrix; input dims must be
// divisible by the output dims.
Eigen::MatrixXd block_downsample(const Eigen::MatrixXd& gray, int out_h,
                                 int out_w);

// Binary PPM (P6) round-trip; the frame-directory reader uses these.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

}  // namespace slf
