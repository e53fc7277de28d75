#include "slf/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "slf/common.hpp"

namespace slf {

Image crop(const Image& img, int x0, int y0, int w, int h) {
  require(x0 >= 0 && y0 >= 0 && x0 + w <= img.width && y0 + h <= img.height,
          ErrorCode::kDimensionMismatch, "crop box outside image");
  Image out(w, h, img.channels);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src =
        &img.data[(static_cast<std::size_t>(y0 + y) * img.width + x0) *
                  img.channels];
    std::copy(src, src + static_cast<std::size_t>(w) * img.channels,
              &out.data[static_cast<std::size_t>(y) * w * img.channels]);
  }
  return out;
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
  Image out(out_w, out_h, img.channels);
  if (img.width == out_w && img.height == out_h) {
    out.data = img.data;
    return out;
  }
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y1 = std::min(y0 + 1, img.height - 1);
    y0 = std::max(y0, 0);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x1 = std::min(x0 + 1, img.width - 1);
      x0 = std::max(x0, 0);
      for (int c = 0; c < img.channels; ++c) {
        double top = (1.0 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
        double bot = (1.0 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
        double v = (1.0 - wy) * top + wy * bot;
        out.at(x, y, c) = static_cast<std::uint8_t>(
            std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

Eigen::MatrixXd to_gray(const Image& img) {
  Eigen::MatrixXd gray(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double v;
      if (img.channels >= 3) {
        v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
            0.114 * img.at(x, y, 2);
      } else {
        v = img.at(x, y, 0);
      }
      gray(y, x) = v / 255.0;
    }
  }
  return gray;
}

Eigen::MatrixXd block_downsample(const Eigen::MatrixXd& gray, int out_h,
                                 int out_w) {
  require(gray.rows() % out_h == 0 && gray.cols() % out_w == 0,
          ErrorCode::kDimensionMismatch, "block_downsample: non-integer block");
  int bh = static_cast<int>(gray.rows()) / out_h;
  int bw = static_cast<int>(gray.cols()) / out_w;
  Eigen::MatrixXd out(out_h, out_w);
  for (int i = 0; i < out_h; ++i) {
    for (int j = 0; j < out_w; ++j) {
      out(i, j) = gray.block(i * bh, j * bw, bh, bw).mean();
    }
  }
  return out;
}

void write_ppm(const Image& img, const std::string& path) {
  require(img.channels == 3, ErrorCode::kDimensionMismatch,
          "write_ppm expects RGB");
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  require(f.good(), ErrorCode::kIoError, "short write to " + path);
}

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  std::string magic;
  f >> magic;
  require(magic == "P6", ErrorCode::kIoError, path + ": not a P6 ppm");
  int w = 0, h = 0, maxv = 0;
  f >> w >> h >> maxv;
  require(w > 0 && h > 0 && maxv == 255, ErrorCode::kIoError,
          path + ": unsupported ppm header");
  f.get();  // single whitespace after header
  Image img(w, h, 3);
  f.read(reinterpret_cast<char*>(img.data.data()),
         static_cast<std::streamsize>(img.data.size()));
  require(f.gcount() == static_cast<std::streamsize>(img.data.size()),
          ErrorCode::kIoError, path + ": truncated ppm payload");
  return img;
}

}  // namespace slf
