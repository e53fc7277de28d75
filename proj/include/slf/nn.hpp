#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "slf/common.hpp"
#include "slf/rng.hpp"

namespace slf::nn {

using Mat = Eigen::MatrixXd;

// Named views over module-owned parameter matrices. Registration order is
// the canonical order for optimizer state and gradient buffers.
class ParamRegistry {
 public:
  void add(const std::string& name, Mat* value) {
    require(value != nullptr, ErrorCode::kShapeError, "null param " + name);
    for (const auto& [existing, ptr] : items_) {
      require(existing != name, ErrorCode::kShapeError,
              "duplicate param name " + name);
    }
    items_.emplace_back(name, value);
  }

  std::size_t size() const { return items_.size(); }
  const std::string& name(std::size_t i) const { return items_[i].first; }
  Mat& value(std::size_t i) { return *items_[i].second; }
  const Mat& value(std::size_t i) const { return *items_[i].second; }

  std::size_t total_coeffs() const {
    std::size_t n = 0;
    for (const auto& [name, ptr] : items_) n += ptr->size();
    return n;
  }

 private:
  std::vector<std::pair<std::string, Mat*>> items_;
};

Mat uniform_init(int rows, int cols, double bound, Pcg32& rng);

// Content hash over parameter names, shapes and raw coefficient bytes.
std::uint64_t registry_hash(const ParamRegistry& registry);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamRegistry& params, const std::vector<Mat>& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_count_ = 0;
  std::vector<Mat> m_, v_;
};

class SgdMomentum {
 public:
  SgdMomentum(double momentum, double weight_decay)
      : momentum_(momentum), weight_decay_(weight_decay) {}

  void step(ParamRegistry& params, const std::vector<Mat>& grads, double lr);

 private:
  double momentum_, weight_decay_;
  std::vector<Mat> velocity_;
};

// Checkpoint directory layout: "weights.bin" with all tensors, plus a
// human-readable "manifest.txt" (key = value lines) written by the caller.
void save_weights(const std::string& path, const ParamRegistry& registry);
void load_weights(const std::string& path, ParamRegistry& registry);

// manifest.txt helpers.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);
std::map<std::string, std::string> read_manifest(const std::string& path);

}  // namespace slf::nn
