#include "slf/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace slf::nn {

Mat uniform_init(int rows, int cols, double bound, Pcg32& rng) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

std::uint64_t registry_hash(const ParamRegistry& registry) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    h = fnv1a64(registry.name(i), h);
    const Mat& m = registry.value(i);
    std::uint32_t dims[2] = {static_cast<std::uint32_t>(m.rows()),
                             static_cast<std::uint32_t>(m.cols())};
    h = fnv1a64(dims, sizeof(dims), h);
    h = fnv1a64(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double), h);
  }
  return h;
}

void AdamOptimizer::step(ParamRegistry& params, const std::vector<Mat>& grads) {
  require(grads.size() == params.size(), ErrorCode::kShapeError,
          "adam: gradient count mismatch");
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = Mat::Zero(params.value(i).rows(), params.value(i).cols());
      v_[i] = Mat::Zero(params.value(i).rows(), params.value(i).cols());
    }
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Mat& g = grads[i];
    require(g.rows() == params.value(i).rows() &&
                g.cols() == params.value(i).cols(),
            ErrorCode::kShapeError, "adam: gradient shape mismatch at " +
                                        params.name(i));
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    Mat mhat = m_[i] / bc1;
    Mat vhat = v_[i] / bc2;
    params.value(i).array() -=
        lr_ * mhat.array() / (vhat.array().sqrt() + eps_);
  }
}

void SgdMomentum::step(ParamRegistry& params, const std::vector<Mat>& grads,
                       double lr) {
  require(grads.size() == params.size(), ErrorCode::kShapeError,
          "sgd: gradient count mismatch");
  if (velocity_.empty()) {
    velocity_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity_[i] = Mat::Zero(params.value(i).rows(), params.value(i).cols());
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat g = grads[i];
    if (weight_decay_ != 0.0) g += weight_decay_ * params.value(i);
    velocity_[i] = momentum_ * velocity_[i] + g;
    params.value(i) -= lr * velocity_[i];
  }
}

namespace {

void put_u32(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

constexpr char kWeightsMagic[4] = {'S', 'L', 'F', 'W'};

}  // namespace

void save_weights(const std::string& path, const ParamRegistry& registry) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  f.write(kWeightsMagic, 4);
  put_u32(f, static_cast<std::uint32_t>(registry.size()));
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const std::string& name = registry.name(i);
    const Mat& m = registry.value(i);
    put_u32(f, static_cast<std::uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(f, static_cast<std::uint32_t>(m.rows()));
    put_u32(f, static_cast<std::uint32_t>(m.cols()));
    f.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  require(f.good(), ErrorCode::kIoError, "short write to " + path);
}

void load_weights(const std::string& path, ParamRegistry& registry) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  require(f.gcount() == 4 && std::memcmp(magic, kWeightsMagic, 4) == 0,
          ErrorCode::kCorruptCache, path + ": bad weights magic");
  std::uint32_t count = get_u32(f);
  require(count == registry.size(), ErrorCode::kCorruptCache,
          path + ": tensor count mismatch");
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = get_u32(f);
    require(name_len < 4096, ErrorCode::kCorruptCache, "oversized name");
    std::string name(name_len, '\0');
    f.read(name.data(), name_len);
    std::uint32_t rows = get_u32(f);
    std::uint32_t cols = get_u32(f);
    require(f.good(), ErrorCode::kCorruptCache, path + ": truncated record");
    require(name == registry.name(i), ErrorCode::kCorruptCache,
            path + ": tensor order mismatch, expected " + registry.name(i) +
                " got " + name);
    Mat& m = registry.value(i);
    require(static_cast<std::uint32_t>(m.rows()) == rows &&
                static_cast<std::uint32_t>(m.cols()) == cols,
            ErrorCode::kCorruptCache, path + ": shape mismatch for " + name);
    f.read(reinterpret_cast<char*>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(double)));
    require(f.gcount() ==
                static_cast<std::streamsize>(m.size() * sizeof(double)),
            ErrorCode::kCorruptCache, path + ": truncated tensor " + name);
  }
}

void write_manifest(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream f(path);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  for (const auto& [key, value] : kv) {
    f << key << " = " << value << "\n";
  }
  require(f.good(), ErrorCode::kIoError, "short write to " + path);
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::kIoError, "cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    auto pos = line.find(" = ");
    if (pos == std::string::npos) continue;
    kv[line.substr(0, pos)] = line.substr(pos + 3);
  }
  return kv;
}

}  // namespace slf::nn
