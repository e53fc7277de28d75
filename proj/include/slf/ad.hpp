#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace slf::ad {

using Mat = Eigen::MatrixXd;

class Tape;

// Lightweight handle to a node on a tape. Copyable; valid as long as the
// tape is alive and has not been cleared.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Mat& value() const;
  const Mat& grad() const;
  int rows() const { return static_cast<int>(value().rows()); }
  int cols() const { return static_cast<int>(value().cols()); }
};

// Reverse-mode tape over dense double matrices. Ops evaluate eagerly and
// record a backward closure. backward() walks the tape once in reverse.
class Tape {
 public:
  Var leaf(Mat value, bool requires_grad = false);
  Var scalar(double value);

  // Root must be 1x1. Seeds d(root)/d(root) = 1 and accumulates gradients
  // into every node with requires_grad.
  void backward(const Var& root);

  void clear();
  std::size_t size() const { return nodes_.size(); }

  // Internal; used by op implementations.
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    std::function<void()> back;
  };
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Var emplace(Mat value, bool requires_grad, std::function<void()> back);

 private:
  std::vector<Node> nodes_;
};

// ---- arithmetic ----
Var matmul(const Var& a, const Var& b);     // A * B
Var matmul_tn(const Var& a, const Var& b);  // A^T * B
Var matmul_nt(const Var& a, const Var& b);  // A * B^T
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var cmul(const Var& a, const Var& b);                 // elementwise product
Var cmul_const(const Var& a, const Mat& mask);        // elementwise, no grad to mask
Var add_colwise(const Var& m, const Var& col);        // m + col broadcast over columns
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);

// ---- elementwise nonlinearities ----
Var sigmoid(const Var& a);
Var tanh_(const Var& a);
Var relu(const Var& a);
Var gelu(const Var& a);  // tanh approximation

// ---- reductions / structure ----
Var sum(const Var& a);            // 1x1
Var mean(const Var& a);           // 1x1
Var sumsq(const Var& a);          // 1x1 sum of squares
Var colwise_sumsq(const Var& a);  // 1xC row of per-column squared norms
Var mean_cols(const Var& a);      // Rx1 mean over columns
Var rows(const Var& a, int r0, int n);  // contiguous row block
Var vstack(const std::vector<Var>& parts);
Var softmax_rows(const Var& a);   // per-row softmax over columns

// Per-column layer normalization: each column is standardized over its rows,
// then scaled/shifted by gamma/beta (Rx1 each).
Var layernorm_cols(const Var& x, const Var& gamma, const Var& beta,
                   double eps = 1e-5);

// Mean binary cross-entropy on logits; targets carry no gradient.
Var bce_with_logits(const Var& logits, const Mat& targets);

// ---- volumetric ops ----
// Feature maps are stored as (channels x T*H*W) with column index
// (t*H + h)*W + w. Padding is zero on spatial axes and clamp-to-edge on the
// temporal axis (keeps time-constant inputs time-constant through temporal
// kernels).
struct ConvShape {
  int in_t = 0, in_h = 0, in_w = 0;
  int kt = 1, kh = 1, kw = 1;
  int st = 1, sh = 1, sw = 1;
  int pt = 0, ph = 0, pw = 0;

  int out_t() const { return (in_t + 2 * pt - kt) / st + 1; }
  int out_h() const { return (in_h + 2 * ph - kh) / sh + 1; }
  int out_w() const { return (in_w + 2 * pw - kw) / sw + 1; }
};

// weight is (C_out x C_in*kt*kh*kw); bias optional (C_out x 1 or invalid Var).
Var conv3d(const Var& input, const Var& weight, const Var& bias,
           const ConvShape& shape);

// Non-overlapping spatial average pooling by an integer factor.
Var avgpool_spatial(const Var& input, int t, int h, int w, int factor);

// Global spatial mean: (C x T*H*W) -> (C x T).
Var spatial_mean(const Var& input, int t, int h, int w);

}  // namespace slf::ad
