#include "slf/ad.hpp"

#include <cassert>
#include <cmath>

#include "slf/common.hpp"

namespace slf::ad {

const Mat& Var::value() const { return tape->node(id).value; }
const Mat& Var::grad() const { return tape->node(id).grad; }

Var Tape::leaf(Mat value, bool requires_grad) {
  return emplace(std::move(value), requires_grad, nullptr);
}

Var Tape::scalar(double value) {
  Mat m(1, 1);
  m(0, 0) = value;
  return leaf(std::move(m), false);
}

Var Tape::emplace(Mat value, bool requires_grad, std::function<void()> back) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) {
    node.grad = Mat::Zero(node.value.rows(), node.value.cols());
  }
  node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(const Var& root) {
  require(root.tape == this, ErrorCode::kShapeError, "backward: foreign var");
  Node& r = node(root.id);
  require(r.value.rows() == 1 && r.value.cols() == 1, ErrorCode::kShapeError,
          "backward root must be a 1x1 scalar");
  require(r.requires_grad, ErrorCode::kShapeError,
          "backward root does not depend on any parameter");
  r.grad(0, 0) = 1.0;
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.requires_grad && n.back) n.back();
  }
}

void Tape::clear() { nodes_.clear(); }

namespace {

bool any_grad(const Var& a) { return a.tape->node(a.id).requires_grad; }
bool any_grad(const Var& a, const Var& b) { return any_grad(a) || any_grad(b); }

Tape& same_tape(const Var& a, const Var& b) {
  assert(a.tape == b.tape);
  return *a.tape;
}

Mat& grad_of(const Var& v) { return v.tape->node(v.id).grad; }

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require(a.cols() == b.rows(), ErrorCode::kShapeError, "matmul dims");
  Mat value = a.value() * b.value();
  bool req = any_grad(a, b);
  Var out;
  out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, b, out]() {
      const Mat& g = out.grad();
      if (any_grad(a)) grad_of(a).noalias() += g * b.value().transpose();
      if (any_grad(b)) grad_of(b).noalias() += a.value().transpose() * g;
    };
  }
  return out;
}

Var matmul_tn(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require(a.rows() == b.rows(), ErrorCode::kShapeError, "matmul_tn dims");
  Mat value = a.value().transpose() * b.value();
  bool req = any_grad(a, b);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, b, out]() {
      const Mat& g = out.grad();
      if (any_grad(a)) grad_of(a).noalias() += b.value() * g.transpose();
      if (any_grad(b)) grad_of(b).noalias() += a.value() * g;
    };
  }
  return out;
}

Var matmul_nt(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require(a.cols() == b.cols(), ErrorCode::kShapeError, "matmul_nt dims");
  Mat value = a.value() * b.value().transpose();
  bool req = any_grad(a, b);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, b, out]() {
      const Mat& g = out.grad();
      if (any_grad(a)) grad_of(a).noalias() += g * b.value();
      if (any_grad(b)) grad_of(b).noalias() += g.transpose() * a.value();
    };
  }
  return out;
}

Var add(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeError,
          "add dims");
  Mat value = a.value() + b.value();
  bool req = any_grad(a, b);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, b, out]() {
      const Mat& g = out.grad();
      if (any_grad(a)) grad_of(a) += g;
      if (any_grad(b)) grad_of(b) += g;
    };
  }
  return out;
}

Var sub(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeError,
          "sub dims");
  Mat value = a.value() - b.value();
  bool req = any_grad(a, b);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, b, out]() {
      const Mat& g = out.grad();
      if (any_grad(a)) grad_of(a) += g;
      if (any_grad(b)) grad_of(b) -= g;
    };
  }
  return out;
}

Var cmul(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeError,
          "cmul dims");
  Mat value = a.value().cwiseProduct(b.value());
  bool req = any_grad(a, b);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, b, out]() {
      const Mat& g = out.grad();
      if (any_grad(a)) grad_of(a) += g.cwiseProduct(b.value());
      if (any_grad(b)) grad_of(b) += g.cwiseProduct(a.value());
    };
  }
  return out;
}

Var cmul_const(const Var& a, const Mat& mask) {
  Tape& t = *a.tape;
  require(a.rows() == mask.rows() && a.cols() == mask.cols(),
          ErrorCode::kShapeError, "cmul_const dims");
  Mat value = a.value().cwiseProduct(mask);
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, mask, out]() {
      grad_of(a) += out.grad().cwiseProduct(mask);
    };
  }
  return out;
}

Var add_colwise(const Var& m, const Var& col) {
  Tape& t = same_tape(m, col);
  require(col.cols() == 1 && col.rows() == m.rows(), ErrorCode::kShapeError,
          "add_colwise dims");
  Mat value = m.value().colwise() + Eigen::VectorXd(col.value().col(0));
  bool req = any_grad(m, col);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [m, col, out]() {
      const Mat& g = out.grad();
      if (any_grad(m)) grad_of(m) += g;
      if (any_grad(col)) grad_of(col) += g.rowwise().sum();
    };
  }
  return out;
}

Var scale(const Var& a, double s) {
  Tape& t = *a.tape;
  Mat value = a.value() * s;
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, s, out]() { grad_of(a) += out.grad() * s; };
  }
  return out;
}

Var add_scalar(const Var& a, double s) {
  Tape& t = *a.tape;
  Mat value = a.value().array() + s;
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() { grad_of(a) += out.grad(); };
  }
  return out;
}

Var sigmoid(const Var& a) {
  Tape& t = *a.tape;
  Mat value = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      const Mat& y = out.value();
      grad_of(a).array() +=
          out.grad().array() * y.array() * (1.0 - y.array());
    };
  }
  return out;
}

Var tanh_(const Var& a) {
  Tape& t = *a.tape;
  Mat value = a.value().array().tanh().matrix();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      const Mat& y = out.value();
      grad_of(a).array() += out.grad().array() * (1.0 - y.array().square());
    };
  }
  return out;
}

Var relu(const Var& a) {
  Tape& t = *a.tape;
  Mat value = a.value().cwiseMax(0.0);
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      grad_of(a).array() +=
          out.grad().array() * (a.value().array() > 0.0).cast<double>();
    };
  }
  return out;
}

Var gelu(const Var& a) {
  Tape& t = *a.tape;
  const double c = std::sqrt(2.0 / M_PI);
  Eigen::ArrayXXd x = a.value().array();
  Eigen::ArrayXXd inner = c * (x + 0.044715 * x.cube());
  Eigen::ArrayXXd th = inner.tanh();
  Mat value = (0.5 * x * (1.0 + th)).matrix();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out, c]() {
      Eigen::ArrayXXd x = a.value().array();
      Eigen::ArrayXXd inner = c * (x + 0.044715 * x.cube());
      Eigen::ArrayXXd th = inner.tanh();
      Eigen::ArrayXXd dinner = c * (1.0 + 3.0 * 0.044715 * x.square());
      Eigen::ArrayXXd dydx =
          0.5 * (1.0 + th) + 0.5 * x * (1.0 - th.square()) * dinner;
      grad_of(a).array() += out.grad().array() * dydx;
    };
  }
  return out;
}

Var sum(const Var& a) {
  Tape& t = *a.tape;
  Mat value(1, 1);
  value(0, 0) = a.value().sum();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      grad_of(a).array() += out.grad()(0, 0);
    };
  }
  return out;
}

Var mean(const Var& a) {
  Tape& t = *a.tape;
  double n = static_cast<double>(a.value().size());
  Mat value(1, 1);
  value(0, 0) = a.value().sum() / n;
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out, n]() {
      grad_of(a).array() += out.grad()(0, 0) / n;
    };
  }
  return out;
}

Var sumsq(const Var& a) {
  Tape& t = *a.tape;
  Mat value(1, 1);
  value(0, 0) = a.value().squaredNorm();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      grad_of(a) += 2.0 * out.grad()(0, 0) * a.value();
    };
  }
  return out;
}

Var colwise_sumsq(const Var& a) {
  Tape& t = *a.tape;
  Mat value = a.value().colwise().squaredNorm();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      const Mat& g = out.grad();  // 1 x C
      Mat& ga = grad_of(a);
      for (int j = 0; j < a.cols(); ++j) {
        ga.col(j) += 2.0 * g(0, j) * a.value().col(j);
      }
    };
  }
  return out;
}

Var mean_cols(const Var& a) {
  Tape& t = *a.tape;
  double n = static_cast<double>(a.cols());
  Mat value = a.value().rowwise().mean();
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out, n]() {
      grad_of(a).colwise() += Eigen::VectorXd(out.grad().col(0) / n);
    };
  }
  return out;
}

Var rows(const Var& a, int r0, int n) {
  Tape& t = *a.tape;
  require(r0 >= 0 && r0 + n <= a.rows(), ErrorCode::kShapeError, "rows block");
  Mat value = a.value().middleRows(r0, n);
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out, r0, n]() {
      grad_of(a).middleRows(r0, n) += out.grad();
    };
  }
  return out;
}

Var vstack(const std::vector<Var>& parts) {
  require(!parts.empty(), ErrorCode::kShapeError, "vstack: empty");
  Tape& t = *parts[0].tape;
  int cols = parts[0].cols();
  int total = 0;
  bool req = false;
  for (const Var& p : parts) {
    require(p.cols() == cols, ErrorCode::kShapeError, "vstack: column mismatch");
    total += p.rows();
    req = req || any_grad(p);
  }
  Mat value(total, cols);
  int r = 0;
  for (const Var& p : parts) {
    value.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    std::vector<Var> parts_copy = parts;
    t.node(out.id).back = [parts_copy, out]() {
      int r = 0;
      for (const Var& p : parts_copy) {
        if (any_grad(p)) grad_of(p) += out.grad().middleRows(r, p.rows());
        r += p.rows();
      }
    };
  }
  return out;
}

Var softmax_rows(const Var& a) {
  Tape& t = *a.tape;
  Mat value = a.value();
  for (int i = 0; i < value.rows(); ++i) {
    double mx = value.row(i).maxCoeff();
    Eigen::ArrayXd e = (value.row(i).transpose().array() - mx).exp();
    value.row(i) = (e / e.sum()).matrix().transpose();
  }
  bool req = any_grad(a);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [a, out]() {
      const Mat& y = out.value();
      const Mat& g = out.grad();
      Mat& ga = grad_of(a);
      for (int i = 0; i < y.rows(); ++i) {
        double dot = y.row(i).dot(g.row(i));
        ga.row(i).array() +=
            y.row(i).array() * (g.row(i).array() - dot);
      }
    };
  }
  return out;
}

Var layernorm_cols(const Var& x, const Var& gamma, const Var& beta, double eps) {
  Tape& t = *x.tape;
  int r = x.rows();
  require(gamma.rows() == r && gamma.cols() == 1, ErrorCode::kShapeError,
          "layernorm gamma shape");
  require(beta.rows() == r && beta.cols() == 1, ErrorCode::kShapeError,
          "layernorm beta shape");
  int c = x.cols();
  Mat xhat(r, c);
  Eigen::VectorXd inv_std(c);
  for (int j = 0; j < c; ++j) {
    double mu = x.value().col(j).mean();
    double var = (x.value().col(j).array() - mu).square().mean();
    double is = 1.0 / std::sqrt(var + eps);
    inv_std(j) = is;
    xhat.col(j) = (x.value().col(j).array() - mu).matrix() * is;
  }
  Mat value(r, c);
  for (int j = 0; j < c; ++j) {
    value.col(j) =
        gamma.value().col(0).cwiseProduct(xhat.col(j)) + beta.value().col(0);
  }
  bool req = any_grad(x) || any_grad(gamma) || any_grad(beta);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [x, gamma, beta, out, xhat, inv_std]() {
      const Mat& g = out.grad();
      int r = static_cast<int>(xhat.rows());
      int c = static_cast<int>(xhat.cols());
      if (any_grad(gamma)) {
        grad_of(gamma).col(0) += g.cwiseProduct(xhat).rowwise().sum();
      }
      if (any_grad(beta)) {
        grad_of(beta).col(0) += g.rowwise().sum();
      }
      if (any_grad(x)) {
        Mat& gx = grad_of(x);
        for (int j = 0; j < c; ++j) {
          Eigen::ArrayXd dxhat =
              g.col(j).array() * gamma.value().col(0).array();
          double m1 = dxhat.mean();
          double m2 = (dxhat * xhat.col(j).array()).mean();
          gx.col(j).array() +=
              inv_std(j) * (dxhat - m1 - xhat.col(j).array() * m2);
        }
      }
      (void)r;
    };
  }
  return out;
}

Var bce_with_logits(const Var& logits, const Mat& targets) {
  Tape& t = *logits.tape;
  require(logits.rows() == targets.rows() && logits.cols() == targets.cols(),
          ErrorCode::kShapeError, "bce shapes");
  double n = static_cast<double>(targets.size());
  Eigen::ArrayXXd z = logits.value().array();
  Eigen::ArrayXXd y = targets.array();
  // max(z,0) - z*y + log(1 + exp(-|z|)): stable for large |z|.
  Eigen::ArrayXXd per =
      z.max(0.0) - z * y + ((-z.abs()).exp() + 1.0).log();
  Mat value(1, 1);
  value(0, 0) = per.sum() / n;
  bool req = any_grad(logits);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [logits, targets, out, n]() {
      Eigen::ArrayXXd z = logits.value().array();
      Eigen::ArrayXXd sig = 1.0 / (1.0 + (-z).exp());
      grad_of(logits).array() +=
          out.grad()(0, 0) * (sig - targets.array()) / n;
    };
  }
  return out;
}

namespace {

inline int clamp_int(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace

Var conv3d(const Var& input, const Var& weight, const Var& bias,
           const ConvShape& s) {
  Tape& t = *input.tape;
  int cin = input.rows();
  require(input.cols() == static_cast<long>(s.in_t) * s.in_h * s.in_w,
          ErrorCode::kShapeError, "conv3d input columns");
  require(weight.cols() == static_cast<long>(cin) * s.kt * s.kh * s.kw,
          ErrorCode::kShapeError, "conv3d weight columns");
  int cout = weight.rows();
  bool has_bias = bias.valid();
  if (has_bias) {
    require(bias.rows() == cout && bias.cols() == 1, ErrorCode::kShapeError,
            "conv3d bias shape");
  }
  const int ot = s.out_t(), oh = s.out_h(), ow = s.out_w();
  const int positions = ot * oh * ow;
  const Mat& x = input.value();
  const Mat& w = weight.value();

  // Patch matrix (cin*kt*kh*kw x positions), then one GEMM.
  // Temporal padding clamps to the edge frame; spatial padding is zero.
  const int patch = cin * s.kt * s.kh * s.kw;
  Mat patches = Mat::Zero(patch, positions);
  for (int to = 0; to < ot; ++to) {
    for (int ho = 0; ho < oh; ++ho) {
      for (int wo = 0; wo < ow; ++wo) {
        int col = (to * oh + ho) * ow + wo;
        int row = 0;
        for (int dt = 0; dt < s.kt; ++dt) {
          int ti = clamp_int(to * s.st - s.pt + dt, 0, s.in_t - 1);
          for (int dh = 0; dh < s.kh; ++dh) {
            int hi = ho * s.sh - s.ph + dh;
            for (int dw = 0; dw < s.kw; ++dw, row += cin) {
              int wi = wo * s.sw - s.pw + dw;
              if (hi < 0 || hi >= s.in_h || wi < 0 || wi >= s.in_w) continue;
              int icol = (ti * s.in_h + hi) * s.in_w + wi;
              patches.block(row, col, cin, 1) = x.col(icol);
            }
          }
        }
      }
    }
  }

  Mat value = w * patches;
  if (has_bias) value.colwise() += Eigen::VectorXd(bias.value().col(0));

  bool req = any_grad(input) || any_grad(weight) ||
             (has_bias && any_grad(bias));
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    ConvShape shape = s;
    t.node(out.id).back = [input, weight, bias, out, shape, patches, has_bias,
                           cin]() {
      const Mat& g = out.grad();
      if (has_bias && any_grad(bias)) {
        grad_of(bias).col(0) += g.rowwise().sum();
      }
      if (any_grad(weight)) {
        grad_of(weight).noalias() += g * patches.transpose();
      }
      if (any_grad(input)) {
        Mat gpatches = weight.value().transpose() * g;
        Mat& gx = grad_of(input);
        const ConvShape& s = shape;
        const int ot = s.out_t(), oh = s.out_h(), ow = s.out_w();
        for (int to = 0; to < ot; ++to) {
          for (int ho = 0; ho < oh; ++ho) {
            for (int wo = 0; wo < ow; ++wo) {
              int col = (to * oh + ho) * ow + wo;
              int row = 0;
              for (int dt = 0; dt < s.kt; ++dt) {
                int ti = clamp_int(to * s.st - s.pt + dt, 0, s.in_t - 1);
                for (int dh = 0; dh < s.kh; ++dh) {
                  int hi = ho * s.sh - s.ph + dh;
                  for (int dw = 0; dw < s.kw; ++dw, row += cin) {
                    int wi = wo * s.sw - s.pw + dw;
                    if (hi < 0 || hi >= s.in_h || wi < 0 || wi >= s.in_w)
                      continue;
                    int icol = (ti * s.in_h + hi) * s.in_w + wi;
                    gx.col(icol) += gpatches.block(row, col, cin, 1);
                  }
                }
              }
            }
          }
        }
      }
    };
  }
  return out;
}

Var avgpool_spatial(const Var& input, int in_t, int in_h, int in_w,
                    int factor) {
  Tape& t = *input.tape;
  require(in_h % factor == 0 && in_w % factor == 0, ErrorCode::kShapeError,
          "avgpool factor must divide spatial dims");
  require(input.cols() == static_cast<long>(in_t) * in_h * in_w,
          ErrorCode::kShapeError, "avgpool input columns");
  int c = input.rows();
  int oh = in_h / factor, ow = in_w / factor;
  Mat value = Mat::Zero(c, static_cast<long>(in_t) * oh * ow);
  const Mat& x = input.value();
  const double inv = 1.0 / (factor * factor);
  for (int ti = 0; ti < in_t; ++ti) {
    for (int ho = 0; ho < oh; ++ho) {
      for (int wo = 0; wo < ow; ++wo) {
        int ocol = (ti * oh + ho) * ow + wo;
        for (int dh = 0; dh < factor; ++dh) {
          for (int dw = 0; dw < factor; ++dw) {
            int icol = (ti * in_h + ho * factor + dh) * in_w + wo * factor + dw;
            value.col(ocol) += x.col(icol);
          }
        }
        value.col(ocol) *= inv;
      }
    }
  }
  bool req = any_grad(input);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [input, out, in_t, in_h, in_w, factor, oh, ow,
                           inv]() {
      const Mat& g = out.grad();
      Mat& gx = grad_of(input);
      for (int ti = 0; ti < in_t; ++ti) {
        for (int ho = 0; ho < oh; ++ho) {
          for (int wo = 0; wo < ow; ++wo) {
            int ocol = (ti * oh + ho) * ow + wo;
            for (int dh = 0; dh < factor; ++dh) {
              for (int dw = 0; dw < factor; ++dw) {
                int icol =
                    (ti * in_h + ho * factor + dh) * in_w + wo * factor + dw;
                gx.col(icol) += g.col(ocol) * inv;
              }
            }
          }
        }
      }
    };
  }
  return out;
}

Var spatial_mean(const Var& input, int in_t, int in_h, int in_w) {
  Tape& t = *input.tape;
  require(input.cols() == static_cast<long>(in_t) * in_h * in_w,
          ErrorCode::kShapeError, "spatial_mean input columns");
  int c = input.rows();
  const double inv = 1.0 / (in_h * in_w);
  Mat value = Mat::Zero(c, in_t);
  const Mat& x = input.value();
  for (int ti = 0; ti < in_t; ++ti) {
    for (int p = 0; p < in_h * in_w; ++p) {
      value.col(ti) += x.col(ti * in_h * in_w + p);
    }
    value.col(ti) *= inv;
  }
  bool req = any_grad(input);
  Var out = t.emplace(std::move(value), req, nullptr);
  if (req) {
    t.node(out.id).back = [input, out, in_t, in_h, in_w, inv]() {
      const Mat& g = out.grad();
      Mat& gx = grad_of(input);
      for (int ti = 0; ti < in_t; ++ti) {
        for (int p = 0; p < in_h * in_w; ++p) {
          gx.col(ti * in_h * in_w + p) += g.col(ti) * inv;
        }
      }
    };
  }
  return out;
}

}  // namespace slf::ad
