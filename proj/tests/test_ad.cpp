#include "slf/ad.hpp"

#include <cmath>

#include "doctest.h"
#include "grad_check.hpp"
#include "slf/rng.hpp"

using slf::Pcg32;
using slf::ad::Mat;
using slf::ad::Tape;
using slf::ad::Var;
using slf::testing::grad_check;
using slf::testing::GraphFn;

namespace {

Mat random_mat(int r, int c, Pcg32& rng, double scale = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * rng.gaussian();
  return m;
}

// Projects an op output to a scalar through a fixed random weighting so the
// upstream gradient is non-uniform.
Var weighted_sum(Tape& t, const Var& v, const Mat& w) {
  return slf::ad::sum(slf::ad::cmul_const(v, w));
}

}  // namespace

TEST_CASE("matmul variants match finite differences") {
  Pcg32 rng(11);
  Mat a = random_mat(3, 4, rng), b = random_mat(4, 5, rng);
  Mat w35 = random_mat(3, 5, rng);

  GraphFn plain = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var va = t.leaf(p[0], true), vb = t.leaf(p[1], true);
    if (lv) { lv->push_back(va); lv->push_back(vb); }
    return weighted_sum(t, slf::ad::matmul(va, vb), w35);
  };
  auto r = grad_check(plain, {a, b});
  CHECK(r.max_rel_error < 1e-6);

  Mat at = random_mat(4, 3, rng);
  GraphFn tn = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var va = t.leaf(p[0], true), vb = t.leaf(p[1], true);
    if (lv) { lv->push_back(va); lv->push_back(vb); }
    return weighted_sum(t, slf::ad::matmul_tn(va, vb), w35);
  };
  r = grad_check(tn, {at, b});
  CHECK(r.max_rel_error < 1e-6);

  Mat bt = random_mat(5, 4, rng);
  GraphFn nt = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var va = t.leaf(p[0], true), vb = t.leaf(p[1], true);
    if (lv) { lv->push_back(va); lv->push_back(vb); }
    return weighted_sum(t, slf::ad::matmul_nt(va, vb), w35);
  };
  r = grad_check(nt, {a, bt});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("elementwise ops and broadcasts match finite differences") {
  Pcg32 rng(12);
  Mat a = random_mat(4, 3, rng), b = random_mat(4, 3, rng);
  Mat col = random_mat(4, 1, rng);
  Mat w = random_mat(4, 3, rng);

  GraphFn fn = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var va = t.leaf(p[0], true), vb = t.leaf(p[1], true),
        vc = t.leaf(p[2], true);
    if (lv) { lv->push_back(va); lv->push_back(vb); lv->push_back(vc); }
    Var x = slf::ad::add(slf::ad::cmul(va, vb), slf::ad::sub(va, vb));
    x = slf::ad::add_colwise(x, vc);
    x = slf::ad::scale(x, 1.7);
    x = slf::ad::add_scalar(x, 0.3);
    return weighted_sum(t, x, w);
  };
  auto r = grad_check(fn, {a, b, col});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("nonlinearities match finite differences") {
  Pcg32 rng(13);
  Mat a = random_mat(5, 4, rng);
  // Keep relu inputs away from the kink.
  for (int i = 0; i < a.size(); ++i) {
    double& v = a.data()[i];
    if (std::abs(v) < 0.05) v += (v >= 0 ? 0.1 : -0.1);
  }
  Mat w = random_mat(5, 4, rng);

  for (auto op : {0, 1, 2, 3}) {
    GraphFn fn = [&, op](Tape& t, const std::vector<Mat>& p,
                         std::vector<Var>* lv) {
      Var va = t.leaf(p[0], true);
      if (lv) lv->push_back(va);
      Var x;
      switch (op) {
        case 0: x = slf::ad::sigmoid(va); break;
        case 1: x = slf::ad::tanh_(va); break;
        case 2: x = slf::ad::relu(va); break;
        default: x = slf::ad::gelu(va); break;
      }
      return weighted_sum(t, x, w);
    };
    auto r = grad_check(fn, {a});
    CHECK(r.max_rel_error < 1e-5);
  }
}

TEST_CASE("reductions and blocks match finite differences") {
  Pcg32 rng(14);
  Mat a = random_mat(6, 4, rng);
  Mat w = random_mat(1, 4, rng);
  Mat wc = random_mat(6, 1, rng);

  GraphFn fn = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var va = t.leaf(p[0], true);
    if (lv) lv->push_back(va);
    Var top = slf::ad::rows(va, 0, 3);
    Var bottom = slf::ad::rows(va, 3, 3);
    Var stacked = slf::ad::vstack({bottom, top});
    Var s1 = weighted_sum(t, slf::ad::colwise_sumsq(stacked), w);
    Var s2 = weighted_sum(t, slf::ad::mean_cols(va), wc);
    Var s3 = slf::ad::mean(va);
    Var s4 = slf::ad::sumsq(va);
    return slf::ad::add(slf::ad::add(s1, s2), slf::ad::add(s3, slf::ad::scale(s4, 0.25)));
  };
  auto r = grad_check(fn, {a});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("softmax rows: values and gradient") {
  Tape t;
  Mat logits(2, 2);
  logits << 0.0, std::log(3.0), 0.0, 0.0;
  Var v = t.leaf(logits, false);
  Var s = slf::ad::softmax_rows(v);
  CHECK(s.value()(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.value()(0, 1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.value()(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.value()(1, 1) == doctest::Approx(0.5).epsilon(1e-12));

  Pcg32 rng(15);
  Mat a = random_mat(3, 5, rng);
  Mat w = random_mat(3, 5, rng);
  GraphFn fn = [&](Tape& tp, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var va = tp.leaf(p[0], true);
    if (lv) lv->push_back(va);
    return weighted_sum(tp, slf::ad::softmax_rows(va), w);
  };
  auto r = grad_check(fn, {a});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("layernorm_cols matches finite differences") {
  Pcg32 rng(16);
  Mat x = random_mat(6, 3, rng);
  Mat gamma = random_mat(6, 1, rng);
  Mat beta = random_mat(6, 1, rng);
  Mat w = random_mat(6, 3, rng);

  GraphFn fn = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var vx = t.leaf(p[0], true), vg = t.leaf(p[1], true),
        vb = t.leaf(p[2], true);
    if (lv) { lv->push_back(vx); lv->push_back(vg); lv->push_back(vb); }
    return weighted_sum(t, slf::ad::layernorm_cols(vx, vg, vb), w);
  };
  auto r = grad_check(fn, {x, gamma, beta}, 1e-6);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("bce_with_logits value and gradient") {
  Tape t;
  Mat z(1, 2);
  z << 0.0, 2.0;
  Mat y(1, 2);
  y << 1.0, 0.0;
  Var v = t.leaf(z, false);
  Var loss = slf::ad::bce_with_logits(v, y);
  double expected =
      0.5 * (std::log(2.0) + (2.0 + std::log(1.0 + std::exp(-2.0))));
  CHECK(loss.value()(0, 0) == doctest::Approx(expected).epsilon(1e-12));

  Pcg32 rng(17);
  Mat logits = random_mat(1, 6, rng);
  Mat targets(1, 6);
  for (int j = 0; j < 6; ++j) targets(0, j) = (j % 2 == 0) ? 1.0 : 0.0;
  GraphFn fn = [&](Tape& tp, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var vz = tp.leaf(p[0], true);
    if (lv) lv->push_back(vz);
    return slf::ad::bce_with_logits(vz, targets);
  };
  auto r = grad_check(fn, {logits});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("conv3d matches finite differences, stride and padding") {
  Pcg32 rng(18);
  slf::ad::ConvShape s;
  s.in_t = 4; s.in_h = 5; s.in_w = 5;
  s.kt = 1; s.kh = 3; s.kw = 3;
  s.st = 1; s.sh = 2; s.sw = 2;
  s.pt = 0; s.ph = 1; s.pw = 1;
  int cin = 2, cout = 3;
  Mat x = random_mat(cin, s.in_t * s.in_h * s.in_w, rng);
  Mat w = random_mat(cout, cin * s.kt * s.kh * s.kw, rng);
  Mat b = random_mat(cout, 1, rng);
  Mat proj = random_mat(cout, s.out_t() * s.out_h() * s.out_w(), rng);

  GraphFn fn = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var vx = t.leaf(p[0], true), vw = t.leaf(p[1], true),
        vb = t.leaf(p[2], true);
    if (lv) { lv->push_back(vx); lv->push_back(vw); lv->push_back(vb); }
    return weighted_sum(t, slf::ad::conv3d(vx, vw, vb, s), proj);
  };
  auto r = grad_check(fn, {x, w, b});
  CHECK(r.max_rel_error < 1e-5);

  // Temporal kernel with clamp padding and temporal stride.
  slf::ad::ConvShape st;
  st.in_t = 6; st.in_h = 3; st.in_w = 3;
  st.kt = 3; st.kh = 1; st.kw = 1;
  st.st = 2; st.sh = 1; st.sw = 1;
  st.pt = 1; st.ph = 0; st.pw = 0;
  Mat x2 = random_mat(cin, st.in_t * st.in_h * st.in_w, rng);
  Mat w2 = random_mat(cout, cin * st.kt, rng);
  Mat b2 = random_mat(cout, 1, rng);
  Mat proj2 = random_mat(cout, st.out_t() * st.out_h() * st.out_w(), rng);
  GraphFn fn2 = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var vx = t.leaf(p[0], true), vw = t.leaf(p[1], true),
        vb = t.leaf(p[2], true);
    if (lv) { lv->push_back(vx); lv->push_back(vw); lv->push_back(vb); }
    return weighted_sum(t, slf::ad::conv3d(vx, vw, vb, st), proj2);
  };
  r = grad_check(fn2, {x2, w2, b2});
  CHECK(r.max_rel_error < 1e-5);
}

TEST_CASE("pooling ops match finite differences") {
  Pcg32 rng(19);
  int t_dim = 3, h = 4, w = 4, c = 2;
  Mat x = random_mat(c, t_dim * h * w, rng);
  Mat wp = random_mat(c, t_dim * 2 * 2, rng);
  Mat wm = random_mat(c, t_dim, rng);

  GraphFn fn = [&](Tape& t, const std::vector<Mat>& p, std::vector<Var>* lv) {
    Var vx = t.leaf(p[0], true);
    if (lv) lv->push_back(vx);
    Var pooled = slf::ad::avgpool_spatial(vx, t_dim, h, w, 2);
    Var s1 = weighted_sum(t, pooled, wp);
    Var s2 = weighted_sum(t, slf::ad::spatial_mean(vx, t_dim, h, w), wm);
    return slf::ad::add(s1, s2);
  };
  auto r = grad_check(fn, {x});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("conv3d clamp padding keeps constant-in-time input constant") {
  Pcg32 rng(20);
  slf::ad::ConvShape s;
  s.in_t = 8; s.in_h = 2; s.in_w = 2;
  s.kt = 3; s.kh = 1; s.kw = 1;
  s.st = 2; s.sh = 1; s.sw = 1;
  s.pt = 1; s.ph = 0; s.pw = 0;
  int cin = 2, cout = 3;
  // One spatial pattern repeated at every timestep.
  Mat frame = random_mat(cin, s.in_h * s.in_w, rng);
  Mat x(cin, s.in_t * s.in_h * s.in_w);
  for (int ti = 0; ti < s.in_t; ++ti)
    x.middleCols(ti * s.in_h * s.in_w, s.in_h * s.in_w) = frame;
  Mat w = random_mat(cout, cin * 3, rng);

  Tape t;
  Var out = slf::ad::conv3d(t.leaf(x, false), t.leaf(w, false), Var{}, s);
  int spatial = s.out_h() * s.out_w();
  for (int ti = 1; ti < s.out_t(); ++ti) {
    for (int p = 0; p < spatial; ++p) {
      for (int ch = 0; ch < cout; ++ch) {
        CHECK(out.value()(ch, ti * spatial + p) ==
              doctest::Approx(out.value()(ch, p)).epsilon(1e-12));
      }
    }
  }
}
