#pragma once

// Shared finite-difference gradient checker. The graph builder is re-invoked
// for every probe so the check is independent of tape internals.

#include <cmath>
#include <functional>
#include <vector>

#include "slf/ad.hpp"

namespace slf::testing {

// Builds a scalar graph from the given parameter values. When `leaves` is
// non-null the builder must append one Var per parameter (requires_grad).
using GraphFn = std::function<ad::Var(ad::Tape&, const std::vector<ad::Mat>&,
                                      std::vector<ad::Var>*)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  int checked = 0;
};

inline double eval_scalar(const GraphFn& fn, const std::vector<ad::Mat>& params) {
  ad::Tape tape;
  ad::Var root = fn(tape, params, nullptr);
  return root.value()(0, 0);
}

inline GradCheckResult grad_check(const GraphFn& fn,
                                  std::vector<ad::Mat> params,
                                  double step = 1e-5,
                                  double denom_floor = 1e-6) {
  // Analytic gradients.
  std::vector<ad::Mat> analytic;
  {
    ad::Tape tape;
    std::vector<ad::Var> leaves;
    ad::Var root = fn(tape, params, &leaves);
    tape.backward(root);
    for (const ad::Var& v : leaves) analytic.push_back(v.grad());
  }

  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (int i = 0; i < params[p].rows(); ++i) {
      for (int j = 0; j < params[p].cols(); ++j) {
        double saved = params[p](i, j);
        params[p](i, j) = saved + step;
        double up = eval_scalar(fn, params);
        params[p](i, j) = saved - step;
        double down = eval_scalar(fn, params);
        params[p](i, j) = saved;
        double fd = (up - down) / (2.0 * step);
        double an = analytic[p](i, j);
        double abs_err = std::abs(fd - an);
        double rel = abs_err / std::max({std::abs(fd), std::abs(an), denom_floor});
        result.max_rel_error = std::max(result.max_rel_error, rel);
        result.max_abs_error = std::max(result.max_abs_error, abs_err);
        ++result.checked;
      }
    }
  }
  return result;
}

}  // namespace slf::testing
