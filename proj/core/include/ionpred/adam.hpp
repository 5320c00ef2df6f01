#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ionpred::numerics {

// Bias-corrected Adam for one parameter tensor. The learning rate lives in
// the state so groups with different schedules can coexist; per-epoch decay
// is applied by the caller via scale_lr.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  AdamState(double lr_in, std::size_t n) : lr(lr_in), m(n, 0.0), v(n, 0.0) {}

  void scale_lr(double factor) { lr *= factor; }
};

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace ionpred::numerics
