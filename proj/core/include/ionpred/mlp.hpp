#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ionpred/dense.hpp"
#include "ionpred/rng.hpp"

namespace ionpred::numerics {

// (v - mean) / sqrt(var + 1e-5), population variance, no learned scale or
// shift. Requires at least 2 entries.
std::vector<double> layernorm(const std::vector<double>& v);

// Gradient of layernorm: given dL/d(output), returns dL/d(input).
std::vector<double> layernorm_backward(const std::vector<double>& v,
                                       const std::vector<double>& grad_out);

// |yhat - y| and its derivative w.r.t. yhat; sign(0) is 0.
std::pair<double, double> l1_loss(double yhat, double y);

// Scalar-output MLP: rectified hidden layers, identity output. Weights are
// out x in row-major, so layer l maps activations a to W_l a + b_l.
struct Mlp {
  std::vector<int> layer_sizes;       // [d_in, h1, ..., 1]
  std::vector<DenseMatrix> weights;   // one per affine layer
  std::vector<std::vector<double>> biases;

  int n_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
Mlp make_mlp(const std::vector<int>& layer_sizes, Rng& rng);

double mlp_forward(const Mlp& m, const std::vector<double>& v);

// Per-layer inputs and pre-activations, captured for the backward pass.
struct MlpTrace {
  std::vector<std::vector<double>> inputs;  // activation entering each layer
  std::vector<std::vector<double>> pre;     // affine outputs before rectifier
  double output = 0.0;
};

MlpTrace mlp_forward_trace(const Mlp& m, const std::vector<double>& v);

struct MlpGrads {
  std::vector<DenseMatrix> weights;
  std::vector<std::vector<double>> biases;
};

MlpGrads make_zero_grads(const Mlp& m);

// Exact reverse-mode gradients for upstream dL/dyhat; rectifier subgradient
// at 0 is 0. Parameter gradients accumulate into `grads` so two prediction
// paths can share one buffer; the returned vector is dL/d(input) for this
// call alone.
std::vector<double> mlp_backward(const Mlp& m, const MlpTrace& trace, double upstream,
                                 MlpGrads& grads);

}  // namespace ionpred::numerics
