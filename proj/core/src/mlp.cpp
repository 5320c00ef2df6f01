#include "ionpred/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace ionpred::numerics {

namespace {
constexpr double kLayernormEps = 1e-5;
}

std::vector<double> layernorm(const std::vector<double>& v) {
  const std::size_t d = v.size();
  if (d < 2) throw std::invalid_argument("layernorm: need at least 2 entries");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(d);
  const double inv = 1.0 / std::sqrt(var + kLayernormEps);
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = (v[i] - mean) * inv;
  return out;
}

std::vector<double> layernorm_backward(const std::vector<double>& v,
                                       const std::vector<double>& grad_out) {
  const std::size_t d = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(d);
  const double inv = 1.0 / std::sqrt(var + kLayernormEps);

  double g_mean = 0.0;
  double gx_mean = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double xhat = (v[i] - mean) * inv;
    g_mean += grad_out[i];
    gx_mean += grad_out[i] * xhat;
  }
  g_mean /= static_cast<double>(d);
  gx_mean /= static_cast<double>(d);

  std::vector<double> grad_in(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double xhat = (v[i] - mean) * inv;
    grad_in[i] = inv * (grad_out[i] - g_mean - xhat * gx_mean);
  }
  return grad_in;
}

std::pair<double, double> l1_loss(double yhat, double y) {
  const double diff = yhat - y;
  const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  return {std::fabs(diff), sign};
}

Mlp make_mlp(const std::vector<int>& layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("make_mlp: need at least 2 layer sizes");
  Mlp m;
  m.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseMatrix w(fan_out, fan_in);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return m;
}

double mlp_forward(const Mlp& m, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != m.input_dim()) {
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  }
  std::vector<double> act = v;
  for (int l = 0; l < m.n_layers(); ++l) {
    const DenseMatrix& w = m.weights[static_cast<std::size_t>(l)];
    std::vector<double> next(static_cast<std::size_t>(w.rows));
    for (int r = 0; r < w.rows; ++r) {
      double s = m.biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)];
      const double* wrow = &w.data[static_cast<std::size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) s += wrow[c] * act[static_cast<std::size_t>(c)];
      const bool hidden = l + 1 < m.n_layers();
      next[static_cast<std::size_t>(r)] = hidden ? (s > 0.0 ? s : 0.0) : s;
    }
    act = std::move(next);
  }
  return act.front();
}

MlpTrace mlp_forward_trace(const Mlp& m, const std::vector<double>& v) {
  MlpTrace t;
  std::vector<double> act = v;
  for (int l = 0; l < m.n_layers(); ++l) {
    const DenseMatrix& w = m.weights[static_cast<std::size_t>(l)];
    t.inputs.push_back(act);
    std::vector<double> pre(static_cast<std::size_t>(w.rows));
    for (int r = 0; r < w.rows; ++r) {
      double s = m.biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)];
      const double* wrow = &w.data[static_cast<std::size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) s += wrow[c] * act[static_cast<std::size_t>(c)];
      pre[static_cast<std::size_t>(r)] = s;
    }
    const bool hidden = l + 1 < m.n_layers();
    act.resize(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) act[i] = hidden && pre[i] < 0.0 ? 0.0 : pre[i];
    t.pre.push_back(std::move(pre));
  }
  t.output = act.front();
  return t;
}

MlpGrads make_zero_grads(const Mlp& m) {
  MlpGrads g;
  for (const auto& w : m.weights) g.weights.emplace_back(w.rows, w.cols);
  for (const auto& b : m.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

std::vector<double> mlp_backward(const Mlp& m, const MlpTrace& trace, double upstream,
                                 MlpGrads& grads) {
  std::vector<double> delta{upstream};  // dL/d(pre-activation) of current layer
  for (int l = m.n_layers() - 1; l >= 0; --l) {
    const DenseMatrix& w = m.weights[static_cast<std::size_t>(l)];
    const std::vector<double>& in = trace.inputs[static_cast<std::size_t>(l)];
    DenseMatrix& gw = grads.weights[static_cast<std::size_t>(l)];
    std::vector<double>& gb = grads.biases[static_cast<std::size_t>(l)];

    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      gb[static_cast<std::size_t>(r)] += d;
      if (d == 0.0) continue;
      double* grow = &gw.data[static_cast<std::size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) grow[c] += d * in[static_cast<std::size_t>(c)];
    }

    std::vector<double> prev(static_cast<std::size_t>(w.cols), 0.0);
    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      if (d == 0.0) continue;
      const double* wrow = &w.data[static_cast<std::size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) prev[static_cast<std::size_t>(c)] += d * wrow[c];
    }
    if (l > 0) {
      const std::vector<double>& pre_prev = trace.pre[static_cast<std::size_t>(l - 1)];
      for (std::size_t i = 0; i < prev.size(); ++i) {
        if (pre_prev[i] <= 0.0) prev[i] = 0.0;  // rectifier subgradient at 0 is 0
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

}  // namespace ionpred::numerics
