#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "ionpred/adam.hpp"
#include "ionpred/checkpoint.hpp"
#include "ionpred/dense.hpp"
#include "ionpred/mlp.hpp"
#include "ionpred/ridge.hpp"
#include "ionpred/rng.hpp"

using namespace ionpred;
using namespace ionpred::numerics;

namespace {

DenseMatrix random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data) v = scale * rng.normal();
  return m;
}

// Plain gradient descent on the ridge objective, the independent iterative
// oracle for the closed-form solver.
DenseMatrix ridge_gradient_descent(const DenseMatrix& x, const DenseMatrix& h, double lambda,
                                   int steps, double lr) {
  DenseMatrix w(x.cols, h.cols);
  const DenseMatrix g = gram(x);
  const DenseMatrix b = transpose_times(x, h);
  for (int s = 0; s < steps; ++s) {
    const DenseMatrix gw = matmul(g, w);
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      w.data[i] -= lr * (2.0 * (gw.data[i] - b.data[i]) + 2.0 * lambda * w.data[i]);
    }
  }
  return w;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("ridge identity cases") {
  const DenseMatrix eye = DenseMatrix::identity(2);
  const DenseMatrix w_half = ridge_solve(eye, eye, 1.0);
  CHECK(w_half.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w_half.at(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w_half.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));

  const DenseMatrix w_id = ridge_solve(eye, eye, 1e-12);
  CHECK(std::fabs(w_id.at(0, 0) - 1.0) <= 1e-9);
  CHECK(std::fabs(w_id.at(1, 1) - 1.0) <= 1e-9);
}

TEST_CASE("ridge matches a long gradient-descent run elementwise") {
  Rng rng(42);
  const DenseMatrix x = random_matrix(50, 8, rng);
  const DenseMatrix h = random_matrix(50, 8, rng);
  const double lambda = 1e-5;
  const DenseMatrix w = ridge_solve(x, h, lambda);
  // Step size below 1/L for this instance; 50k steps converge far past 1e-4.
  const DenseMatrix w_gd = ridge_gradient_descent(x, h, lambda, 50000, 2e-3);
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    CHECK(std::fabs(w.data[i] - w_gd.data[i]) <= 1e-4);
  }
}

TEST_CASE("ridge rejects nonpositive lambda and mismatched rows") {
  const DenseMatrix eye = DenseMatrix::identity(2);
  CHECK_THROWS(ridge_solve(eye, eye, 0.0));
  CHECK_THROWS(ridge_solve(eye, DenseMatrix(3, 2), 1e-5));
}

TEST_CASE("ridge residual bound holds across the sweep range") {
  Rng rng(7);
  for (double lambda : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
    const DenseMatrix x = random_matrix(30, 12, rng);
    const DenseMatrix h = random_matrix(30, 8, rng);
    const DenseMatrix w = ridge_solve(x, h, lambda);
    CHECK(ridge_residual(x, h, w, lambda) <= 1e-8);
  }
}

TEST_CASE("ridge shrinkage is monotone in lambda") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix x = random_matrix(20, 10, rng);
    const DenseMatrix h = random_matrix(20, 8, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-7, 1e-5, 1e-3, 1e-1, 10.0}) {
      const double norm = frobenius_norm(ridge_solve(x, h, lambda));
      CHECK(norm <= prev + 1e-12);
      prev = norm;
    }
  }
}

TEST_CASE("layernorm basics") {
  CHECK(layernorm({3.0, 3.0, 3.0}) == std::vector<double>{0.0, 0.0, 0.0});
  const auto v = layernorm({1.0, -1.0});
  const double expect = 1.0 / std::sqrt(1.0 + 1e-5);
  CHECK(v[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(-expect).epsilon(1e-12));
  CHECK_THROWS(layernorm({1.0}));
}

TEST_CASE("layernorm output statistics") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(16);
    for (double& x : v) x = 5.0 * rng.normal() + 2.0;
    const auto out = layernorm(v);
    double mean = 0.0;
    for (double x : out) mean += x;
    mean /= static_cast<double>(out.size());
    double var = 0.0;
    for (double x : out) var += (x - mean) * (x - mean);
    var /= static_cast<double>(out.size());
    CHECK(std::fabs(mean) <= 1e-12);
    CHECK(var <= 1.0 + 1e-12);
    CHECK(var >= 1.0 - 1e-4);
  }
}

TEST_CASE("l1 loss values and subgradient") {
  CHECK(l1_loss(2.0, 2.0) == std::pair<double, double>{0.0, 0.0});
  CHECK(l1_loss(3.0, 1.0) == std::pair<double, double>{2.0, 1.0});
  CHECK(l1_loss(0.0, 5.0) == std::pair<double, double>{5.0, -1.0});
}

TEST_CASE("single hidden unit forward and hand-derived gradients") {
  Mlp m;
  m.layer_sizes = {1, 1, 1};
  m.weights = {DenseMatrix(1, 1), DenseMatrix(1, 1)};
  m.weights[0].at(0, 0) = 1.0;
  m.weights[1].at(0, 0) = 1.0;
  m.biases = {{0.0}, {0.0}};

  CHECK(mlp_forward(m, {-3.0}) == 0.0);
  CHECK(mlp_forward(m, {3.0}) == 3.0);

  const MlpTrace trace = mlp_forward_trace(m, {3.0});
  MlpGrads grads = make_zero_grads(m);
  const auto input_grad = mlp_backward(m, trace, 1.0, grads);
  CHECK(grads.weights[0].at(0, 0) == 3.0);  // d yhat / d w1
  CHECK(grads.weights[1].at(0, 0) == 3.0);  // d yhat / d w2
  CHECK(input_grad[0] == 1.0);

  MlpGrads zero = make_zero_grads(m);
  mlp_backward(m, trace, 0.0, zero);
  CHECK(zero.weights[0].at(0, 0) == 0.0);
  CHECK(zero.weights[1].at(0, 0) == 0.0);
}

TEST_CASE("all-zero network predicts zero") {
  Mlp m;
  m.layer_sizes = {3, 4, 1};
  m.weights = {DenseMatrix(4, 3), DenseMatrix(1, 4)};
  m.biases = {{0, 0, 0, 0}, {0}};
  CHECK(mlp_forward(m, {1.0, -2.0, 0.5}) == 0.0);
}

TEST_CASE("backprop matches central finite differences") {
  Rng rng(99);
  Mlp m = make_mlp({6, 16, 16, 16, 1}, rng);

  int probes = 0;
  int attempts = 0;
  while (probes < 5 && attempts < 200) {
    ++attempts;
    std::vector<double> v(6);
    for (double& x : v) x = rng.normal();
    const MlpTrace trace = mlp_forward_trace(m, v);
    // Keep the probe away from rectifier kinks, where the finite difference
    // is not a derivative.
    double min_pre = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l + 1 < trace.pre.size(); ++l) {
      for (double p : trace.pre[l]) min_pre = std::min(min_pre, std::fabs(p));
    }
    if (min_pre < 1e-3) continue;
    ++probes;

    MlpGrads grads = make_zero_grads(m);
    const auto input_grad = mlp_backward(m, trace, 1.0, grads);

    const double step = 1e-5;
    auto check_param = [&](double* p, double analytic) {
      const double saved = *p;
      *p = saved + step;
      const double up = mlp_forward(m, v);
      *p = saved - step;
      const double down = mlp_forward(m, v);
      *p = saved;
      const double fd = (up - down) / (2.0 * step);
      const double denom = std::max({std::fabs(fd), std::fabs(analytic), 1.0});
      CHECK(std::fabs(fd - analytic) / denom <= 1e-4);
    };
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      for (std::size_t i = 0; i < m.weights[l].data.size(); ++i) {
        check_param(&m.weights[l].data[i], grads.weights[l].data[i]);
      }
      for (std::size_t i = 0; i < m.biases[l].size(); ++i) {
        check_param(&m.biases[l][i], grads.biases[l][i]);
      }
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + step;
      const double up = mlp_forward(m, v);
      v[i] = saved - step;
      const double down = mlp_forward(m, v);
      v[i] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double denom = std::max({std::fabs(fd), std::fabs(input_grad[i]), 1.0});
      CHECK(std::fabs(fd - input_grad[i]) / denom <= 1e-4);
    }
  }
  REQUIRE(probes == 5);
}

TEST_CASE("layernorm backward matches finite differences") {
  Rng rng(17);
  std::vector<double> v(8);
  for (double& x : v) x = rng.normal();
  std::vector<double> upstream(8);
  for (double& x : upstream) x = rng.normal();

  const auto analytic = layernorm_backward(v, upstream);
  const double step = 1e-6;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double saved = v[i];
    v[i] = saved + step;
    const auto up = layernorm(v);
    v[i] = saved - step;
    const auto down = layernorm(v);
    v[i] = saved;
    double fd = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      fd += upstream[j] * (up[j] - down[j]) / (2.0 * step);
    }
    CHECK(std::fabs(fd - analytic[i]) <= 1e-6 * std::max(1.0, std::fabs(fd)));
  }
}

TEST_CASE("adam leaves parameters alone on zero gradient") {
  AdamState state(0.1, 3);
  std::vector<double> params{1.0, -2.0, 0.5};
  const std::vector<double> before = params;
  std::vector<double> grads{0.0, 0.0, 0.0};
  adam_step(state, params, grads);
  CHECK(params == before);
}

TEST_CASE("adam minimizes a quadratic") {
  AdamState state(0.1, 1);
  std::vector<double> w{0.0};
  for (int step = 0; step < 2000; ++step) {
    const std::vector<double> g{2.0 * (w[0] - 3.0)};
    adam_step(state, w, g);
  }
  CHECK(std::fabs(w[0] - 3.0) <= 1e-3);
}

TEST_CASE("adam update magnitude under constant gradient is the learning rate") {
  const double lr = 0.01;
  AdamState state(lr, 1);
  std::vector<double> w{0.0};
  const std::vector<double> g{0.5};
  adam_step(state, w, g);
  // Bias-corrected first step: lr * g / (|g| + eps), i.e. lr up to eps.
  CHECK(std::fabs(-w[0] - lr) <= 1e-6 * lr);
  const double w1 = w[0];
  adam_step(state, w, g);
  CHECK(std::fabs(-(w[0] - w1) - lr) <= 1e-5 * lr);
}

TEST_CASE("adam rejects shape mismatch") {
  AdamState state(0.1, 2);
  std::vector<double> w{0.0};
  std::vector<double> g{1.0};
  CHECK_THROWS(adam_step(state, w, g));
}

TEST_CASE("checkpoint round trip is bit exact") {
  Rng rng(23);
  Checkpoint ckpt;
  ckpt.push_back({"a", {2, 3}, {1.0, -2.5, 3.25, rng.normal(), rng.normal(), rng.normal()}});
  ckpt.push_back({"b.vec", {4}, {rng.normal(), 0.0, -0.0, 1e-300}});
  const auto path =
      (std::filesystem::temp_directory_path() / "ionpred_ckpt_test.json").string();
  save_checkpoint(ckpt, path);
  const Checkpoint back = load_checkpoint(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == ckpt.size());
  for (std::size_t i = 0; i < ckpt.size(); ++i) {
    CHECK(back[i].name == ckpt[i].name);
    CHECK(back[i].shape == ckpt[i].shape);
    CHECK(back[i].values == ckpt[i].values);
  }
  CHECK(find_tensor(back, "a").shape == std::vector<int>{2, 3});
  CHECK_THROWS(find_tensor(back, "missing"));
}

}  // TEST_SUITE
