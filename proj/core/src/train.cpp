#include "ionpred/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ionpred/adam.hpp"
#include "ionpred/ridge.hpp"
#include "ionpred/rng.hpp"

namespace ionpred::training {

using numerics::AdamState;
using numerics::DenseMatrix;
using numerics::Mlp;

TrainConfig trainer_config() {
  TrainConfig cfg;
  cfg.lr = {1e-3, 1e-3, 1e-3};
  cfg.epochs = 50;
  return cfg;
}

TrainConfig finetune_config() {
  TrainConfig cfg;
  cfg.lr = {1e-5, 1e-5, 1e-5};
  cfg.epochs = 50;
  return cfg;
}

TrainConfig structure_config_dataset2() {
  TrainConfig cfg;
  cfg.lr = {1e-2, 1e-4, 1e-6};
  cfg.epochs = 100;
  cfg.epoch_decay = 0.01;
  return cfg;
}

TrainConfig structure_config_dataset3() {
  TrainConfig cfg;
  cfg.lr = {1e-2, 1e-4, 1e-6};
  cfg.epochs = 1000;
  cfg.epoch_decay = 0.001;
  return cfg;
}

namespace {

DenseMatrix random_encoder(int d_in, int d_h, Rng& rng) {
  DenseMatrix w(d_in, d_h);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (double& v : w.data) v = rng.uniform(-bound, bound);
  return w;
}

std::vector<int> decoder_layer_sizes(int d_h, int width) {
  return {d_h, width, width, width, 1};
}

// One Adam state per parameter tensor; decoder layers 0-1 form the early
// group, the rest the late group.
struct PredictorOpt {
  AdamState w;
  std::vector<AdamState> dec_w;
  std::vector<AdamState> dec_b;

  PredictorOpt(const Predictor& f, const LrGroups& lr) : w(lr.encoder, f.w.data.size()) {
    for (int l = 0; l < f.decoder.n_layers(); ++l) {
      const double rate = l < 2 ? lr.decoder_early : lr.decoder_late;
      dec_w.emplace_back(rate, f.decoder.weights[static_cast<std::size_t>(l)].data.size());
      dec_b.emplace_back(rate, f.decoder.biases[static_cast<std::size_t>(l)].size());
    }
  }

  void decay(double factor) {
    w.scale_lr(factor);
    for (auto& s : dec_w) s.scale_lr(factor);
    for (auto& s : dec_b) s.scale_lr(factor);
  }
};

struct TrainerOpt {
  AdamState w_p;
  AdamState w_xt;
  std::vector<AdamState> dec_w;
  std::vector<AdamState> dec_b;

  TrainerOpt(const DualModalTrainer& g, const LrGroups& lr)
      : w_p(lr.encoder, g.w_p.data.size()), w_xt(lr.encoder, g.w_xt.data.size()) {
    for (int l = 0; l < g.decoder.n_layers(); ++l) {
      const double rate = l < 2 ? lr.decoder_early : lr.decoder_late;
      dec_w.emplace_back(rate, g.decoder.weights[static_cast<std::size_t>(l)].data.size());
      dec_b.emplace_back(rate, g.decoder.biases[static_cast<std::size_t>(l)].size());
    }
  }

  void decay(double factor) {
    w_p.scale_lr(factor);
    w_xt.scale_lr(factor);
    for (auto& s : dec_w) s.scale_lr(factor);
    for (auto& s : dec_b) s.scale_lr(factor);
  }
};

void zero(DenseMatrix& m) { std::fill(m.data.begin(), m.data.end(), 0.0); }
void zero(numerics::MlpGrads& g) {
  for (auto& w : g.weights) zero(w);
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);
}

void outer_accumulate(const std::vector<double>& col, const std::vector<double>& row,
                      DenseMatrix& out) {
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col[i] == 0.0) continue;
    double* orow = &out.data[i * static_cast<std::size_t>(out.cols)];
    for (std::size_t j = 0; j < row.size(); ++j) orow[j] += col[i] * row[j];
  }
}

void step_decoder(Mlp& dec, numerics::MlpGrads& grads, std::vector<AdamState>& sw,
                  std::vector<AdamState>& sb) {
  for (std::size_t l = 0; l < dec.weights.size(); ++l) {
    adam_step(sw[l], dec.weights[l].data, grads.weights[l].data);
    adam_step(sb[l], dec.biases[l], grads.biases[l]);
  }
}

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return order;
}

}  // namespace

DualModalTrainer make_trainer(int d_p, int d_xt, int d_h, int decoder_width, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 21));
  DualModalTrainer g;
  g.w_p = random_encoder(d_p, d_h, rng);
  g.w_xt = random_encoder(d_xt, d_h, rng);
  g.decoder = numerics::make_mlp(decoder_layer_sizes(d_h, decoder_width), rng);
  return g;
}

Predictor make_predictor(int d_xt, int d_h, int decoder_width, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 22));
  Predictor f;
  f.w = random_encoder(d_xt, d_h, rng);
  f.decoder = numerics::make_mlp(decoder_layer_sizes(d_h, decoder_width), rng);
  return f;
}

TrainerForward trainer_forward(const DualModalTrainer& g, const std::vector<double>& e_p,
                               const std::vector<double>& x) {
  TrainerForward out;
  const std::vector<double> h_p = numerics::vec_mat(e_p, g.w_p);
  out.h_xt = numerics::vec_mat(x, g.w_xt);
  out.h.resize(out.h_xt.size());
  for (std::size_t i = 0; i < out.h.size(); ++i) out.h[i] = h_p[i] + out.h_xt[i];
  out.yhat = numerics::mlp_forward(g.decoder, numerics::layernorm(out.h));
  out.yhat_xt = numerics::mlp_forward(g.decoder, numerics::layernorm(out.h_xt));
  return out;
}

std::vector<EpochLog> train_dual_modal(DualModalTrainer& g,
                                       const std::vector<embed::EmbeddedSample>& train,
                                       const TrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("train_dual_modal: empty train split");
  for (const auto& s : train) {
    if (!s.p_vec) {
      throw std::invalid_argument("train_dual_modal: sample " + s.id +
                                  " lacks a trajectory embedding");
    }
  }

  TrainerOpt opt(g, cfg.lr);
  Rng shuffle_rng(mix_seed(cfg.seed, 31));
  numerics::MlpGrads dec_grads = numerics::make_zero_grads(g.decoder);
  DenseMatrix gw_p(g.w_p.rows, g.w_p.cols);
  DenseMatrix gw_xt(g.w_xt.rows, g.w_xt.cols);

  std::vector<EpochLog> log;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double sum_l1 = 0.0;
    double sum_aux = 0.0;
    const auto order = shuffled_order(train.size(), shuffle_rng);
    for (std::size_t idx : order) {
      const embed::EmbeddedSample& s = train[idx];
      const std::vector<double>& e_p = *s.p_vec;
      const std::vector<double>& x = s.x_vec;

      const std::vector<double> h_p = numerics::vec_mat(e_p, g.w_p);
      const std::vector<double> h_xt = numerics::vec_mat(x, g.w_xt);
      std::vector<double> h(h_xt.size());
      for (std::size_t i = 0; i < h.size(); ++i) h[i] = h_p[i] + h_xt[i];

      const std::vector<double> ln_h = numerics::layernorm(h);
      const std::vector<double> ln_hxt = numerics::layernorm(h_xt);
      const numerics::MlpTrace t_main = numerics::mlp_forward_trace(g.decoder, ln_h);
      const numerics::MlpTrace t_aux = numerics::mlp_forward_trace(g.decoder, ln_hxt);

      const auto [l_main, d_main] = numerics::l1_loss(t_main.output, s.y_log10);
      const auto [l_aux, d_aux] = numerics::l1_loss(t_aux.output, s.y_log10);
      sum_l1 += l_main;
      sum_aux += l_aux;

      zero(dec_grads);
      zero(gw_p);
      zero(gw_xt);
      const std::vector<double> g_ln_h =
          numerics::mlp_backward(g.decoder, t_main, d_main, dec_grads);
      const std::vector<double> g_ln_hxt =
          numerics::mlp_backward(g.decoder, t_aux, cfg.lambda_b * d_aux, dec_grads);
      const std::vector<double> g_h = numerics::layernorm_backward(h, g_ln_h);
      std::vector<double> g_hxt = numerics::layernorm_backward(h_xt, g_ln_hxt);
      // H = H_p + H_xT, so the main-path gradient reaches both encoders.
      for (std::size_t i = 0; i < g_hxt.size(); ++i) g_hxt[i] += g_h[i];

      outer_accumulate(e_p, g_h, gw_p);
      outer_accumulate(x, g_hxt, gw_xt);

      adam_step(opt.w_p, g.w_p.data, gw_p.data);
      adam_step(opt.w_xt, g.w_xt.data, gw_xt.data);
      step_decoder(g.decoder, dec_grads, opt.dec_w, opt.dec_b);
    }
    log.push_back({epoch, sum_l1 / static_cast<double>(train.size()),
                   sum_aux / static_cast<double>(train.size())});
    opt.decay(1.0 - cfg.epoch_decay);
  }
  return log;
}

void stack_xh(const DualModalTrainer& g, const std::vector<embed::EmbeddedSample>& train,
              DenseMatrix& x_out, DenseMatrix& h_out) {
  if (train.empty()) throw std::invalid_argument("stack_xh: empty train split");
  const int n = static_cast<int>(train.size());
  const int d = static_cast<int>(train.front().x_vec.size());
  const int d_h = g.w_xt.cols;
  x_out = DenseMatrix(n, d);
  h_out = DenseMatrix(n, d_h);
  for (int i = 0; i < n; ++i) {
    const embed::EmbeddedSample& s = train[static_cast<std::size_t>(i)];
    if (!s.p_vec) {
      throw std::invalid_argument("stack_xh: sample " + s.id + " lacks a trajectory embedding");
    }
    const TrainerForward fwd = trainer_forward(g, *s.p_vec, s.x_vec);
    for (int c = 0; c < d; ++c) x_out.at(i, c) = s.x_vec[static_cast<std::size_t>(c)];
    for (int c = 0; c < d_h; ++c) h_out.at(i, c) = fwd.h[static_cast<std::size_t>(c)];
  }
}

Predictor closed_form_init(const DualModalTrainer& g,
                           const std::vector<embed::EmbeddedSample>& train, double lambda_r) {
  DenseMatrix x, h;
  stack_xh(g, train, x, h);
  Predictor f;
  f.w = numerics::ridge_solve(x, h, lambda_r);
  f.decoder = g.decoder;
  return f;
}

Predictor gradient_distill_init(const DualModalTrainer& g,
                                const std::vector<embed::EmbeddedSample>& train, int steps,
                                double lr, double lambda_r, std::uint64_t seed) {
  DenseMatrix x, h;
  stack_xh(g, train, x, h);

  // Same stream as make_predictor's encoder: with steps = 0 this arm is
  // exactly the random-init arm's encoder for the same seed.
  Rng rng(mix_seed(seed, 22));
  DenseMatrix w = random_encoder(x.cols, h.cols, rng);

  // Full-batch gradient 2 (X^T X W - X^T H) + 2 lambda W via the
  // precomputed Gram form.
  const DenseMatrix gram = numerics::gram(x);
  const DenseMatrix b = numerics::transpose_times(x, h);
  AdamState opt(lr, w.data.size());
  std::vector<double> grad(w.data.size());
  for (int step = 0; step < steps; ++step) {
    const DenseMatrix gw = numerics::matmul(gram, w);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] = 2.0 * (gw.data[i] - b.data[i]) + 2.0 * lambda_r * w.data[i];
    }
    adam_step(opt, w.data, grad);
  }

  Predictor f;
  f.w = std::move(w);
  f.decoder = g.decoder;
  return f;
}

namespace {

std::vector<EpochLog> train_predictor_l1(Predictor& f,
                                         const std::vector<embed::EmbeddedSample>& train,
                                         const TrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("predictor training: empty train split");
  if (static_cast<int>(train.front().x_vec.size()) != f.w.rows) {
    throw std::invalid_argument("predictor training: embedding dimension does not match encoder");
  }
  PredictorOpt opt(f, cfg.lr);
  Rng shuffle_rng(mix_seed(cfg.seed, 32));
  numerics::MlpGrads dec_grads = numerics::make_zero_grads(f.decoder);
  DenseMatrix gw(f.w.rows, f.w.cols);

  std::vector<EpochLog> log;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double sum_l1 = 0.0;
    const auto order = shuffled_order(train.size(), shuffle_rng);
    for (std::size_t idx : order) {
      const embed::EmbeddedSample& s = train[idx];
      const std::vector<double> h = numerics::vec_mat(s.x_vec, f.w);
      const std::vector<double> ln_h = numerics::layernorm(h);
      const numerics::MlpTrace trace = numerics::mlp_forward_trace(f.decoder, ln_h);
      const auto [loss, d] = numerics::l1_loss(trace.output, s.y_log10);
      sum_l1 += loss;

      zero(dec_grads);
      zero(gw);
      const std::vector<double> g_ln = numerics::mlp_backward(f.decoder, trace, d, dec_grads);
      const std::vector<double> g_h = numerics::layernorm_backward(h, g_ln);
      outer_accumulate(s.x_vec, g_h, gw);

      adam_step(opt.w, f.w.data, gw.data);
      step_decoder(f.decoder, dec_grads, opt.dec_w, opt.dec_b);
    }
    log.push_back({epoch, sum_l1 / static_cast<double>(train.size()), 0.0});
    opt.decay(1.0 - cfg.epoch_decay);
  }
  return log;
}

}  // namespace

std::vector<EpochLog> finetune_predictor(Predictor& f,
                                         const std::vector<embed::EmbeddedSample>& train,
                                         const TrainConfig& cfg) {
  return train_predictor_l1(f, train, cfg);
}

Predictor data_level_init(const DualModalTrainer& g, const Predictor& f1) {
  Predictor f2;
  f2.w = g.w_xt;          // structure encoder of the teacher, not f1's encoder
  f2.decoder = f1.decoder;
  return f2;
}

std::vector<EpochLog> train_structure_predictor(Predictor& f,
                                                const std::vector<embed::EmbeddedSample>& train,
                                                const TrainConfig& cfg) {
  return train_predictor_l1(f, train, cfg);
}

double predict(const Predictor& f, const std::vector<double>& x) {
  return numerics::mlp_forward(f.decoder, numerics::layernorm(numerics::vec_mat(x, f.w)));
}

std::vector<embed::EmbeddedSample> train_split(const embed::EmbeddedDataset& eds) {
  std::vector<embed::EmbeddedSample> out;
  for (const auto& s : eds.samples) {
    if (s.split == Split::Train) out.push_back(s);
  }
  return out;
}

std::vector<embed::EmbeddedSample> test_split(const embed::EmbeddedDataset& eds) {
  std::vector<embed::EmbeddedSample> out;
  for (const auto& s : eds.samples) {
    if (s.split == Split::Test) out.push_back(s);
  }
  return out;
}

namespace {

numerics::NamedTensor matrix_tensor(const std::string& name, const DenseMatrix& m) {
  return {name, {m.rows, m.cols}, m.data};
}

DenseMatrix tensor_matrix(const numerics::NamedTensor& t) {
  if (t.shape.size() != 2) throw std::runtime_error("tensor " + t.name + " is not a matrix");
  DenseMatrix m(t.shape[0], t.shape[1]);
  m.data = t.values;
  return m;
}

void append_decoder(numerics::Checkpoint& ckpt, const Mlp& dec) {
  for (int l = 0; l < dec.n_layers(); ++l) {
    const std::string base = "dec.layer" + std::to_string(l);
    ckpt.push_back(matrix_tensor(base + ".w", dec.weights[static_cast<std::size_t>(l)]));
    ckpt.push_back({base + ".b",
                    {static_cast<int>(dec.biases[static_cast<std::size_t>(l)].size())},
                    dec.biases[static_cast<std::size_t>(l)]});
  }
}

Mlp decoder_from(const numerics::Checkpoint& ckpt) {
  Mlp dec;
  for (int l = 0;; ++l) {
    const std::string base = "dec.layer" + std::to_string(l);
    bool found = false;
    for (const auto& t : ckpt) {
      if (t.name == base + ".w") {
        found = true;
        break;
      }
    }
    if (!found) break;
    dec.weights.push_back(tensor_matrix(numerics::find_tensor(ckpt, base + ".w")));
    dec.biases.push_back(numerics::find_tensor(ckpt, base + ".b").values);
  }
  if (dec.weights.empty()) throw std::runtime_error("checkpoint has no decoder layers");
  dec.layer_sizes.push_back(dec.weights.front().cols);
  for (const auto& w : dec.weights) dec.layer_sizes.push_back(w.rows);
  return dec;
}

}  // namespace

numerics::Checkpoint trainer_checkpoint(const DualModalTrainer& g) {
  numerics::Checkpoint ckpt;
  ckpt.push_back(matrix_tensor("W_p", g.w_p));
  ckpt.push_back(matrix_tensor("W_xT", g.w_xt));
  append_decoder(ckpt, g.decoder);
  return ckpt;
}

DualModalTrainer trainer_from_checkpoint(const numerics::Checkpoint& ckpt) {
  DualModalTrainer g;
  g.w_p = tensor_matrix(numerics::find_tensor(ckpt, "W_p"));
  g.w_xt = tensor_matrix(numerics::find_tensor(ckpt, "W_xT"));
  g.decoder = decoder_from(ckpt);
  return g;
}

numerics::Checkpoint predictor_checkpoint(const Predictor& f, const std::string& encoder_name) {
  numerics::Checkpoint ckpt;
  ckpt.push_back(matrix_tensor(encoder_name, f.w));
  append_decoder(ckpt, f.decoder);
  return ckpt;
}

Predictor predictor_from_checkpoint(const numerics::Checkpoint& ckpt,
                                    const std::string& encoder_name) {
  Predictor f;
  f.w = tensor_matrix(numerics::find_tensor(ckpt, encoder_name));
  f.decoder = decoder_from(ckpt);
  return f;
}

}  // namespace ionpred::training
