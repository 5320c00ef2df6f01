#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ionpred/adam.hpp"
#include "ionpred/embed.hpp"
#include "ionpred/ridge.hpp"
#include "ionpred/rng.hpp"
#include "ionpred/synth.hpp"
#include "ionpred/training.hpp"

using namespace ionpred;
using namespace ionpred::training;
using numerics::DenseMatrix;

namespace {

// Small synthetic embedded split with correlated targets, cheap enough for
// many training runs.
std::vector<embed::EmbeddedSample> toy_train(int n, int d_p, int d_xt, std::uint64_t seed,
                                             double target_offset = 0.0) {
  Rng rng(seed);
  std::vector<embed::EmbeddedSample> out;
  for (int i = 0; i < n; ++i) {
    embed::EmbeddedSample s;
    s.id = "toy" + std::to_string(i);
    s.split = Split::Train;
    s.temperature = 0.5 + 0.1 * (i % 4);
    std::vector<double> x(static_cast<std::size_t>(d_xt));
    for (double& v : x) v = rng.normal();
    std::vector<double> p(static_cast<std::size_t>(d_p));
    for (double& v : p) v = rng.normal();
    s.y_log10 = target_offset + x[0] + 0.5 * p[0];
    s.x_vec = std::move(x);
    s.p_vec = std::move(p);
    out.push_back(std::move(s));
  }
  return out;
}

bool same_matrix(const DenseMatrix& a, const DenseMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

bool same_mlp(const numerics::Mlp& a, const numerics::Mlp& b) {
  if (a.layer_sizes != b.layer_sizes) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (!same_matrix(a.weights[l], b.weights[l])) return false;
    if (a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("trainer forward combines hidden representations additively") {
  DualModalTrainer g = make_trainer(3, 4, 2, 8, 1);

  SUBCASE("zero trajectory encoder collapses both paths") {
    for (double& v : g.w_p.data) v = 0.0;
    const auto out = trainer_forward(g, {1.0, 2.0, -0.5}, {0.5, -1.0, 2.0, 0.25});
    CHECK(out.h == out.h_xt);
    CHECK(out.yhat == out.yhat_xt);
  }

  SUBCASE("zero trajectory embedding collapses both paths") {
    const auto out = trainer_forward(g, {0.0, 0.0, 0.0}, {0.5, -1.0, 2.0, 0.25});
    CHECK(out.h == out.h_xt);
    CHECK(out.yhat == out.yhat_xt);
  }

  SUBCASE("hand case in two hidden dimensions") {
    // E_p W_p = [1, 0], X W_xT = [0, 2]
    g.w_p = DenseMatrix(1, 2);
    g.w_p.at(0, 0) = 1.0;
    g.w_xt = DenseMatrix(1, 2);
    g.w_xt.at(0, 1) = 2.0;
    const auto out = trainer_forward(g, {1.0}, {1.0});
    CHECK(out.h == std::vector<double>{1.0, 2.0});
    CHECK(out.h_xt == std::vector<double>{0.0, 2.0});
  }
}

TEST_CASE("lambda_b = 0 reduces the loss to the plain prediction term") {
  DualModalTrainer g = make_trainer(3, 4, 4, 8, 5);
  const auto out = trainer_forward(g, {0.3, -0.7, 1.1}, {0.2, 0.4, -0.6, 0.9});
  const auto [l_main, d_main] = numerics::l1_loss(out.yhat, 1.25);
  const auto [l_aux, d_aux] = numerics::l1_loss(out.yhat_xt, 1.25);
  (void)d_main;
  (void)d_aux;
  const double combined = l_main + 0.0 * l_aux;
  CHECK(combined == l_main);
}

TEST_CASE("trainer fits constant targets") {
  auto train = toy_train(32, 4, 6, 11);
  for (auto& s : train) s.y_log10 = 1.7;
  DualModalTrainer g = make_trainer(4, 6, 4, 16, 3);
  TrainConfig cfg = trainer_config();
  cfg.epochs = 200;
  cfg.seed = 21;
  const auto log = train_dual_modal(g, train, cfg);
  REQUIRE(log.size() == 200);
  CHECK(log.back().train_l1 <= 0.05);
}

TEST_CASE("training is bitwise deterministic in the seed") {
  const auto train = toy_train(16, 4, 6, 13);
  TrainConfig cfg = trainer_config();
  cfg.epochs = 5;
  cfg.seed = 9;

  DualModalTrainer a = make_trainer(4, 6, 4, 16, 7);
  DualModalTrainer b = make_trainer(4, 6, 4, 16, 7);
  const auto log_a = train_dual_modal(a, train, cfg);
  const auto log_b = train_dual_modal(b, train, cfg);
  CHECK(same_matrix(a.w_p, b.w_p));
  CHECK(same_matrix(a.w_xt, b.w_xt));
  CHECK(same_mlp(a.decoder, b.decoder));
  for (std::size_t e = 0; e < log_a.size(); ++e) {
    CHECK(log_a[e].train_l1 == log_b[e].train_l1);
    CHECK(log_a[e].aux_l1 == log_b[e].aux_l1);
  }
}

TEST_CASE("trainer requires trajectory embeddings") {
  auto train = toy_train(4, 4, 6, 15);
  train[2].p_vec.reset();
  DualModalTrainer g = make_trainer(4, 6, 4, 8, 1);
  TrainConfig cfg = trainer_config();
  cfg.epochs = 1;
  CHECK_THROWS_WITH_AS(train_dual_modal(g, train, cfg),
                       doctest::Contains("lacks a trajectory embedding"), std::invalid_argument);
}

TEST_CASE("closed-form init reproduces a structure-only teacher") {
  // With W_p = 0 the hidden targets are X W_xT exactly; a barely-regularized
  // ridge fit must reproduce them on full-column-rank data.
  const auto train = toy_train(40, 3, 6, 17);
  DualModalTrainer g = make_trainer(3, 6, 4, 8, 19);
  for (double& v : g.w_p.data) v = 0.0;

  const Predictor f1 = closed_form_init(g, train, 1e-10);
  DenseMatrix x, h;
  stack_xh(g, train, x, h);
  const DenseMatrix fit = numerics::matmul(x, f1.w);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fit.data.size(); ++i) {
    num += (fit.data[i] - h.data[i]) * (fit.data[i] - h.data[i]);
    den += h.data[i] * h.data[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-6);
  CHECK(same_mlp(f1.decoder, g.decoder));
}

TEST_CASE("huge ridge penalty shrinks the encoder to near zero") {
  const auto train = toy_train(24, 3, 6, 23);
  const DualModalTrainer g = make_trainer(3, 6, 4, 8, 29);
  const Predictor small = closed_form_init(g, train, 1e6);
  const Predictor normal = closed_form_init(g, train, 1e-5);
  CHECK(numerics::frobenius_norm(small.w) <= 1e-3 * numerics::frobenius_norm(normal.w));
}

TEST_CASE("closed-form init satisfies the normal-equation residual bound") {
  const auto train = toy_train(128, 5, 12, 31);
  const DualModalTrainer g = make_trainer(5, 12, 8, 16, 37);
  const Predictor f1 = closed_form_init(g, train, 1e-5);
  DenseMatrix x, h;
  stack_xh(g, train, x, h);
  CHECK(numerics::ridge_residual(x, h, f1.w, 1e-5) <= 1e-8);
}

TEST_CASE("representation match after init: fit beats the trivial zero map") {
  const auto train = toy_train(64, 5, 12, 41);
  DualModalTrainer g = make_trainer(5, 12, 8, 16, 43);
  TrainConfig cfg = trainer_config();
  cfg.epochs = 3;
  cfg.seed = 47;
  train_dual_modal(g, train, cfg);
  const Predictor f1 = closed_form_init(g, train, 1e-5);

  double err = 0.0, norm = 0.0;
  for (const auto& s : train) {
    const auto fwd = trainer_forward(g, *s.p_vec, s.x_vec);
    const auto xw = numerics::vec_mat(s.x_vec, f1.w);
    double e2 = 0.0, h2 = 0.0;
    for (std::size_t i = 0; i < xw.size(); ++i) {
      e2 += (xw[i] - fwd.h[i]) * (xw[i] - fwd.h[i]);
      h2 += fwd.h[i] * fwd.h[i];
    }
    err += std::sqrt(e2);
    norm += std::sqrt(h2);
  }
  CHECK(err / static_cast<double>(train.size()) <= norm / static_cast<double>(train.size()));
}

TEST_CASE("gradient distillation: determinism, optimality gap, convergence") {
  const auto train = toy_train(64, 5, 16, 53);
  DualModalTrainer g = make_trainer(5, 16, 8, 16, 59);
  TrainConfig cfg = trainer_config();
  cfg.epochs = 2;
  cfg.seed = 61;
  train_dual_modal(g, train, cfg);

  DenseMatrix x, h;
  stack_xh(g, train, x, h);
  const double lambda = 1e-5;
  const Predictor closed = closed_form_init(g, train, lambda);
  const double obj_closed = numerics::ridge_objective(x, h, closed.w, lambda);

  // steps = 0 keeps the seeded random init, which is exactly the random-init
  // arm's encoder for the same seed
  const Predictor zero_a = gradient_distill_init(g, train, 0, 1e-3, lambda, 67);
  const Predictor zero_b = gradient_distill_init(g, train, 0, 1e-3, lambda, 67);
  CHECK(same_matrix(zero_a.w, zero_b.w));
  CHECK(same_matrix(zero_a.w, make_predictor(16, 8, 16, 67).w));
  CHECK_FALSE(same_matrix(zero_a.w, closed.w));

  // any fixed budget stays at or above the exact minimum
  const Predictor budget = gradient_distill_init(g, train, 200, 1e-3, lambda, 67);
  const double obj_budget = numerics::ridge_objective(x, h, budget.w, lambda);
  CHECK(obj_budget >= obj_closed);

  // a long run gets within 1% of the closed-form optimum
  const Predictor long_run = gradient_distill_init(g, train, 5000, 1e-3, lambda, 67);
  const double obj_long = numerics::ridge_objective(x, h, long_run.w, lambda);
  CHECK(obj_long >= obj_closed);
  CHECK((obj_long - obj_closed) / obj_closed <= 0.01);
}

TEST_CASE("fine-tuning respects zero learning rate and reduces loss") {
  const auto train = toy_train(16, 4, 6, 71);
  DualModalTrainer g = make_trainer(4, 6, 4, 16, 73);
  Predictor f1 = closed_form_init(g, train, 1e-5);

  SUBCASE("lr = 0 leaves parameters untouched") {
    const Predictor before = f1;
    TrainConfig cfg = finetune_config();
    cfg.lr = {0.0, 0.0, 0.0};
    cfg.epochs = 2;
    finetune_predictor(f1, train, cfg);
    CHECK(same_matrix(f1.w, before.w));
    CHECK(same_mlp(f1.decoder, before.decoder));
  }

  SUBCASE("loss is nonincreasing on a single sample at small lr") {
    const std::vector<embed::EmbeddedSample> one{train.front()};
    TrainConfig cfg = finetune_config();
    cfg.epochs = 8;
    cfg.seed = 79;
    const auto log = finetune_predictor(f1, one, cfg);
    CHECK(log.back().train_l1 <= log.front().train_l1);
  }

  SUBCASE("same-seed reruns are bitwise identical") {
    Predictor a = f1;
    Predictor b = f1;
    TrainConfig cfg = finetune_config();
    cfg.epochs = 3;
    cfg.seed = 83;
    finetune_predictor(a, train, cfg);
    finetune_predictor(b, train, cfg);
    CHECK(same_matrix(a.w, b.w));
    CHECK(same_mlp(a.decoder, b.decoder));
  }
}

TEST_CASE("data-level init copies the right pieces, deeply") {
  const auto train = toy_train(16, 4, 6, 89);
  DualModalTrainer g = make_trainer(4, 6, 4, 8, 97);
  Predictor f1 = closed_form_init(g, train, 1e-5);
  TrainConfig cfg = finetune_config();
  cfg.epochs = 1;
  finetune_predictor(f1, train, cfg);

  Predictor f2 = data_level_init(g, f1);
  CHECK(same_matrix(f2.w, g.w_xt));         // encoder from the teacher, not from f1
  CHECK_FALSE(same_matrix(f2.w, f1.w));
  CHECK(same_mlp(f2.decoder, f1.decoder));  // decoder from the fine-tuned predictor

  const DenseMatrix g_w_before = g.w_xt;
  const numerics::Mlp f1_dec_before = f1.decoder;
  f2.w.data[0] += 42.0;
  f2.decoder.weights[0].data[0] += 42.0;
  CHECK(same_matrix(g.w_xt, g_w_before));
  CHECK(same_mlp(f1.decoder, f1_dec_before));
}

TEST_CASE("structure training uses the grouped schedule") {
  const auto train = toy_train(24, 4, 6, 101, /*target_offset=*/2.0);
  DualModalTrainer g = make_trainer(4, 6, 4, 16, 103);
  Predictor f1 = closed_form_init(g, train, 1e-5);
  Predictor f2 = data_level_init(g, f1);

  SUBCASE("all-zero rates leave the predictor untouched") {
    const Predictor before = f2;
    TrainConfig cfg = structure_config_dataset2();
    cfg.lr = {0.0, 0.0, 0.0};
    cfg.epochs = 3;
    train_structure_predictor(f2, train, cfg);
    CHECK(same_matrix(f2.w, before.w));
    CHECK(same_mlp(f2.decoder, before.decoder));
  }

  SUBCASE("training reduces the loss below its starting value") {
    TrainConfig cfg = structure_config_dataset2();
    cfg.epochs = 40;
    cfg.seed = 107;
    const auto log = train_structure_predictor(f2, train, cfg);
    CHECK(log.back().train_l1 < log.front().train_l1);
  }
}

TEST_CASE("per-epoch decay compounds multiplicatively") {
  numerics::AdamState state(1.0, 1);
  for (int epoch = 0; epoch < 100; ++epoch) state.scale_lr(1.0 - 0.01);
  CHECK(state.lr == doctest::Approx(0.3660323412732292).epsilon(1e-12));
  CHECK(state.lr == doctest::Approx(std::pow(0.99, 100)).epsilon(1e-12));
}

TEST_CASE("schedule presets carry the documented defaults") {
  const TrainConfig t = trainer_config();
  CHECK(t.lr.encoder == 1e-3);
  CHECK(t.epochs == 50);
  CHECK(t.lambda_b == 1.0);
  CHECK(t.lambda_r == 1e-5);
  const TrainConfig f = finetune_config();
  CHECK(f.lr.encoder == 1e-5);
  CHECK(f.epochs == 50);
  const TrainConfig s2 = structure_config_dataset2();
  CHECK(s2.lr.encoder == 1e-2);
  CHECK(s2.lr.decoder_early == 1e-4);
  CHECK(s2.lr.decoder_late == 1e-6);
  CHECK(s2.epochs == 100);
  CHECK(s2.epoch_decay == 0.01);
  const TrainConfig s3 = structure_config_dataset3();
  CHECK(s3.epochs == 1000);
  CHECK(s3.epoch_decay == 0.001);
}

TEST_CASE("predict is a pure function of the structure embedding") {
  DualModalTrainer g = make_trainer(4, 6, 4, 8, 109);
  const auto train = toy_train(8, 4, 6, 113);
  const Predictor f1 = closed_form_init(g, train, 1e-5);

  Predictor zero = f1;
  for (auto& w : zero.decoder.weights) {
    for (double& v : w.data) v = 0.0;
  }
  for (auto& b : zero.decoder.biases) {
    for (double& v : b) v = 0.0;
  }
  CHECK(predict(zero, train.front().x_vec) == 0.0);

  // trajectory data plays no role at prediction time
  const double with_p = predict(f1, train.front().x_vec);
  embed::EmbeddedSample stripped = train.front();
  stripped.p_vec.reset();
  CHECK(predict(f1, stripped.x_vec) == with_p);
}

TEST_CASE("checkpoints round trip trainer and predictor bitwise") {
  DualModalTrainer g = make_trainer(5, 9, 4, 8, 127);
  const auto ckpt = trainer_checkpoint(g);
  const DualModalTrainer g2 = trainer_from_checkpoint(ckpt);
  CHECK(same_matrix(g2.w_p, g.w_p));
  CHECK(same_matrix(g2.w_xt, g.w_xt));
  CHECK(same_mlp(g2.decoder, g.decoder));

  const Predictor f = make_predictor(9, 4, 8, 131);
  const Predictor f2 = predictor_from_checkpoint(predictor_checkpoint(f, "W_trj"), "W_trj");
  CHECK(same_matrix(f2.w, f.w));
  CHECK(same_mlp(f2.decoder, f.decoder));
}

TEST_CASE("full pipeline on generated data: teacher, student, transfer") {
  synth::MaterialSpec spec;
  spec.n_atoms = 16;
  spec.n_target_ions = 4;
  spec.barrier_spread = 0.8;
  spec.attempt_rate = 2.0;
  const Dataset dtrj = synth::make_dataset(DatasetKind::TrajectoryBased, TargetKind::MsdFinal, 8,
                                           spec, {0.6, 0.9, 1.2}, 128, 0.1, 301);
  const embed::EmbeddedDataset etrj = embed::embed_dataset(dtrj);
  const auto train = train_split(etrj);
  const auto test = test_split(etrj);
  REQUIRE_FALSE(train.empty());
  REQUIRE_FALSE(test.empty());

  const int d_p = static_cast<int>(train.front().p_vec->size());
  const int d_xt = static_cast<int>(train.front().x_vec.size());
  DualModalTrainer g = make_trainer(d_p, d_xt, 8, 32, 307);
  TrainConfig tcfg = trainer_config();
  tcfg.epochs = 30;
  tcfg.seed = 311;
  const auto tlog = train_dual_modal(g, train, tcfg);
  CHECK(tlog.back().train_l1 < tlog.front().train_l1);

  Predictor f1 = closed_form_init(g, train, 1e-5);
  TrainConfig fcfg = finetune_config();
  fcfg.seed = 313;
  finetune_predictor(f1, train, fcfg);

  double err = 0.0;
  for (const auto& s : test) err += std::fabs(predict(f1, s.x_vec) - s.y_log10);
  err /= static_cast<double>(test.size());
  // strong sanity bound: far below the ~2 log-decade scale of the targets
  CHECK(err < 1.0);
}

}  // TEST_SUITE
