// Command-line front end. Every pipeline stage is independently invokable and
// works off fixed file names inside one experiment directory, so stages can
// be cached and rerun in isolation:
//
//   ionpred generate --config exp.cfg --dir runs/exp
//   ionpred embed --dir runs/exp
//   ionpred train-trainer --config exp.cfg --dir runs/exp
//   ionpred init-predictor --config exp.cfg --dir runs/exp --method closed-form
//   ionpred finetune --config exp.cfg --dir runs/exp
//   ionpred transfer --dir runs/exp
//   ionpred train-structure --config exp.cfg --dir runs/exp
//   ionpred evaluate --dir runs/exp
//   ionpred pipeline --config exp.cfg --dir runs/exp
//   ionpred ablate --config exp.cfg --dir runs/exp
//   ionpred sweep-lambda --config exp.cfg --dir runs/exp

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ionpred/dataset_io.hpp"
#include "ionpred/pipeline.hpp"
#include "ionpred/ridge.hpp"
#include "ionpred/rng.hpp"
#include "ionpred/synth.hpp"

namespace fs = std::filesystem;
using namespace ionpred;

namespace {

std::string join(const std::string& dir, const char* file) {
  return (fs::path(dir) / file).string();
}

harness::ExperimentConfig config_or_default(const std::string& config_path) {
  if (config_path.empty()) return harness::ExperimentConfig{};
  return harness::load_config(config_path);
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void cmd_generate(const harness::ExperimentConfig& cfg, const std::string& dir,
                  std::uint64_t seed) {
  const harness::StageSeeds der = harness::derive_seeds(seed);
  fs::create_directories(dir);
  std::ofstream snap(join(dir, harness::files::kConfigSnapshot));
  snap << harness::serialize_config(cfg);

  const Dataset dtrj =
      synth::make_dataset(DatasetKind::TrajectoryBased, cfg.trj_target, cfg.trj_materials,
                          cfg.material, cfg.trj_temperatures, cfg.frames, cfg.dt, der.trj_data);
  const Dataset dstr =
      synth::make_dataset(DatasetKind::StructureBased, cfg.str_target, cfg.str_materials,
                          cfg.material, cfg.str_temperatures, cfg.frames, cfg.dt, der.str_data);
  write_dataset_jsonl(dtrj, join(dir, harness::files::kTrjDataset));
  write_dataset_jsonl(dstr, join(dir, harness::files::kStrDataset));
  std::cout << "wrote " << dtrj.size() << " trajectory-dataset samples, " << dstr.size()
            << " structure-dataset samples\n";
}

void cmd_embed(const harness::ExperimentConfig& cfg, const std::string& dir) {
  const Dataset dtrj = read_dataset_jsonl(join(dir, harness::files::kTrjDataset));
  const Dataset dstr = read_dataset_jsonl(join(dir, harness::files::kStrDataset));
  embed::write_embedded_jsonl(embed::embed_dataset(dtrj, cfg.embedding),
                              join(dir, harness::files::kTrjEmbedded));
  embed::write_embedded_jsonl(embed::embed_dataset(dstr, cfg.embedding),
                              join(dir, harness::files::kStrEmbedded));
  std::cout << "embedded both datasets\n";
}

void cmd_train_trainer(const harness::ExperimentConfig& cfg, const std::string& dir,
                       std::uint64_t seed) {
  const harness::StageSeeds der = harness::derive_seeds(seed);
  const auto etrj = embed::read_embedded_jsonl(join(dir, harness::files::kTrjEmbedded));
  const auto train = training::train_split(etrj);
  const int d_p = static_cast<int>(train.front().p_vec->size());
  const int d_xt = static_cast<int>(train.front().x_vec.size());
  training::DualModalTrainer g =
      training::make_trainer(d_p, d_xt, cfg.d_h, cfg.decoder_width, der.trainer_init);
  training::TrainConfig tcfg = cfg.trainer;
  tcfg.seed = der.trainer_shuffle;
  const auto log = training::train_dual_modal(g, train, tcfg);
  numerics::save_checkpoint(training::trainer_checkpoint(g),
                            join(dir, harness::files::kTrainerCkpt));
  harness::write_epoch_log_csv(log, true, join(dir, harness::files::kTrainerLog));
  std::cout << "trainer final train_l1 " << log.back().train_l1 << ", aux_l1 "
            << log.back().aux_l1 << "\n";
}

void cmd_init_predictor(const harness::ExperimentConfig& cfg, const std::string& dir,
                        std::uint64_t seed, const std::string& method) {
  const harness::StageSeeds der = harness::derive_seeds(seed);
  const auto etrj = embed::read_embedded_jsonl(join(dir, harness::files::kTrjEmbedded));
  const auto train = training::train_split(etrj);
  const auto g = training::trainer_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kTrainerCkpt)));
  training::Predictor f1;
  if (method == "closed-form") {
    f1 = training::closed_form_init(g, train, cfg.trainer.lambda_r);
  } else if (method == "gradient") {
    f1 = training::gradient_distill_init(g, train, cfg.distill_steps, cfg.distill_lr,
                                         cfg.trainer.lambda_r, der.distill);
  } else {
    throw std::invalid_argument("--method must be closed-form or gradient");
  }
  numerics::save_checkpoint(training::predictor_checkpoint(f1, "W_trj"),
                            join(dir, harness::files::kF1InitCkpt));
  numerics::DenseMatrix x, h;
  training::stack_xh(g, train, x, h);
  std::cout << "init method " << method << ", encoder-matching objective "
            << numerics::ridge_objective(x, h, f1.w, cfg.trainer.lambda_r) << "\n";
}

void cmd_finetune(const harness::ExperimentConfig& cfg, const std::string& dir,
                  std::uint64_t seed) {
  const harness::StageSeeds der = harness::derive_seeds(seed);
  const auto etrj = embed::read_embedded_jsonl(join(dir, harness::files::kTrjEmbedded));
  training::Predictor f1 = training::predictor_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kF1InitCkpt)), "W_trj");
  training::TrainConfig fcfg = cfg.finetune;
  fcfg.seed = der.finetune_shuffle;
  const auto log = training::finetune_predictor(f1, training::train_split(etrj), fcfg);
  numerics::save_checkpoint(training::predictor_checkpoint(f1, "W_trj"),
                            join(dir, harness::files::kF1Ckpt));
  harness::write_epoch_log_csv(log, false, join(dir, harness::files::kFinetuneLog));
  std::cout << "fine-tuned predictor, final train_l1 " << log.back().train_l1 << "\n";
}

void cmd_transfer(const std::string& dir) {
  const auto g = training::trainer_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kTrainerCkpt)));
  const auto f1 = training::predictor_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kF1Ckpt)), "W_trj");
  const training::Predictor f2 = training::data_level_init(g, f1);
  numerics::save_checkpoint(training::predictor_checkpoint(f2, "W_str"),
                            join(dir, harness::files::kF2InitCkpt));
  std::cout << "initialized structure predictor from W_xT and the fine-tuned decoder\n";
}

void cmd_train_structure(const harness::ExperimentConfig& cfg, const std::string& dir,
                         std::uint64_t seed) {
  const harness::StageSeeds der = harness::derive_seeds(seed);
  const auto estr = embed::read_embedded_jsonl(join(dir, harness::files::kStrEmbedded));
  training::Predictor f2 = training::predictor_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kF2InitCkpt)), "W_str");
  training::TrainConfig scfg = cfg.structure;
  scfg.seed = der.structure_shuffle;
  const auto log = training::train_structure_predictor(f2, training::train_split(estr), scfg);
  numerics::save_checkpoint(training::predictor_checkpoint(f2, "W_str"),
                            join(dir, harness::files::kF2Ckpt));
  harness::write_epoch_log_csv(log, false, join(dir, harness::files::kStructureLog));
  std::cout << "trained structure predictor, final train_l1 " << log.back().train_l1 << "\n";
}

void cmd_evaluate(const harness::ExperimentConfig& cfg, const std::string& dir,
                  std::uint64_t seed) {
  const auto etrj = embed::read_embedded_jsonl(join(dir, harness::files::kTrjEmbedded));
  const auto estr = embed::read_embedded_jsonl(join(dir, harness::files::kStrEmbedded));
  const auto f1 = training::predictor_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kF1Ckpt)), "W_trj");
  const auto f2 = training::predictor_from_checkpoint(
      numerics::load_checkpoint(join(dir, harness::files::kF2Ckpt)), "W_str");

  harness::RunReport report;
  report.label = "full";
  report.seed = seed;
  std::vector<harness::PredictionRow> rows_f1, rows_f2;
  const double t_eval0 = now_s();
  report.f1 = harness::evaluate_predictor(f1, training::test_split(etrj), "trajectory_test",
                                          &rows_f1);
  report.f2 = harness::evaluate_predictor(f2, training::test_split(estr), "structure_test",
                                          &rows_f2);
  const double eval_s = now_s() - t_eval0;

  // Inference timing covers structure/temperature embedding plus forward
  // pass only, measured from the raw test structures when available.
  double inference_s = 0.0;
  if (fs::exists(join(dir, harness::files::kTrjDataset))) {
    const Dataset dtrj = read_dataset_jsonl(join(dir, harness::files::kTrjDataset));
    const Dataset dstr = read_dataset_jsonl(join(dir, harness::files::kStrDataset));
    const double t0 = now_s();
    for (std::size_t i = 0; i < dtrj.samples.size(); ++i) {
      if (dtrj.split[i] != Split::Test) continue;
      const Sample& s = dtrj.samples[i];
      (void)training::predict(
          f1, embed::build_x(s.structure, s.temperature, dtrj.t_norm, s.target.species,
                             cfg.embedding));
    }
    for (std::size_t i = 0; i < dstr.samples.size(); ++i) {
      if (dstr.split[i] != Split::Test) continue;
      const Sample& s = dstr.samples[i];
      (void)training::predict(
          f2, embed::build_x(s.structure, s.temperature, dstr.t_norm, s.target.species,
                             cfg.embedding));
    }
    inference_s = now_s() - t0;
  }

  std::ofstream out(join(dir, harness::files::kReport));
  out << harness::report_to_json(report);
  harness::write_predictions_csv(rows_f1, join(dir, harness::files::kPredictionsF1));
  harness::write_predictions_csv(rows_f2, join(dir, harness::files::kPredictionsF2));
  nlohmann::ordered_json jt;
  jt["evaluate_s"] = eval_s;
  jt["inference_s"] = inference_s;
  std::ofstream ts(join(dir, harness::files::kTimings));
  ts << jt.dump(2) << "\n";

  std::cout << "f1 " << report.f1.dataset << " mae " << report.f1.overall_mae << " ("
            << report.f1.count << " samples)\n";
  std::cout << "f2 " << report.f2->dataset << " mae " << report.f2->overall_mae << " ("
            << report.f2->count << " samples)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-autoregressive ionic transport prediction on synthetic lattice data"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string dir;
  std::uint64_t seed_opt = 0;
  bool seed_given = false;
  std::string method = "closed-form";
  std::vector<double> lambdas;

  app.add_option("--config", config_path, "experiment config file (defaults used when absent)");
  app.add_option("--dir", dir, "experiment directory (defaults to out.dir from the config)");
  auto* seed_flag = app.add_option("--seed", seed_opt, "master seed (defaults to first of seeds)");

  auto* c_generate = app.add_subcommand("generate", "generate both synthetic datasets");
  auto* c_embed = app.add_subcommand("embed", "precompute embeddings for both datasets");
  auto* c_trainer = app.add_subcommand("train-trainer", "train the dual-modal trainer");
  auto* c_init = app.add_subcommand("init-predictor", "initialize the predictor from the trainer");
  c_init->add_option("--method", method, "closed-form | gradient")->capture_default_str();
  auto* c_finetune = app.add_subcommand("finetune", "fine-tune the predictor without trajectories");
  auto* c_transfer = app.add_subcommand("transfer", "data-level init of the structure predictor");
  auto* c_structure = app.add_subcommand("train-structure", "train the structure predictor");
  auto* c_evaluate = app.add_subcommand("evaluate", "evaluate predictors on both test splits");
  auto* c_pipeline = app.add_subcommand("pipeline", "run every stage end to end");
  auto* c_ablate = app.add_subcommand("ablate", "run the ablation matrix over all seeds");
  auto* c_sweep = app.add_subcommand("sweep-lambda", "sweep the ridge regularization strength");
  c_sweep->add_option("--lambdas", lambdas, "override the sweep grid");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_flag->count() > 0;

  try {
    const harness::ExperimentConfig cfg = config_or_default(config_path);
    if (dir.empty()) dir = cfg.out_dir;
    const std::uint64_t seed = seed_given ? seed_opt : cfg.seeds.front();

    if (c_generate->parsed()) cmd_generate(cfg, dir, seed);
    if (c_embed->parsed()) cmd_embed(cfg, dir);
    if (c_trainer->parsed()) cmd_train_trainer(cfg, dir, seed);
    if (c_init->parsed()) cmd_init_predictor(cfg, dir, seed, method);
    if (c_finetune->parsed()) cmd_finetune(cfg, dir, seed);
    if (c_transfer->parsed()) cmd_transfer(dir);
    if (c_structure->parsed()) cmd_train_structure(cfg, dir, seed);
    if (c_evaluate->parsed()) cmd_evaluate(cfg, dir, seed);
    if (c_pipeline->parsed()) {
      const harness::RunReport report = harness::run_pipeline(cfg, seed, dir);
      std::cout << "f1 mae " << report.f1.overall_mae << ", f2 mae "
                << report.f2->overall_mae << "\n";
    }
    if (c_ablate->parsed()) {
      const harness::AblationReport report = harness::run_ablations(cfg, dir);
      for (const auto& arm : report.arms) {
        std::cout << arm.arm << " (" << arm.dataset << "): mean mae " << arm.mean_arm_mae
                  << " vs full " << arm.mean_full_mae << ", p " << arm.p_value << "\n";
      }
    }
    if (c_sweep->parsed()) {
      const auto grid = lambdas.empty() ? cfg.sweep_lambdas : lambdas;
      for (const auto& row : harness::run_lambda_sweep(cfg, grid, dir)) {
        std::cout << "lambda " << row.lambda_r << ": |W_trj|_F " << row.w_trj_frobenius
                  << ", mae " << row.mae_f1 << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
