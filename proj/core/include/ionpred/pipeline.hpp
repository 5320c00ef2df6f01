#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ionpred/config.hpp"
#include "ionpred/embed.hpp"
#include "ionpred/training.hpp"
#include "ionpred/types.hpp"

namespace ionpred::harness {

// Mean |yhat - y| on log10 targets; throws on an empty list.
double mae(const std::vector<std::pair<double, double>>& preds);

// One-sided sign test: probability of >= wins successes out of n fair coin
// flips. Ties must be excluded by the caller.
double sign_test_p(int wins, int n);

struct TemperatureMae {
  double temperature = 0.0;
  double mae = 0.0;
  int count = 0;
};

struct EvalTable {
  std::string dataset;  // "trajectory_test" or "structure_test"
  double overall_mae = 0.0;
  int count = 0;
  std::vector<TemperatureMae> per_temperature;
};

struct PredictionRow {
  std::string id;
  double temperature = 0.0;
  double y_log10 = 0.0;
  double yhat_log10 = 0.0;
};

// Per-temperature and overall MAE of one predictor on one test split; also
// returns the per-sample rows for the prediction CSV.
EvalTable evaluate_predictor(const training::Predictor& f,
                             const std::vector<embed::EmbeddedSample>& test,
                             const std::string& dataset_label,
                             std::vector<PredictionRow>* rows = nullptr);

// Report of one pipeline run (one seed, one arm label). Wall-clock timings
// are kept out of this struct's serialization; they go to a sidecar file so
// that report bytes are reproducible.
struct RunReport {
  std::string label = "full";
  std::uint64_t seed = 0;
  EvalTable f1;
  std::optional<EvalTable> f2;
};

struct Timings {
  double generate_s = 0.0;
  double embed_s = 0.0;
  double train_s = 0.0;
  double evaluate_s = 0.0;
  double inference_s = 0.0;  // embeddings + forward passes on the test split only
};

// All per-stage seeds derived from one master seed.
struct StageSeeds {
  std::uint64_t trj_data, str_data, trainer_init, trainer_shuffle, finetune_shuffle,
      structure_shuffle, random_f1, random_f2, distill;
};
StageSeeds derive_seeds(std::uint64_t master);

// Generate -> embed -> train g -> closed-form init f1 -> fine-tune f1 ->
// data-level init f2 -> train f2 -> evaluate both. When out_dir is nonempty,
// writes datasets, embeddings, checkpoints, per-epoch logs, report.json,
// prediction CSVs and the timing sidecar there. Failures carry the stage name.
RunReport run_pipeline(const ExperimentConfig& cfg, std::uint64_t master_seed,
                       const std::string& out_dir = "", Timings* timings_out = nullptr);

struct ArmResult {
  std::string arm;
  std::string overrides;  // config delta vs the full arm, e.g. "train.lambda_b = 0"
  std::string dataset;    // which test split the MAE refers to
  std::vector<std::uint64_t> seeds;
  std::vector<double> arm_mae;   // per seed
  std::vector<double> full_mae;  // paired per seed
  int full_wins = 0;
  int n_effective = 0;  // ties excluded
  double p_value = 1.0;
  double mean_arm_mae = 0.0;
  double mean_full_mae = 0.0;
  double rel_improvement = 0.0;  // (mean_arm - mean_full) / mean_arm
};

struct AblationReport {
  std::vector<ArmResult> arms;
  // Encoder-matching objective values per seed, closed form vs the equal
  // budget gradient run.
  std::vector<double> objective_closed;
  std::vector<double> objective_gradient;
};

// Runs the arm matrix {full, random-init f1, gradient-distill init,
// lambda_b = 0, no polynomial expansion, random-init f2, f2 encoder from
// W_trj} across cfg.seeds, pairing every arm with the full run on the same
// seed. Writes ablation_per_seed.csv, ablation_summary.csv and
// ablation_report.json when out_dir is nonempty.
AblationReport run_ablations(const ExperimentConfig& cfg, const std::string& out_dir = "");

struct LambdaSweepRow {
  double lambda_r = 0.0;
  double w_trj_frobenius = 0.0;
  double mae_f1 = 0.0;
};

// Repeats the model-level pipeline for each lambda_r on cfg.seeds.front();
// the datasets are seed-identical across lambdas and generated once. Writes
// lambda_sweep.csv when out_dir is nonempty.
std::vector<LambdaSweepRow> run_lambda_sweep(const ExperimentConfig& cfg,
                                             const std::vector<double>& lambdas,
                                             const std::string& out_dir = "");

// Serialization helpers shared by the CLI and tests.
std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);
void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path);
std::vector<PredictionRow> read_predictions_csv(const std::string& path);
void write_epoch_log_csv(const std::vector<training::EpochLog>& log, bool has_aux,
                         const std::string& path);

// Fixed file names inside an experiment directory.
namespace files {
inline constexpr const char* kConfigSnapshot = "config_snapshot.cfg";
inline constexpr const char* kTrjDataset = "dtrj.jsonl";
inline constexpr const char* kStrDataset = "dstr.jsonl";
inline constexpr const char* kTrjEmbedded = "etrj.jsonl";
inline constexpr const char* kStrEmbedded = "estr.jsonl";
inline constexpr const char* kTrainerCkpt = "trainer.ckpt";
inline constexpr const char* kF1InitCkpt = "f1_init.ckpt";
inline constexpr const char* kF1Ckpt = "f1.ckpt";
inline constexpr const char* kF2InitCkpt = "f2_init.ckpt";
inline constexpr const char* kF2Ckpt = "f2.ckpt";
inline constexpr const char* kTrainerLog = "trainer_log.csv";
inline constexpr const char* kFinetuneLog = "finetune_log.csv";
inline constexpr const char* kStructureLog = "structure_log.csv";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kTimings = "timings.json";
inline constexpr const char* kPredictionsF1 = "predictions_f1.csv";
inline constexpr const char* kPredictionsF2 = "predictions_f2.csv";
}  // namespace files

}  // namespace ionpred::harness
