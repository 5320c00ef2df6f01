#include "ionpred/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ionpred::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": cannot parse number '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": cannot parse integer '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(u);
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": cannot parse seed '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key " + key + ": expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
  if (out.empty()) throw std::invalid_argument("config key " + key + ": empty list");
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += num(v[i]);
  }
  return s;
}

std::string join_u64(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  // The structure preset is applied first so explicit structure.* keys can
  // override individual fields.
  if (auto it = kv.find("train.structure.preset"); it != kv.end()) {
    cfg.structure_preset = it->second;
    if (it->second == "dataset2_like") {
      cfg.structure = training::structure_config_dataset2();
    } else if (it->second == "dataset3_like") {
      cfg.structure = training::structure_config_dataset3();
    } else {
      throw std::invalid_argument("unknown structure preset: " + it->second);
    }
    kv.erase(it);
  }

  for (const auto& [key, value] : kv) {
    if (key == "out.dir") cfg.out_dir = value;
    else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& s : split_list(value)) cfg.seeds.push_back(parse_u64(key, s));
    }
    else if (key == "synth.n_atoms") cfg.material.n_atoms = parse_int(key, value);
    else if (key == "synth.n_target_ions") cfg.material.n_target_ions = parse_int(key, value);
    else if (key == "synth.barrier_base") cfg.material.barrier_base = parse_double(key, value);
    else if (key == "synth.barrier_spread") cfg.material.barrier_spread = parse_double(key, value);
    else if (key == "synth.attempt_rate") cfg.material.attempt_rate = parse_double(key, value);
    else if (key == "synth.lattice_spacing") cfg.material.lattice_spacing = parse_double(key, value);
    else if (key == "synth.frames") cfg.frames = parse_int(key, value);
    else if (key == "synth.dt") cfg.dt = parse_double(key, value);
    else if (key == "synth.trj.materials") cfg.trj_materials = parse_int(key, value);
    else if (key == "synth.trj.temperatures") cfg.trj_temperatures = parse_double_list(key, value);
    else if (key == "synth.trj.target") cfg.trj_target = target_kind_from_string(value);
    else if (key == "synth.str.materials") cfg.str_materials = parse_int(key, value);
    else if (key == "synth.str.temperatures") cfg.str_temperatures = parse_double_list(key, value);
    else if (key == "synth.str.target") cfg.str_target = target_kind_from_string(value);
    else if (key == "embed.n_bands") cfg.embedding.n_bands = parse_int(key, value);
    else if (key == "embed.polynomial_expansion") cfg.embedding.polynomial_expansion = parse_bool(key, value);
    else if (key == "model.d_h") cfg.d_h = parse_int(key, value);
    else if (key == "model.decoder_width") cfg.decoder_width = parse_int(key, value);
    else if (key == "train.lambda_b") cfg.trainer.lambda_b = parse_double(key, value);
    else if (key == "train.lambda_r") cfg.trainer.lambda_r = parse_double(key, value);
    else if (key == "train.trainer.lr") cfg.trainer.lr = {parse_double(key, value), parse_double(key, value), parse_double(key, value)};
    else if (key == "train.trainer.epochs") cfg.trainer.epochs = parse_int(key, value);
    else if (key == "train.finetune.lr") cfg.finetune.lr = {parse_double(key, value), parse_double(key, value), parse_double(key, value)};
    else if (key == "train.finetune.epochs") cfg.finetune.epochs = parse_int(key, value);
    else if (key == "train.structure.encoder_lr") cfg.structure.lr.encoder = parse_double(key, value);
    else if (key == "train.structure.decoder_early_lr") cfg.structure.lr.decoder_early = parse_double(key, value);
    else if (key == "train.structure.decoder_late_lr") cfg.structure.lr.decoder_late = parse_double(key, value);
    else if (key == "train.structure.epochs") cfg.structure.epochs = parse_int(key, value);
    else if (key == "train.structure.epoch_decay") cfg.structure.epoch_decay = parse_double(key, value);
    else if (key == "ablate.distill_steps") cfg.distill_steps = parse_int(key, value);
    else if (key == "ablate.distill_lr") cfg.distill_lr = parse_double(key, value);
    else if (key == "sweep.lambdas") cfg.sweep_lambdas = parse_double_list(key, value);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string s;
  s += "out.dir = " + cfg.out_dir + "\n";
  s += "seeds = " + join_u64(cfg.seeds) + "\n";
  s += "synth.n_atoms = " + std::to_string(cfg.material.n_atoms) + "\n";
  s += "synth.n_target_ions = " + std::to_string(cfg.material.n_target_ions) + "\n";
  s += "synth.barrier_base = " + num(cfg.material.barrier_base) + "\n";
  s += "synth.barrier_spread = " + num(cfg.material.barrier_spread) + "\n";
  s += "synth.attempt_rate = " + num(cfg.material.attempt_rate) + "\n";
  s += "synth.lattice_spacing = " + num(cfg.material.lattice_spacing) + "\n";
  s += "synth.frames = " + std::to_string(cfg.frames) + "\n";
  s += "synth.dt = " + num(cfg.dt) + "\n";
  s += "synth.trj.materials = " + std::to_string(cfg.trj_materials) + "\n";
  s += "synth.trj.temperatures = " + join(cfg.trj_temperatures) + "\n";
  s += "synth.trj.target = " + to_string(cfg.trj_target) + "\n";
  s += "synth.str.materials = " + std::to_string(cfg.str_materials) + "\n";
  s += "synth.str.temperatures = " + join(cfg.str_temperatures) + "\n";
  s += "synth.str.target = " + to_string(cfg.str_target) + "\n";
  s += "embed.n_bands = " + std::to_string(cfg.embedding.n_bands) + "\n";
  s += std::string("embed.polynomial_expansion = ") +
       (cfg.embedding.polynomial_expansion ? "true" : "false") + "\n";
  s += "model.d_h = " + std::to_string(cfg.d_h) + "\n";
  s += "model.decoder_width = " + std::to_string(cfg.decoder_width) + "\n";
  s += "train.lambda_b = " + num(cfg.trainer.lambda_b) + "\n";
  s += "train.lambda_r = " + num(cfg.trainer.lambda_r) + "\n";
  s += "train.trainer.lr = " + num(cfg.trainer.lr.encoder) + "\n";
  s += "train.trainer.epochs = " + std::to_string(cfg.trainer.epochs) + "\n";
  s += "train.finetune.lr = " + num(cfg.finetune.lr.encoder) + "\n";
  s += "train.finetune.epochs = " + std::to_string(cfg.finetune.epochs) + "\n";
  s += "train.structure.preset = " + cfg.structure_preset + "\n";
  s += "train.structure.encoder_lr = " + num(cfg.structure.lr.encoder) + "\n";
  s += "train.structure.decoder_early_lr = " + num(cfg.structure.lr.decoder_early) + "\n";
  s += "train.structure.decoder_late_lr = " + num(cfg.structure.lr.decoder_late) + "\n";
  s += "train.structure.epochs = " + std::to_string(cfg.structure.epochs) + "\n";
  s += "train.structure.epoch_decay = " + num(cfg.structure.epoch_decay) + "\n";
  s += "ablate.distill_steps = " + std::to_string(cfg.distill_steps) + "\n";
  s += "ablate.distill_lr = " + num(cfg.distill_lr) + "\n";
  s += "sweep.lambdas = " + join(cfg.sweep_lambdas) + "\n";
  return s;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw std::invalid_argument("config: need at least one seed");
  if (cfg.d_h < 2) throw std::invalid_argument("config: d_h must be >= 2");
  if (cfg.decoder_width < 1) throw std::invalid_argument("config: decoder_width must be >= 1");
  if (cfg.embedding.n_bands < 1) throw std::invalid_argument("config: n_bands must be >= 1");
  if (cfg.frames < 2 * cfg.embedding.n_bands) {
    throw std::invalid_argument("config: synth.frames must be >= 2 * embed.n_bands");
  }
  if (!(cfg.trainer.lambda_r > 0.0)) throw std::invalid_argument("config: lambda_r must be > 0");
  if (cfg.trj_materials < 4 || cfg.str_materials < 4) {
    throw std::invalid_argument("config: need at least 4 materials per dataset");
  }
  for (double l : cfg.sweep_lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("config: sweep lambdas must be > 0");
  }
}

}  // namespace ionpred::harness
