#include "ionpred/types.hpp"

#include <cmath>
#include <stdexcept>

namespace ionpred {

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::MsdFinal: return "msd_final";
    case TargetKind::Diffusivity: return "diffusivity";
    case TargetKind::Conductivity: return "conductivity";
  }
  return "msd_final";
}

TargetKind target_kind_from_string(const std::string& name) {
  if (name == "msd_final") return TargetKind::MsdFinal;
  if (name == "diffusivity") return TargetKind::Diffusivity;
  if (name == "conductivity") return TargetKind::Conductivity;
  throw std::invalid_argument("unknown target kind: " + name);
}

std::string to_string(DatasetKind kind) {
  return kind == DatasetKind::TrajectoryBased ? "trajectory_based" : "structure_based";
}

std::string to_string(Split split) { return split == Split::Train ? "train" : "test"; }

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  throw std::invalid_argument("unknown split: " + name);
}

namespace {

void check_structure(const Sample& s, std::vector<std::string>& out) {
  const Structure& st = s.structure;
  const std::size_t n = st.positions.size();
  if (st.species.size() != n) {
    out.push_back(s.id + ": species length " + std::to_string(st.species.size()) +
                  " does not match atom count " + std::to_string(n));
  }
  if (st.node_features.size() != n) {
    out.push_back(s.id + ": node_features rows do not match atom count");
  }
  if (st.edge_features.size() != st.edge_list.size()) {
    out.push_back(s.id + ": edge_features count does not match edge_list");
  }
  std::vector<bool> has_neighbor(n, false);
  for (const auto& [k, l] : st.edge_list) {
    if (k < 0 || l < 0 || k >= static_cast<int>(n) || l >= static_cast<int>(n)) {
      out.push_back(s.id + ": edge index out of range");
      continue;
    }
    if (k == l) out.push_back(s.id + ": self-edge on atom " + std::to_string(k));
    has_neighbor[static_cast<std::size_t>(k)] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!has_neighbor[k]) {
      out.push_back(s.id + ": atom " + std::to_string(k) + " has no neighbors");
    }
  }
}

}  // namespace

std::vector<std::string> validate_dataset(const Dataset& ds) {
  std::vector<std::string> out;
  if (ds.samples.size() != ds.split.size()) {
    out.push_back("dataset: split tags do not match sample count");
    return out;
  }
  if (ds.samples.empty()) {
    out.push_back("dataset: empty");
    return out;
  }
  if (!(ds.t_norm > 0.0)) out.push_back("dataset: t_norm must be positive");

  std::size_t n_train = 0;
  std::size_t n_test = 0;
  const TargetKind kind0 = ds.samples.front().target.kind;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    const bool is_train = ds.split[i] == Split::Train;
    (is_train ? n_train : n_test) += 1;

    if (!(s.temperature > 0.0)) out.push_back(s.id + ": temperature must be positive");
    if (!std::isfinite(s.target.value_log10)) {
      out.push_back(s.id + ": target value_log10 must be finite");
    }
    if (s.target.kind != kind0) {
      out.push_back(s.id + ": target kind differs from the rest of the dataset");
    }
    check_structure(s, out);

    if (s.trajectory) {
      if (ds.kind == DatasetKind::StructureBased) {
        out.push_back(s.id + ": structure-based dataset must not carry trajectories");
      }
      if (!is_train) out.push_back(s.id + ": test sample must not carry a trajectory");
      const Trajectory& tr = *s.trajectory;
      if (tr.n_frames() < 2) out.push_back(s.id + ": trajectory needs at least 2 frames");
      if (!(tr.dt > 0.0)) out.push_back(s.id + ": trajectory dt must be positive");
      for (const auto& frame : tr.frames) {
        if (static_cast<int>(frame.size()) != s.structure.n_atoms()) {
          out.push_back(s.id + ": trajectory frame atom count does not match structure");
          break;
        }
      }
    } else if (ds.kind == DatasetKind::TrajectoryBased && is_train) {
      out.push_back(s.id + ": trajectory-based train sample is missing its trajectory");
    }
  }
  if (n_train == 0) out.push_back("dataset: train split is empty");
  if (n_test == 0) out.push_back("dataset: test split is empty");
  return out;
}

}  // namespace ionpred
