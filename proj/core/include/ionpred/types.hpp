#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ionpred {

using Vec3 = std::array<double, 3>;

// Equilibrium atomic structure plus the per-atom / per-edge feature vectors
// every structural embedding is built from. Edges are directed; an undirected
// bond is stored once per direction so that the neighbor set of atom k is
// exactly its outgoing edges.
struct Structure {
  std::vector<Vec3> positions;                   // N x 3, lattice units
  std::vector<int> species;                      // length N
  std::vector<std::vector<double>> node_features;  // N x d_n
  std::vector<std::pair<int, int>> edge_list;      // directed (k, l), k != l
  std::vector<std::vector<double>> edge_features;  // per edge, d_e

  int n_atoms() const { return static_cast<int>(positions.size()); }
};

// Unwrapped coordinates; displacement across frames is physical.
struct Trajectory {
  std::vector<std::vector<Vec3>> frames;  // L x N x 3
  double dt = 0.0;

  int n_frames() const { return static_cast<int>(frames.size()); }
};

enum class TargetKind { MsdFinal, Diffusivity, Conductivity };

std::string to_string(TargetKind kind);
TargetKind target_kind_from_string(const std::string& name);

// Transport quantity stored on log10 scale; the raw value is 10^value_log10.
struct TransportTarget {
  TargetKind kind = TargetKind::MsdFinal;
  int species = 0;
  double value_log10 = 0.0;
};

struct Sample {
  std::string id;
  Structure structure;
  std::optional<Trajectory> trajectory;
  double temperature = 0.0;  // kelvin-like lattice units, > 0
  TransportTarget target;
};

enum class DatasetKind { TrajectoryBased, StructureBased };
enum class Split { Train, Test };

std::string to_string(DatasetKind kind);
std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct Dataset {
  DatasetKind kind = DatasetKind::TrajectoryBased;
  std::vector<Sample> samples;
  std::vector<Split> split;  // parallel to samples
  double t_norm = 0.0;       // temperature normalization constant

  std::size_t size() const { return samples.size(); }
};

// Returns one human-readable description per broken invariant, naming the
// offending sample. Empty result means the dataset is well formed.
// Violations are data, not failures: this never throws.
std::vector<std::string> validate_dataset(const Dataset& ds);

}  // namespace ionpred
