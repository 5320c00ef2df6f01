#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ionpred/types.hpp"

namespace ionpred::embed {

struct EmbedConfig {
  int n_bands = 16;                  // log-spaced frequency bands of the trajectory spectrum
  bool polynomial_expansion = true;  // third-order expansion of structure/temperature blocks
};

// Fixed-dimensional summary of the target ions' motion: the magnitude
// spectrum of each ion's centered displacement series (one DFT per axis),
// pooled into n_bands log-spaced frequency bands by mean, averaged over axes
// and ions, with log10(1 + final-frame MSD) appended. Dimension n_bands + 1.
// Requires L >= 2 * n_bands and at least one atom of the species.
std::vector<double> trajectory_embedding(const Trajectory& tr, const Structure& st, int species,
                                         int n_bands);

// Row k is the mean over neighbors l of [n_k ; m_kl ; n_l]. Fails on
// isolated atoms. Output is N x (2 d_n + d_e).
std::vector<std::vector<double>> atom_embedding(const Structure& st);

// Rows of `ea` whose atom species matches, order preserved.
std::vector<std::vector<double>> select_species(const std::vector<std::vector<double>>& ea,
                                                const Structure& st, int species);

// Per row [v ; v*v ; v*v*v], element-wise powers concatenated (third order).
std::vector<std::vector<double>> polynomial_expand(const std::vector<std::vector<double>>& m);

// [1, T/T_m, (T/T_m)^2, (T/T_m)^3]; the leading 1 gives the bias-free linear
// encoder a constant channel.
std::vector<double> temperature_embedding(double temperature, double t_norm);

// Structure--temperature embedding: atom_embedding -> select_species ->
// polynomial_expand -> mean pool over the species rows -> concat temperature
// block. With polynomial_expansion off, both blocks stay unexpanded (the
// temperature block keeps its constant channel: [1, T/T_m]).
std::vector<double> build_x(const Structure& st, double temperature, double t_norm, int species,
                            const EmbedConfig& cfg = {});

// d_xT for a given node/edge feature dimensionality under the config.
int x_dimension(int d_n, int d_e, const EmbedConfig& cfg = {});

struct EmbeddedSample {
  std::string id;
  Split split = Split::Train;
  double temperature = 0.0;
  double y_log10 = 0.0;
  std::vector<double> x_vec;
  std::optional<std::vector<double>> p_vec;
};

struct EmbeddedDataset {
  std::vector<EmbeddedSample> samples;
  double t_norm = 0.0;
};

// Precomputes X (and E_p where a trajectory exists) for every sample.
EmbeddedDataset embed_dataset(const Dataset& ds, const EmbedConfig& cfg = {});

// JSON-lines cache: {id, split, x_vec, p_vec|null, y_log10, temperature}.
void write_embedded_jsonl(const EmbeddedDataset& eds, const std::string& path);
EmbeddedDataset read_embedded_jsonl(const std::string& path);

}  // namespace ionpred::embed
