#include "ionpred/embed.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "ionpred/synth.hpp"

namespace ionpred::embed {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT, used whenever the frame count is a power of two;
// other lengths fall back to the direct transform of the needed bins.
void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Magnitudes of bins 1..L/2 of the series, normalized by L.
std::vector<double> spectrum_magnitudes(const std::vector<double>& series) {
  const std::size_t n = series.size();
  const std::size_t kmax = n / 2;
  std::vector<double> mags(kmax, 0.0);
  if (is_pow2(n)) {
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = series[i];
    fft_pow2(a);
    for (std::size_t k = 1; k <= kmax; ++k) mags[k - 1] = std::abs(a[k]) / static_cast<double>(n);
  } else {
    for (std::size_t k = 1; k <= kmax; ++k) {
      std::complex<double> acc(0.0, 0.0);
      const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
      for (std::size_t t = 0; t < n; ++t) {
        acc += series[t] * std::complex<double>(std::cos(w * static_cast<double>(t)),
                                                std::sin(w * static_cast<double>(t)));
      }
      mags[k - 1] = std::abs(acc) / static_cast<double>(n);
    }
  }
  return mags;
}

// Log-spaced band of bin k (1-based): floor(n_bands * ln k / ln(kmax + 1)).
int band_of(std::size_t k, std::size_t kmax, int n_bands) {
  const double b = static_cast<double>(n_bands) * std::log(static_cast<double>(k)) /
                   std::log(static_cast<double>(kmax + 1));
  const int idx = static_cast<int>(b);
  return idx >= n_bands ? n_bands - 1 : idx;
}

std::vector<int> species_indices(const Structure& st, int species) {
  std::vector<int> idx;
  for (int k = 0; k < st.n_atoms(); ++k) {
    if (st.species[static_cast<std::size_t>(k)] == species) idx.push_back(k);
  }
  if (idx.empty()) throw std::invalid_argument("species not present in structure");
  return idx;
}

}  // namespace

std::vector<double> trajectory_embedding(const Trajectory& tr, const Structure& st, int species,
                                         int n_bands) {
  const int frames = tr.n_frames();
  if (n_bands < 1) throw std::invalid_argument("trajectory_embedding: n_bands must be >= 1");
  if (frames < 2 * n_bands) {
    throw std::invalid_argument("trajectory_embedding: need at least 2*n_bands frames");
  }
  const std::vector<int> ions = species_indices(st, species);
  const std::size_t kmax = static_cast<std::size_t>(frames) / 2;

  std::vector<double> bands(static_cast<std::size_t>(n_bands), 0.0);
  std::vector<int> band_count(static_cast<std::size_t>(n_bands), 0);
  for (std::size_t k = 1; k <= kmax; ++k) {
    band_count[static_cast<std::size_t>(band_of(k, kmax, n_bands))] += 1;
  }

  std::vector<double> series(static_cast<std::size_t>(frames));
  for (int ion : ions) {
    for (int axis = 0; axis < 3; ++axis) {
      const double origin =
          tr.frames[0][static_cast<std::size_t>(ion)][static_cast<std::size_t>(axis)];
      for (int t = 0; t < frames; ++t) {
        series[static_cast<std::size_t>(t)] =
            tr.frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(ion)]
                     [static_cast<std::size_t>(axis)] -
            origin;
      }
      const std::vector<double> mags = spectrum_magnitudes(series);
      for (std::size_t k = 1; k <= kmax; ++k) {
        bands[static_cast<std::size_t>(band_of(k, kmax, n_bands))] += mags[k - 1];
      }
    }
  }
  const double inv_series = 1.0 / (3.0 * static_cast<double>(ions.size()));
  std::vector<double> out(static_cast<std::size_t>(n_bands) + 1, 0.0);
  for (int b = 0; b < n_bands; ++b) {
    const int cnt = band_count[static_cast<std::size_t>(b)];
    if (cnt > 0) out[static_cast<std::size_t>(b)] = bands[static_cast<std::size_t>(b)] * inv_series /
                                                    static_cast<double>(cnt);
  }
  out.back() = std::log10(1.0 + synth::final_frame_msd(tr, st, species));
  return out;
}

std::vector<std::vector<double>> atom_embedding(const Structure& st) {
  const int n = st.n_atoms();
  const std::size_t d_n = st.node_features.empty() ? 0 : st.node_features.front().size();
  const std::size_t d_e = st.edge_features.empty() ? 0 : st.edge_features.front().size();
  const std::size_t d_a = 2 * d_n + d_e;

  std::vector<std::vector<double>> out(static_cast<std::size_t>(n),
                                       std::vector<double>(d_a, 0.0));
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (std::size_t e = 0; e < st.edge_list.size(); ++e) {
    const int k = st.edge_list[e].first;
    const int l = st.edge_list[e].second;
    std::vector<double>& row = out[static_cast<std::size_t>(k)];
    const auto& nk = st.node_features[static_cast<std::size_t>(k)];
    const auto& ml = st.edge_features[e];
    const auto& nl = st.node_features[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < d_n; ++i) row[i] += nk[i];
    for (std::size_t i = 0; i < d_e; ++i) row[d_n + i] += ml[i];
    for (std::size_t i = 0; i < d_n; ++i) row[d_n + d_e + i] += nl[i];
    degree[static_cast<std::size_t>(k)] += 1;
  }
  for (int k = 0; k < n; ++k) {
    if (degree[static_cast<std::size_t>(k)] == 0) {
      throw std::invalid_argument("atom_embedding: atom " + std::to_string(k) + " is isolated");
    }
    const double inv = 1.0 / static_cast<double>(degree[static_cast<std::size_t>(k)]);
    for (double& v : out[static_cast<std::size_t>(k)]) v *= inv;
  }
  return out;
}

std::vector<std::vector<double>> select_species(const std::vector<std::vector<double>>& ea,
                                                const Structure& st, int species) {
  const std::vector<int> idx = species_indices(st, species);
  std::vector<std::vector<double>> out;
  out.reserve(idx.size());
  for (int k : idx) out.push_back(ea[static_cast<std::size_t>(k)]);
  return out;
}

std::vector<std::vector<double>> polynomial_expand(const std::vector<std::vector<double>>& m) {
  std::vector<std::vector<double>> out;
  out.reserve(m.size());
  for (const auto& row : m) {
    std::vector<double> e;
    e.reserve(3 * row.size());
    for (double v : row) e.push_back(v);
    for (double v : row) e.push_back(v * v);
    for (double v : row) e.push_back(v * v * v);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<double> temperature_embedding(double temperature, double t_norm) {
  if (!(temperature > 0.0) || !(t_norm > 0.0)) {
    throw std::invalid_argument("temperature_embedding: T and T_m must be > 0");
  }
  const double r = temperature / t_norm;
  return {1.0, r, r * r, r * r * r};
}

std::vector<double> build_x(const Structure& st, double temperature, double t_norm, int species,
                            const EmbedConfig& cfg) {
  std::vector<std::vector<double>> rows = select_species(atom_embedding(st), st, species);
  if (cfg.polynomial_expansion) rows = polynomial_expand(rows);

  std::vector<double> pooled(rows.front().size(), 0.0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) pooled[i] += row[i];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& v : pooled) v *= inv;

  const std::vector<double> temp = temperature_embedding(temperature, t_norm);
  pooled.push_back(temp[0]);
  pooled.push_back(temp[1]);
  if (cfg.polynomial_expansion) {
    pooled.push_back(temp[2]);
    pooled.push_back(temp[3]);
  }
  return pooled;
}

int x_dimension(int d_n, int d_e, const EmbedConfig& cfg) {
  const int d_a = 2 * d_n + d_e;
  return cfg.polynomial_expansion ? 3 * d_a + 4 : d_a + 2;
}

EmbeddedDataset embed_dataset(const Dataset& ds, const EmbedConfig& cfg) {
  EmbeddedDataset eds;
  eds.t_norm = ds.t_norm;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    EmbeddedSample e;
    e.id = s.id;
    e.split = ds.split[i];
    e.temperature = s.temperature;
    e.y_log10 = s.target.value_log10;
    e.x_vec = build_x(s.structure, s.temperature, ds.t_norm, s.target.species, cfg);
    if (s.trajectory) {
      e.p_vec = trajectory_embedding(*s.trajectory, s.structure, s.target.species, cfg.n_bands);
    }
    eds.samples.push_back(std::move(e));
  }
  return eds;
}

void write_embedded_jsonl(const EmbeddedDataset& eds, const std::string& path) {
  using json = nlohmann::ordered_json;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& e : eds.samples) {
    json j;
    j["id"] = e.id;
    j["split"] = to_string(e.split);
    j["x_vec"] = e.x_vec;
    if (e.p_vec) {
      j["p_vec"] = *e.p_vec;
    } else {
      j["p_vec"] = nullptr;
    }
    j["y_log10"] = e.y_log10;
    j["temperature"] = e.temperature;
    out << j.dump() << '\n';
  }
}

EmbeddedDataset read_embedded_jsonl(const std::string& path) {
  using json = nlohmann::ordered_json;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  EmbeddedDataset eds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    EmbeddedSample e;
    e.id = j.at("id").get<std::string>();
    e.split = split_from_string(j.at("split").get<std::string>());
    e.x_vec = j.at("x_vec").get<std::vector<double>>();
    if (!j.at("p_vec").is_null()) e.p_vec = j.at("p_vec").get<std::vector<double>>();
    e.y_log10 = j.at("y_log10").get<double>();
    e.temperature = j.at("temperature").get<double>();
    eds.samples.push_back(std::move(e));
  }
  return eds;
}

}  // namespace ionpred::embed
