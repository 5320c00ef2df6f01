#include "ionpred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "ionpred/physics.hpp"
#include "ionpred/rng.hpp"

namespace ionpred::synth {

namespace {

void check_spec(const MaterialSpec& spec) {
  if (spec.n_atoms < 2) throw std::invalid_argument("spec: n_atoms must be >= 2");
  if (spec.n_target_ions < 1 || spec.n_target_ions > spec.n_atoms) {
    throw std::invalid_argument("spec: n_target_ions must be in [1, n_atoms]");
  }
  if (!(spec.barrier_base > 0.0)) throw std::invalid_argument("spec: barrier_base must be > 0");
  if (spec.barrier_spread < 0.0) throw std::invalid_argument("spec: barrier_spread must be >= 0");
  if (!(spec.attempt_rate > 0.0)) throw std::invalid_argument("spec: attempt_rate must be > 0");
  if (!(spec.lattice_spacing > 0.0)) {
    throw std::invalid_argument("spec: lattice_spacing must be > 0");
  }
}

}  // namespace

double hop_probability(const MaterialSpec& spec, double barrier, double temperature, double dt) {
  if (!(temperature > 0.0)) throw std::invalid_argument("hop_probability: temperature must be > 0");
  const double p = spec.attempt_rate * std::exp(-barrier / temperature) * dt;
  if (!std::isfinite(p)) throw std::runtime_error("hop_probability: overflow");
  return std::min(0.5, p);
}

Structure gen_material(const MaterialSpec& spec) {
  check_spec(spec);
  const int n = spec.n_atoms;
  int side = 1;
  while (side * side * side < n) ++side;

  Structure st;
  st.positions.resize(static_cast<std::size_t>(n));
  st.species.assign(static_cast<std::size_t>(n), kHostSpecies);

  // Sites are filled in lexicographic order (z fastest), which keeps the
  // induced 6-neighbor subgraph connected for any n >= 2.
  auto site_index = [side](int ix, int iy, int iz) { return (ix * side + iy) * side + iz; };
  for (int s = 0; s < n; ++s) {
    const int ix = s / (side * side);
    const int iy = (s / side) % side;
    const int iz = s % side;
    st.positions[static_cast<std::size_t>(s)] = {spec.lattice_spacing * ix,
                                                 spec.lattice_spacing * iy,
                                                 spec.lattice_spacing * iz};
  }

  Rng pick(mix_seed(spec.seed, 1));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  pick.shuffle(order);
  for (int i = 0; i < spec.n_target_ions; ++i) {
    st.species[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = kTargetSpecies;
  }

  Rng barrier_rng(mix_seed(spec.seed, 2));
  std::vector<double> barrier(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (st.species[static_cast<std::size_t>(k)] == kTargetSpecies) {
      barrier[static_cast<std::size_t>(k)] =
          spec.barrier_base +
          barrier_rng.uniform(-spec.barrier_spread / 2.0, spec.barrier_spread / 2.0);
    }
  }

  const int dx[6] = {1, -1, 0, 0, 0, 0};
  const int dy[6] = {0, 0, 1, -1, 0, 0};
  const int dz[6] = {0, 0, 0, 0, 1, -1};
  std::vector<int> coordination(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    const int ix = s / (side * side);
    const int iy = (s / side) % side;
    const int iz = s % side;
    for (int d = 0; d < 6; ++d) {
      const int jx = ix + dx[d];
      const int jy = iy + dy[d];
      const int jz = iz + dz[d];
      if (jx < 0 || jy < 0 || jz < 0 || jx >= side || jy >= side || jz >= side) continue;
      const int t = site_index(jx, jy, jz);
      if (t >= n) continue;
      st.edge_list.emplace_back(s, t);
      coordination[static_cast<std::size_t>(s)] += 1;
    }
  }

  for (int k = 0; k < n; ++k) {
    const bool target = st.species[static_cast<std::size_t>(k)] == kTargetSpecies;
    st.node_features.push_back({barrier[static_cast<std::size_t>(k)], target ? 1.0 : 0.0,
                                target ? 0.0 : 1.0,
                                static_cast<double>(coordination[static_cast<std::size_t>(k)])});
  }
  for (const auto& [k, l] : st.edge_list) {
    st.edge_features.push_back(
        {spec.lattice_spacing,
         barrier[static_cast<std::size_t>(k)] - barrier[static_cast<std::size_t>(l)]});
  }
  return st;
}

Trajectory simulate_trajectory(const Structure& st, const MaterialSpec& spec, double temperature,
                               int n_frames, double dt, std::uint64_t seed) {
  if (!(temperature > 0.0)) throw std::invalid_argument("simulate: temperature must be > 0");
  if (n_frames < 2) throw std::invalid_argument("simulate: need at least 2 frames");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");

  const int n = st.n_atoms();
  std::vector<double> p_hop(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (st.species[static_cast<std::size_t>(k)] == kTargetSpecies) {
      const double barrier = st.node_features[static_cast<std::size_t>(k)][kBarrierFeature];
      const double p = spec.attempt_rate * std::exp(-barrier / temperature) * dt;
      if (!std::isfinite(p)) throw std::runtime_error("simulate: hop probability overflow");
      p_hop[static_cast<std::size_t>(k)] = std::min(0.5, p);
    }
  }

  Rng rng(mix_seed(seed, 3));
  Trajectory tr;
  tr.dt = dt;
  tr.frames.resize(static_cast<std::size_t>(n_frames));
  tr.frames[0] = st.positions;

  std::vector<Vec3> pos = st.positions;  // running positions of target ions
  const double vib = 0.05 * spec.lattice_spacing;
  for (int f = 1; f < n_frames; ++f) {
    std::vector<Vec3>& frame = tr.frames[static_cast<std::size_t>(f)];
    frame.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      if (st.species[static_cast<std::size_t>(k)] == kTargetSpecies) {
        const double p = p_hop[static_cast<std::size_t>(k)];
        Vec3& x = pos[static_cast<std::size_t>(k)];
        for (int axis = 0; axis < 3; ++axis) {
          const double u = rng.uniform();
          if (u < p) {
            x[static_cast<std::size_t>(axis)] += spec.lattice_spacing;
          } else if (u < 2.0 * p) {
            x[static_cast<std::size_t>(axis)] -= spec.lattice_spacing;
          }
        }
        frame[static_cast<std::size_t>(k)] = x;
      } else {
        const Vec3& site = st.positions[static_cast<std::size_t>(k)];
        frame[static_cast<std::size_t>(k)] = {site[0] + vib * rng.normal(),
                                              site[1] + vib * rng.normal(),
                                              site[2] + vib * rng.normal()};
      }
    }
  }
  return tr;
}

double analytic_diffusivity(const MaterialSpec& spec, double barrier, double temperature,
                            double dt) {
  const double p = hop_probability(spec, barrier, temperature, dt);
  return p * spec.lattice_spacing * spec.lattice_spacing / dt;
}

double final_frame_msd(const Trajectory& tr, const Structure& st, int species) {
  double acc = 0.0;
  int count = 0;
  const auto& first = tr.frames.front();
  const auto& last = tr.frames.back();
  for (int k = 0; k < st.n_atoms(); ++k) {
    if (st.species[static_cast<std::size_t>(k)] != species) continue;
    double d2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const double d = last[static_cast<std::size_t>(k)][static_cast<std::size_t>(axis)] -
                       first[static_cast<std::size_t>(k)][static_cast<std::size_t>(axis)];
      d2 += d * d;
    }
    acc += d2;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("final_frame_msd: species not present");
  return acc / static_cast<double>(count);
}

Dataset make_dataset(DatasetKind kind, TargetKind target_kind, int n_materials,
                     const MaterialSpec& spec_template, const std::vector<double>& temperatures,
                     int n_frames, double dt, std::uint64_t seed) {
  if (n_materials < 4) throw std::invalid_argument("make_dataset: need at least 4 materials");
  if (temperatures.empty()) throw std::invalid_argument("make_dataset: temperatures empty");
  if (target_kind == TargetKind::Conductivity) {
    throw std::invalid_argument("make_dataset: generator emits msd_final or diffusivity targets");
  }

  std::set<std::uint64_t> seen_seeds;
  std::vector<MaterialSpec> specs;
  for (int m = 0; m < n_materials; ++m) {
    MaterialSpec s = spec_template;
    s.seed = seed + static_cast<std::uint64_t>(m);
    if (!seen_seeds.insert(s.seed).second) {
      throw std::invalid_argument("make_dataset: duplicate material seed");
    }
    specs.push_back(s);
  }

  // 80/20 split decided per material, nearest-integer test count, at least
  // one material on each side.
  int n_test = static_cast<int>(std::llround(0.2 * n_materials));
  n_test = std::max(1, std::min(n_materials - 1, n_test));
  std::vector<int> order(static_cast<std::size_t>(n_materials));
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(mix_seed(seed, 999));
  split_rng.shuffle(order);
  std::vector<bool> is_test(static_cast<std::size_t>(n_materials), false);
  for (int i = 0; i < n_test; ++i) {
    is_test[static_cast<std::size_t>(order[static_cast<std::size_t>(n_materials - 1 - i)])] = true;
  }

  Dataset ds;
  ds.kind = kind;
  ds.t_norm = *std::max_element(temperatures.begin(), temperatures.end());
  for (int m = 0; m < n_materials; ++m) {
    const Structure st = gen_material(specs[static_cast<std::size_t>(m)]);
    for (std::size_t j = 0; j < temperatures.size(); ++j) {
      const double temp = temperatures[j];
      const std::uint64_t traj_seed =
          mix_seed(seed, static_cast<std::uint64_t>(m) * 1000003ULL + j);
      Trajectory tr = simulate_trajectory(st, specs[static_cast<std::size_t>(m)], temp, n_frames,
                                          dt, traj_seed);

      Sample s;
      s.id = "m" + std::string(m < 10 ? "00" : (m < 100 ? "0" : "")) + std::to_string(m) + "_t" +
             std::to_string(j);
      s.structure = st;
      s.temperature = temp;
      s.target.species = kTargetSpecies;
      s.target.kind = target_kind;
      double raw = 0.0;
      if (target_kind == TargetKind::MsdFinal) {
        raw = final_frame_msd(tr, st, kTargetSpecies);
      } else {
        // Targets fit the multi-origin MSD over the full window. Target ions
        // have no vibration term, so their MSD is linear from t = 0 and the
        // full-window fit is unbiased; the trailing-window fit of a handful
        // of ions is noisy enough to occasionally yield a negative slope,
        // which has no valid log10.
        const int k_points = std::min(128, n_frames);
        raw = physics::einstein_diffusivity(
            physics::msd(tr, st, kTargetSpecies, k_points, /*multi_origin=*/true),
            /*fit_window=*/1.0);
      }
      try {
        s.target.value_log10 = physics::to_log10(raw);
      } catch (const std::domain_error&) {
        throw std::runtime_error("make_dataset: sample " + s.id +
                                 " has nonpositive transport value; increase frames, "
                                 "attempt_rate, or temperature");
      }

      const bool train = !is_test[static_cast<std::size_t>(m)];
      if (kind == DatasetKind::TrajectoryBased && train) s.trajectory = std::move(tr);
      ds.samples.push_back(std::move(s));
      ds.split.push_back(train ? Split::Train : Split::Test);
    }
  }
  return ds;
}

}  // namespace ionpred::synth
