#pragma once

#include <cstdint>
#include <vector>

#include "ionpred/types.hpp"

namespace ionpred::synth {

// Species vocabulary of the generator.
constexpr int kTargetSpecies = 0;  // mobile ions, the prediction target
constexpr int kHostSpecies = 1;   // framework atoms, vibrate but never hop

// Node feature layout: [activation barrier, one-hot target, one-hot host,
// coordination count]. Edge features: [distance, barrier difference].
constexpr int kNodeFeatureDim = 4;
constexpr int kEdgeFeatureDim = 2;
constexpr int kBarrierFeature = 0;

// Energy units use k_B = 1, so barriers are in units of temperature.
struct MaterialSpec {
  int n_atoms = 32;
  int n_target_ions = 8;
  double barrier_base = 1.0;     // E_a0
  double barrier_spread = 0.0;   // per-ion offset width, uniform +-spread/2
  double attempt_rate = 1.0;     // nu, 1/time
  double lattice_spacing = 1.0;  // a, length units
  std::uint64_t seed = 0;
};

// Per-axis, per-step hop probability min(0.5, nu * exp(-barrier/T) * dt).
double hop_probability(const MaterialSpec& spec, double barrier, double temperature, double dt);

// Atoms on a cubic lattice with 6-neighbor connectivity (non-periodic
// truncation at the boundary). Target ions are a seeded subset of sites and
// carry individual barriers E_a0 + u, u uniform in [-spread/2, +spread/2].
// Deterministic given spec.seed. Requires n_atoms >= 2 so no atom is isolated.
Structure gen_material(const MaterialSpec& spec);

// Each target ion performs an independent +-a / 0 random walk per axis with
// per-direction probability hop_probability(...); host atoms get i.i.d.
// Gaussian vibration (std 0.05 a) around their lattice sites. Frames are
// unwrapped; frame 0 is the equilibrium structure.
Trajectory simulate_trajectory(const Structure& st, const MaterialSpec& spec, double temperature,
                               int n_frames, double dt, std::uint64_t seed);

// Exact 3D Einstein diffusivity of the hop process. Per axis the step is +-a
// with probability p each, so the per-step variance is 2 p a^2 and the
// per-axis MSD grows as 2 p a^2 t / dt. Summed over 3 axes, MSD_3D = 6 D t
// with D = p a^2 / dt.
double analytic_diffusivity(const MaterialSpec& spec, double barrier, double temperature,
                            double dt);

// Mean over target ions of the squared displacement between the last and the
// first frame.
double final_frame_msd(const Trajectory& tr, const Structure& st, int species);

// Generates n_materials materials x |temperatures| samples. Targets are
// log10 of the final-frame MSD (MsdFinal) or log10 of the Einstein-fitted
// diffusivity (Diffusivity), both measured on the simulated trajectory.
// Structure-based datasets simulate, measure, then discard the trajectory.
// The split is 80/20 by material so no material spans both splits; t_norm is
// the maximum temperature.
Dataset make_dataset(DatasetKind kind, TargetKind target_kind, int n_materials,
                     const MaterialSpec& spec_template, const std::vector<double>& temperatures,
                     int n_frames, double dt, std::uint64_t seed);

}  // namespace ionpred::synth
