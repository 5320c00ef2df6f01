#pragma once

#include <string>
#include <vector>

#include "ionpred/types.hpp"

namespace ionpred::physics {

struct MsdCurve {
  std::vector<double> times;   // strictly increasing, starts at 0
  std::vector<double> values;  // squared length units, values[0] == 0
};

// Mean squared displacement of species-s atoms at k_points evenly spaced lag
// times, displacement measured from frame 0. With multi_origin set, each lag
// is additionally averaged over a deterministic grid of time origins; that is
// a variance-reduction extension, not the headline definition.
MsdCurve msd(const Trajectory& tr, const Structure& st, int species, int k_points,
             bool multi_origin = false);

// Least-squares slope of the curve over its trailing fit_window fraction
// (long-time diffusive regime), divided by 6.
double einstein_diffusivity(const MsdCurve& curve, double fit_window = 0.5);

struct NernstEinsteinParams {
  double n_s = 1.0;  // number density of mobile ions
  double q_s = 1.0;  // ionic charge
  double k_b = 1.0;  // Boltzmann constant, 1 in lattice units
  double temperature = 1.0;
};

// sigma = n q^2 D / (k_B T); assumes uncorrelated ion motion.
double nernst_einstein(double diffusivity, const NernstEinsteinParams& p);

double to_log10(double value);   // requires value > 0
double from_log10(double v);

void write_msd_csv(const MsdCurve& curve, const std::string& path);

}  // namespace ionpred::physics
