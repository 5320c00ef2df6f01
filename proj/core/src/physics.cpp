#include "ionpred/physics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ionpred::physics {

namespace {

std::vector<int> species_indices(const Structure& st, int species) {
  std::vector<int> idx;
  for (int k = 0; k < st.n_atoms(); ++k) {
    if (st.species[static_cast<std::size_t>(k)] == species) idx.push_back(k);
  }
  if (idx.empty()) throw std::invalid_argument("species not present in structure");
  return idx;
}

double sq_disp(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

MsdCurve msd(const Trajectory& tr, const Structure& st, int species, int k_points,
             bool multi_origin) {
  const int frames = tr.n_frames();
  if (k_points < 2 || k_points > frames) {
    throw std::invalid_argument("msd: k_points must be in [2, L]");
  }
  const std::vector<int> ions = species_indices(st, species);

  MsdCurve curve;
  curve.times.reserve(static_cast<std::size_t>(k_points));
  curve.values.reserve(static_cast<std::size_t>(k_points));
  for (int j = 0; j < k_points; ++j) {
    const int lag = static_cast<int>(std::llround(
        static_cast<double>(j) * static_cast<double>(frames - 1) / static_cast<double>(k_points - 1)));
    double acc = 0.0;
    std::size_t count = 0;
    if (multi_origin && lag > 0) {
      const int max_origin = frames - 1 - lag;
      const int stride = std::max(1, (max_origin + 1) / 64);
      for (int o = 0; o <= max_origin; o += stride) {
        for (int ion : ions) {
          acc += sq_disp(tr.frames[static_cast<std::size_t>(o + lag)][static_cast<std::size_t>(ion)],
                         tr.frames[static_cast<std::size_t>(o)][static_cast<std::size_t>(ion)]);
          ++count;
        }
      }
    } else {
      for (int ion : ions) {
        acc += sq_disp(tr.frames[static_cast<std::size_t>(lag)][static_cast<std::size_t>(ion)],
                       tr.frames[0][static_cast<std::size_t>(ion)]);
        ++count;
      }
    }
    curve.times.push_back(static_cast<double>(lag) * tr.dt);
    curve.values.push_back(acc / static_cast<double>(count));
  }
  return curve;
}

double einstein_diffusivity(const MsdCurve& curve, double fit_window) {
  if (curve.times.size() != curve.values.size() || curve.times.size() < 2) {
    throw std::invalid_argument("einstein_diffusivity: degenerate curve");
  }
  const double t_final = curve.times.back();
  const double t_start = t_final * (1.0 - fit_window);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] + 1e-12 * t_final < t_start) continue;
    sx += curve.times[i];
    sy += curve.values[i];
    sxx += curve.times[i] * curve.times[i];
    sxy += curve.times[i] * curve.values[i];
    ++n;
  }
  if (n < 2) throw std::invalid_argument("einstein_diffusivity: fit window has < 2 points");
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("einstein_diffusivity: degenerate fit window");
  const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
  return slope / 6.0;
}

double nernst_einstein(double diffusivity, const NernstEinsteinParams& p) {
  if (diffusivity < 0.0) throw std::invalid_argument("nernst_einstein: D must be >= 0");
  return p.n_s * p.q_s * p.q_s * diffusivity / (p.k_b * p.temperature);
}

double to_log10(double value) {
  if (!(value > 0.0)) throw std::domain_error("to_log10: value must be positive");
  return std::log10(value);
}

double from_log10(double v) { return std::pow(10.0, v); }

void write_msd_csv(const MsdCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,msd\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out << curve.times[i] << ',' << curve.values[i] << '\n';
  }
}

}  // namespace ionpred::physics
