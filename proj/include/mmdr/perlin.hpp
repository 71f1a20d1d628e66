#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "mmdr/common.hpp"
#include "mmdr/rng.hpp"

namespace mmdr {

/// Largest double below 1; the top of the half-open pixel range.
constexpr double kOneBelowUnit = 0x1.fffffffffffffp-1;

/// Gradient-lattice noise on a periodic grid_cells x grid_cells lattice.
/// The raw field is exactly 0 at every lattice node and C1-smooth between
/// nodes; periodicity means any torus offset of the sampling window sees the
/// same statistics with no boundary seams.
struct PerlinField {
  int grid_cells = 0;
  std::vector<double> grad_x, grad_y;  ///< unit gradients, row-major (v, u)
  double amplitude = 1.0;              ///< multiplier applied by consumers

  PerlinField(int cells, CounterRng& rng) : grid_cells(cells) {
    if (cells < 1)
      throw InvalidParameterError("PerlinField: need at least one lattice cell");
    grad_x.resize(static_cast<size_t>(cells) * cells);
    grad_y.resize(static_cast<size_t>(cells) * cells);
    for (size_t i = 0; i < grad_x.size(); ++i) {
      const double ang = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
      grad_x[i] = std::cos(ang);
      grad_y[i] = std::sin(ang);
    }
  }

  /// Raw noise at lattice coordinates (u, v); range [-1/sqrt(2), 1/sqrt(2)].
  double value(double u, double v) const {
    const int iu = static_cast<int>(std::floor(u));
    const int iv = static_cast<int>(std::floor(v));
    const double fu = u - iu, fv = v - iv;
    const double su = fade(fu), sv = fade(fv);
    const double n00 = corner_dot(iu, iv, fu, fv);
    const double n10 = corner_dot(iu + 1, iv, fu - 1.0, fv);
    const double n01 = corner_dot(iu, iv + 1, fu, fv - 1.0);
    const double n11 = corner_dot(iu + 1, iv + 1, fu - 1.0, fv - 1.0);
    const double nx0 = n00 + su * (n10 - n00);
    const double nx1 = n01 + su * (n11 - n01);
    return nx0 + sv * (nx1 - nx0);
  }

  /// Affine rescale of the raw field to [0, 1).
  double value01(double u, double v) const {
    const double w = 0.5 * (value(u, v) * std::numbers::sqrt2 + 1.0);
    return std::min(std::max(w, 0.0), kOneBelowUnit);
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

  double corner_dot(int iu, int iv, double du, double dv) const {
    const int g = grid_cells;
    const int wu = ((iu % g) + g) % g;
    const int wv = ((iv % g) + g) % g;
    const size_t idx = static_cast<size_t>(wv) * g + wu;
    return grad_x[idx] * du + grad_y[idx] * dv;
  }
};

}  // namespace mmdr
