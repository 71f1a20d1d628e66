#pragma once

#include <cmath>
#include <vector>

#include "mmdr/common.hpp"
#include "mmdr/rng.hpp"

namespace mmdr {

/// Columns with empirical std below this are treated as degenerate.
constexpr double kDegenerateStd = 1e-12;

/// Parameters of the planted two-view linear model.  A dataset is built as
///   X~ = R_X + U_X V_X + P Q_X   (T x N_X),
/// and likewise for Y with the same shared latent P, then every column is
/// scaled to unit empirical std (and mean-centered when `center` is set).
struct ModelParams {
  int n_x = 0, n_y = 0;  ///< observed dimensions per view
  int t = 0;             ///< number of samples
  int m_self_x = 0, m_self_y = 0, m_shared = 0;  ///< latent counts
  double var_r_x = 1.0, var_r_y = 1.0;  ///< white-noise variance
  double var_u_x = 0.0, var_u_y = 0.0;  ///< self-latent variance
  double var_p = 0.0;                   ///< shared-latent variance
  double var_v_x = 1.0, var_v_y = 1.0;  ///< self-projection entry variance
  double var_q_x = 1.0, var_q_y = 1.0;  ///< shared-projection entry variance
  bool center = true;

  void validate() const {
    if (n_x < 1 || n_y < 1)
      throw InvalidParameterError(strfmt("n_x/n_y must be positive (got %d, %d)", n_x, n_y));
    if (t < 1) throw InvalidParameterError(strfmt("t must be positive (got %d)", t));
    if (m_self_x < 0 || m_self_y < 0 || m_shared < 0)
      throw InvalidParameterError("latent counts must be non-negative");
    for (double v : {var_r_x, var_r_y, var_u_x, var_u_y, var_p, var_v_x,
                     var_v_y, var_q_x, var_q_y})
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidParameterError("variances must be finite and non-negative");
    if (var_r_x == 0.0 || var_r_y == 0.0)
      throw InvalidParameterError("white-noise variance must be positive");
  }

  /// Population variance of one pre-standardization column of X~.
  double total_var_x() const {
    return var_r_x + m_self_x * var_u_x * var_v_x + m_shared * var_p * var_q_x;
  }
  double total_var_y() const {
    return var_r_y + m_self_y * var_u_y * var_v_y + m_shared * var_p * var_q_y;
  }
};

/// Signal-to-noise ratios: gamma = var_latent * var_projection / var_noise.
struct SnrValues {
  double self_x = 0, self_y = 0, shared_x = 0, shared_y = 0;
};

inline SnrValues snr(const ModelParams& p) {
  return {p.var_u_x * p.var_v_x / p.var_r_x, p.var_u_y * p.var_v_y / p.var_r_y,
          p.var_p * p.var_q_x / p.var_r_x, p.var_p * p.var_q_y / p.var_r_y};
}

/// Inverts snr(): copies `base` and chooses var_u_x, var_u_y, var_p so both
/// views reach the requested ratios.  A single var_p has to serve the two
/// views, so the base ratios var_r/var_q (and var_r/var_v) must agree.
inline ModelParams params_from_snr(const ModelParams& base, double gamma_self,
                                   double gamma_shared) {
  if (gamma_self < 0 || gamma_shared < 0)
    throw InvalidParameterError("SNR values must be non-negative");
  ModelParams p = base;
  if (p.var_v_x <= 0 || p.var_v_y <= 0 || p.var_q_x <= 0 || p.var_q_y <= 0)
    throw InvalidParameterError("params_from_snr requires positive projection variances");
  p.var_u_x = gamma_self * p.var_r_x / p.var_v_x;
  p.var_u_y = gamma_self * p.var_r_y / p.var_v_y;
  double px = gamma_shared * p.var_r_x / p.var_q_x;
  double py = gamma_shared * p.var_r_y / p.var_q_y;
  if (std::abs(px - py) > 1e-9 * std::max({px, py, 1e-300}))
    throw InvalidParameterError(
        "params_from_snr: base variances give conflicting var_p for the two views");
  p.var_p = px;
  return p;
}

/// The quenched projection matrices; fixed across trials within one
/// projection realization.
struct QuenchedProjections {
  Matrix v_x, v_y;  ///< m_self_* x n_*
  Matrix q_x, q_y;  ///< m_shared x n_*
};

inline QuenchedProjections sample_projections(const ModelParams& p,
                                              std::uint64_t seed) {
  p.validate();
  QuenchedProjections out;
  CounterRng rvx(derive_seed(seed, {stream_label("v_x")}));
  CounterRng rvy(derive_seed(seed, {stream_label("v_y")}));
  CounterRng rqx(derive_seed(seed, {stream_label("q_x")}));
  CounterRng rqy(derive_seed(seed, {stream_label("q_y")}));
  out.v_x = gaussian_matrix(rvx, p.m_self_x, p.n_x, std::sqrt(p.var_v_x));
  out.v_y = gaussian_matrix(rvy, p.m_self_y, p.n_y, std::sqrt(p.var_v_y));
  out.q_x = gaussian_matrix(rqx, p.m_shared, p.n_x, std::sqrt(p.var_q_x));
  out.q_y = gaussian_matrix(rqy, p.m_shared, p.n_y, std::sqrt(p.var_q_y));
  return out;
}

/// Per-column standardization record.  Degenerate columns are centered but
/// left unscaled and reported by index instead of dividing by ~0.
struct ColumnStats {
  Vector mean, stddev;
  std::vector<int> degenerate;
};

/// Standardizes columns in place by the empirical (population) std, optionally
/// mean-centering first; returns the applied statistics.
inline ColumnStats standardize_columns(Matrix& m, bool center = true) {
  const auto t = static_cast<double>(m.rows());
  if (m.rows() < 1) throw InvalidParameterError("standardize_columns: empty matrix");
  ColumnStats s;
  if (center) {
    s.mean = m.colwise().mean();
    m.rowwise() -= s.mean.transpose();
  } else {
    // With centering off the origin is the reference point, so the scale is
    // the raw second moment and the recorded mean is zero.
    s.mean = Vector::Zero(m.cols());
  }
  s.stddev = (m.colwise().squaredNorm() / t).cwiseSqrt();
  for (int j = 0; j < m.cols(); ++j) {
    if (s.stddev[j] > kDegenerateStd)
      m.col(j) /= s.stddev[j];
    else
      s.degenerate.push_back(j);
  }
  return s;
}

/// Applies previously computed statistics to new data (e.g. a test split).
inline void apply_column_stats(Matrix& m, const ColumnStats& s,
                               bool center = true) {
  if (m.cols() != s.mean.size())
    throw DimensionMismatchError(strfmt(
        "apply_column_stats: %ld columns vs %ld stats", m.cols(), s.mean.size()));
  if (center) m.rowwise() -= s.mean.transpose();
  for (int j = 0; j < m.cols(); ++j)
    if (s.stddev[j] > kDegenerateStd) m.col(j) /= s.stddev[j];
}

/// One generated train or test draw: standardized views plus the planted
/// shared latent and the pre-standardization column statistics.
struct PairedDataset {
  Matrix x, y;           ///< T x N_X, T x N_Y, standardized
  Matrix shared_latent;  ///< T x m_shared, the common P
  ColumnStats stats_x, stats_y;
};

/// Draws R, U, P afresh and assembles both views against fixed projections.
inline PairedDataset generate_dataset(const ModelParams& p,
                                      const QuenchedProjections& proj,
                                      std::uint64_t seed) {
  p.validate();
  if (proj.v_x.rows() != p.m_self_x || proj.v_x.cols() != p.n_x ||
      proj.v_y.rows() != p.m_self_y || proj.v_y.cols() != p.n_y ||
      proj.q_x.rows() != p.m_shared || proj.q_x.cols() != p.n_x ||
      proj.q_y.rows() != p.m_shared || proj.q_y.cols() != p.n_y)
    throw DimensionMismatchError("generate_dataset: projections do not match params");

  PairedDataset d;
  CounterRng rrx(derive_seed(seed, {stream_label("r_x")}));
  CounterRng rry(derive_seed(seed, {stream_label("r_y")}));
  CounterRng rux(derive_seed(seed, {stream_label("u_x")}));
  CounterRng ruy(derive_seed(seed, {stream_label("u_y")}));
  CounterRng rp(derive_seed(seed, {stream_label("p")}));

  d.x = gaussian_matrix(rrx, p.t, p.n_x, std::sqrt(p.var_r_x));
  d.y = gaussian_matrix(rry, p.t, p.n_y, std::sqrt(p.var_r_y));
  if (p.m_self_x > 0 && p.var_u_x > 0) {
    Matrix u = gaussian_matrix(rux, p.t, p.m_self_x, std::sqrt(p.var_u_x));
    d.x.noalias() += u * proj.v_x;
  }
  if (p.m_self_y > 0 && p.var_u_y > 0) {
    Matrix u = gaussian_matrix(ruy, p.t, p.m_self_y, std::sqrt(p.var_u_y));
    d.y.noalias() += u * proj.v_y;
  }
  d.shared_latent = gaussian_matrix(rp, p.t, p.m_shared, std::sqrt(p.var_p));
  if (p.m_shared > 0 && p.var_p > 0) {
    d.x.noalias() += d.shared_latent * proj.q_x;
    d.y.noalias() += d.shared_latent * proj.q_y;
  }
  d.stats_x = standardize_columns(d.x, p.center);
  d.stats_y = standardize_columns(d.y, p.center);
  return d;
}

}  // namespace mmdr
