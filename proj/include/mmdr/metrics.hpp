#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "mmdr/common.hpp"
#include "mmdr/rng.hpp"

namespace mmdr {

/// Pearson cross-correlation matrix between the columns of two variate
/// blocks (rows are paired observations).
inline Matrix correlation_matrix(const Matrix& zx, const Matrix& zy) {
  if (zx.rows() != zy.rows())
    throw DimensionMismatchError(
        strfmt("correlation_matrix: %ld vs %ld rows", zx.rows(), zy.rows()));
  if (zx.rows() < 2)
    throw InvalidParameterError("correlation_matrix: need at least 2 rows");
  const double t = static_cast<double>(zx.rows());
  Matrix cx = zx.rowwise() - zx.colwise().mean();
  Matrix cy = zy.rowwise() - zy.colwise().mean();
  Eigen::RowVectorXd sx = cx.colwise().norm();
  Eigen::RowVectorXd sy = cy.colwise().norm();
  for (Eigen::Index j = 0; j < sx.size(); ++j)
    if (sx[j] * sx[j] <= 1e-30 * t)
      throw DegenerateColumnError(
          strfmt("x variate %ld has (near-)zero variance", j));
  for (Eigen::Index j = 0; j < sy.size(); ++j)
    if (sy[j] * sy[j] <= 1e-30 * t)
      throw DegenerateColumnError(
          strfmt("y variate %ld has (near-)zero variance", j));
  Matrix corr = cx.transpose() * cy;
  for (Eigen::Index i = 0; i < corr.rows(); ++i)
    for (Eigen::Index j = 0; j < corr.cols(); ++j) corr(i, j) /= sx[i] * sy[j];
  return corr;
}

/// Frobenius norm of the cross-correlation matrix.
inline double total_correlation(const Matrix& zx, const Matrix& zy) {
  return correlation_matrix(zx, zy).norm();
}

/// Recovered correlation: total correlation scaled by the planted pair count.
inline double rc(const Matrix& zx, const Matrix& zy, int m_shared) {
  if (m_shared < 1) throw InvalidParameterError("rc: m_shared must be positive");
  return total_correlation(zx, zy) / static_cast<double>(m_shared);
}

/// The same statistic on freshly drawn independent Gaussian variates; the
/// chance level that finite samples produce without any real coupling.
inline std::vector<double> rc0_samples(int t, int kx, int ky, int m_shared,
                                       int n_trials, std::uint64_t seed) {
  if (t < 2 || kx < 1 || ky < 1)
    throw InvalidParameterError("rc0_samples: need t >= 2 and positive k");
  if (n_trials < 1) throw InvalidParameterError("rc0_samples: need at least 1 trial");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_trials));
  for (int trial = 0; trial < n_trials; ++trial) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));
    Matrix zx = gaussian_matrix(rng, t, kx);
    Matrix zy = gaussian_matrix(rng, t, ky);
    out.push_back(rc(zx, zy, m_shared));
  }
  return out;
}

struct Rc0Stats {
  double mean = 0.0, stddev = 0.0;
};

inline Rc0Stats estimate_rc0(int t, int kx, int ky, int m_shared, int n_trials,
                             std::uint64_t seed) {
  auto samples = rc0_samples(t, kx, ky, m_shared, n_trials, seed);
  Rc0Stats s;
  for (double v : samples) s.mean += v;
  s.mean /= static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return s;
}

/// Bias-corrected statistic; deliberately not clipped at zero so a run below
/// chance stays visible.
inline double rc_prime(double rc_value, double rc0_mean) {
  return rc_value - rc0_mean;
}

/// Memoizes chance-level estimates across grid cells; many cells share the
/// same (t, k) geometry and the estimate is not cheap at large t.
class Rc0Cache {
 public:
  Rc0Stats get(int t, int kx, int ky, int m_shared, int n_trials,
               std::uint64_t seed) {
    const Key key{t, kx, ky, m_shared, n_trials, seed};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    Rc0Stats s = estimate_rc0(t, kx, ky, m_shared, n_trials, seed);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, s).first->second;
  }

 private:
  using Key = std::tuple<int, int, int, int, int, std::uint64_t>;
  std::mutex mu_;
  std::map<Key, Rc0Stats> cache_;
};

}  // namespace mmdr
