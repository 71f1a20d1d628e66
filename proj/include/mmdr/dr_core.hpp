#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmdr/common.hpp"

namespace mmdr {

enum class Method { kPca, kPls, kCca, kRcca };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kPca: return "pca";
    case Method::kPls: return "pls";
    case Method::kCca: return "cca";
    case Method::kRcca: return "rcca";
  }
  throw InvalidParameterError("unknown method");
}

inline Method method_from_name(std::string_view name) {
  if (name == "pca") return Method::kPca;
  if (name == "pls") return Method::kPls;
  if (name == "cca") return Method::kCca;
  if (name == "rcca") return Method::kRcca;
  throw InvalidParameterError(strfmt("unknown method '%s' (expected pca, pls, cca or rcca)",
                                     std::string(name).c_str()));
}

/// CCA refuses covariance blocks whose eigenvalue ratio exceeds this.
constexpr double kCcaConditionLimit = 1e12;

struct FitConfig {
  Method method = Method::kPca;
  int k = 1;               ///< number of direction pairs to extract
  double tol = 1e-4;       ///< power-iteration convergence on the x-weight update
  int max_iter = 5000;
  double c_x = 0.1;        ///< ridge weight in [0, 1]; 0 is CCA, 1 is PLS
  double c_y = 0.1;
};

/// Second-moment blocks scaled by 1/T (not T-1).
struct CovarianceBlocks {
  Matrix c_xx, c_yy, c_xy;
};

inline CovarianceBlocks covariance_blocks(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows())
    throw DimensionMismatchError(
        strfmt("covariance_blocks: %ld vs %ld rows", x.rows(), y.rows()));
  if (x.rows() < 1) throw InvalidParameterError("covariance_blocks: no rows");
  const double inv_t = 1.0 / static_cast<double>(x.rows());
  CovarianceBlocks b;
  b.c_xx = inv_t * (x.transpose() * x);
  b.c_yy = inv_t * (y.transpose() * y);
  b.c_xy = inv_t * (x.transpose() * y);
  return b;
}

/// Per-direction extraction diagnostics.
struct DirectionInfo {
  int iterations = 0;
  bool converged = true;
  /// Cross-covariance was exhausted; this direction only pads the basis.
  bool rank_deficient = false;
};

/// A fitted pair of projection bases.  Columns of w_x / w_y map raw views to
/// variates; for the iterative methods the columns are already rotated so the
/// training variates are exactly uncorrelated.
struct ProjectionPair {
  Method method = Method::kPca;
  Matrix w_x, w_y;  ///< n_x x k and n_y x k, unit-norm sign-fixed columns
  Vector scores;    ///< per-direction coupling (PCA: x-view eigenvalues)
  std::vector<DirectionInfo> info;
  /// Largest off-diagonal correlation among training variates, per view.
  double gram_offdiag_x = 0.0, gram_offdiag_y = 0.0;
};

inline Matrix transform(const Matrix& data, const Matrix& w) {
  if (data.cols() != w.rows())
    throw DimensionMismatchError(strfmt("transform: data has %ld columns, weights %ld rows",
                                        data.cols(), w.rows()));
  return data * w;
}

/// Singular values of a rectangular matrix, descending.
inline Vector singular_spectrum(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

namespace detail {

/// Flips each column so its largest-magnitude entry (first on ties) is
/// positive; kills the sign ambiguity of eigenvectors and rotated weights.
inline void fix_column_signs(Matrix& w) {
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      if (std::abs(w(i, j)) > mag) {
        mag = std::abs(w(i, j));
        best = i;
      }
    if (w(best, j) < 0.0) w.col(j) = -w.col(j);
  }
}

/// Solves D w = rhs for D = (1-c) cov + c I.  Positive ridge keeps D positive
/// definite through deflation, so a Cholesky factor is enough; at c = 0 the
/// deflated directions make D exactly rank-deficient and the solver falls
/// back to an eigenvalue pseudo-inverse with a relative clip.
class RidgeSolver {
 public:
  RidgeSolver(const Matrix& cov, double c) : c_(c) {
    if (c < 0.0 || c > 1.0)
      throw InvalidParameterError(strfmt("ridge weight must lie in [0, 1], got %g", c));
    d_ = (1.0 - c) * cov;
    d_.diagonal().array() += c;
    if (c > 0.0) {
      llt_.compute(d_);
      if (llt_.info() != Eigen::Success)
        throw SingularCovarianceError("ridge-damped covariance is not positive definite");
    } else {
      es_.compute(d_);
      if (es_.info() != Eigen::Success)
        throw SingularCovarianceError("covariance eigendecomposition failed");
      const Vector& ev = es_.eigenvalues();
      const double clip = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
      inv_ev_ = Vector::Zero(ev.size());
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > clip) inv_ev_[i] = 1.0 / ev[i];
    }
  }

  Vector solve(const Vector& rhs) const {
    if (c_ > 0.0) return llt_.solve(rhs);
    return es_.eigenvectors() *
           (inv_ev_.asDiagonal() * (es_.eigenvectors().transpose() * rhs));
  }

  /// sqrt(w' D w); the normalization metric of the alternating iteration.
  double metric_norm(const Vector& w) const {
    return std::sqrt(std::max(0.0, w.dot(d_ * w)));
  }

 private:
  double c_;
  Matrix d_;
  Eigen::LLT<Matrix> llt_;
  Eigen::SelfAdjointEigenSolver<Matrix> es_;
  Vector inv_ev_;
};

/// Throws when a covariance block is unusable for exact CCA.  T <= N always
/// trips this: the sample covariance is then rank-deficient by construction.
inline void require_invertible(const Matrix& cov, const char* label) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SingularCovarianceError(strfmt("%s eigendecomposition failed", label));
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (lo <= 0.0)
    throw SingularCovarianceError(
        strfmt("%s is numerically singular (smallest eigenvalue %.3g)", label, lo));
  if (hi / lo > kCcaConditionLimit)
    throw SingularCovarianceError(strfmt(
        "%s is numerically singular (condition number %.3g exceeds %.3g)",
        label, hi / lo, kCcaConditionLimit));
}

/// Rank-1 deflation of the blocks by the variates of (wx, wy), x side first;
/// the y-side update must see the already-deflated cross block.
inline void deflate_pair(Matrix& cxx, Matrix& cyy, Matrix& cxy,
                         const Vector& wx, const Vector& wy) {
  Vector a = cxx * wx;
  const double tau_x = wx.dot(a);
  if (tau_x > 0.0) {
    Eigen::RowVectorXd wtc = wx.transpose() * cxy;
    cxy.noalias() -= (a / tau_x) * wtc;
    cxx.noalias() -= a * (a / tau_x).transpose();
  }
  Vector b = cyy * wy;
  const double tau_y = wy.dot(b);
  if (tau_y > 0.0) {
    Vector cw = cxy * wy;
    cxy.noalias() -= cw * (b / tau_y).transpose();
    cyy.noalias() -= b * (b / tau_y).transpose();
  }
}

/// First standard basis vector with a component outside span(prior columns),
/// orthogonalized and normalized; pads the basis once signal is exhausted.
inline Vector completion_direction(const Matrix& w, int n_done) {
  const auto dim = w.rows();
  Matrix q;
  if (n_done > 0) {
    Eigen::HouseholderQR<Matrix> qr(w.leftCols(n_done));
    q = qr.householderQ() * Matrix::Identity(dim, n_done);
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    Vector v = Vector::Unit(dim, j);
    if (n_done > 0) v -= q * (q.transpose() * v);
    const double nrm = v.norm();
    if (nrm > 1e-8) return v / nrm;
  }
  throw InvalidParameterError("completion_direction: basis already spans the space");
}

/// Largest off-diagonal correlation magnitude of W' C W.
inline double gram_offdiag(const Matrix& cov, const Matrix& w) {
  Matrix g = w.transpose() * cov * w;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
      const double denom = std::sqrt(std::max(g(i, i) * g(j, j), 0.0));
      if (denom > 0.0) worst = std::max(worst, std::abs(g(i, j)) / denom);
    }
  return worst;
}

/// Maps deflation-space weights back to the raw views: R = W (P' W)^-1, so
/// R reproduces the deflated variates from the original data.
inline Matrix rotate_weights(const Matrix& w, const Matrix& p) {
  Matrix m = p.transpose() * w;
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) return w;
  return w * lu.inverse();
}

}  // namespace detail

/// Top-k eigenpairs of a covariance matrix, eigenvalues descending and
/// eigenvector signs fixed.
inline std::pair<Matrix, Vector> pca_from_cov(const Matrix& cov, int k) {
  if (cov.rows() != cov.cols())
    throw DimensionMismatchError("pca_from_cov: covariance must be square");
  if (k < 1 || k > cov.rows())
    throw InvalidParameterError(
        strfmt("pca_from_cov: k=%d out of range for %ld dimensions", k, cov.rows()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success)
    throw SingularCovarianceError("pca_from_cov: eigendecomposition failed");
  Matrix w(cov.rows(), k);
  Vector lambda(k);
  for (int j = 0; j < k; ++j) {
    const auto src = cov.rows() - 1 - j;  // ascending to descending
    w.col(j) = es.eigenvectors().col(src);
    lambda[j] = es.eigenvalues()(src);
  }
  detail::fix_column_signs(w);
  return {std::move(w), std::move(lambda)};
}

/// Fits any method from precomputed covariance blocks.
inline ProjectionPair fit_from_cov(const CovarianceBlocks& blocks,
                                   const FitConfig& cfg) {
  const auto n_x = blocks.c_xx.rows();
  const auto n_y = blocks.c_yy.rows();
  if (blocks.c_xx.cols() != n_x || blocks.c_yy.cols() != n_y ||
      blocks.c_xy.rows() != n_x || blocks.c_xy.cols() != n_y)
    throw DimensionMismatchError("fit_from_cov: inconsistent block shapes");
  if (cfg.k < 1 || cfg.k > std::min(n_x, n_y))
    throw InvalidParameterError(strfmt(
        "k=%d out of range for views of dimension %ld and %ld", cfg.k, n_x, n_y));
  if (cfg.tol <= 0.0 || cfg.max_iter < 1)
    throw InvalidParameterError("tol must be positive and max_iter at least 1");

  ProjectionPair out;
  out.method = cfg.method;

  if (cfg.method == Method::kPca) {
    auto [wx, lambda] = pca_from_cov(blocks.c_xx, cfg.k);
    auto [wy, lambda_y] = pca_from_cov(blocks.c_yy, cfg.k);
    out.w_x = std::move(wx);
    out.w_y = std::move(wy);
    out.scores = std::move(lambda);
    out.info.assign(static_cast<size_t>(cfg.k), DirectionInfo{});
    out.gram_offdiag_x = detail::gram_offdiag(blocks.c_xx, out.w_x);
    out.gram_offdiag_y = detail::gram_offdiag(blocks.c_yy, out.w_y);
    return out;
  }

  double c_x = cfg.c_x, c_y = cfg.c_y;
  if (cfg.method == Method::kPls) c_x = c_y = 1.0;
  if (cfg.method == Method::kCca) c_x = c_y = 0.0;
  if (c_x == 0.0) detail::require_invertible(blocks.c_xx, "C_XX");
  if (c_y == 0.0) detail::require_invertible(blocks.c_yy, "C_YY");

  Matrix cxx = blocks.c_xx, cyy = blocks.c_yy, cxy = blocks.c_xy;
  const double base_norm = cxy.norm();

  Matrix w_x(n_x, cfg.k), w_y(n_y, cfg.k);
  Matrix p_x(n_x, cfg.k), p_y(n_y, cfg.k);
  out.scores = Vector::Zero(cfg.k);
  out.info.resize(static_cast<size_t>(cfg.k));

  for (int comp = 0; comp < cfg.k; ++comp) {
    DirectionInfo& info = out.info[static_cast<size_t>(comp)];
    if (cxy.norm() <= 1e-14 * base_norm || base_norm == 0.0) {
      w_x.col(comp) = detail::completion_direction(w_x, comp);
      w_y.col(comp) = detail::completion_direction(w_y, comp);
      p_x.col(comp) = w_x.col(comp);
      p_y.col(comp) = w_y.col(comp);
      info.rank_deficient = true;
      continue;
    }

    detail::RidgeSolver solver_x(cxx, c_x);
    detail::RidgeSolver solver_y(cyy, c_y);

    Eigen::Index j0 = 0;
    cxy.colwise().norm().maxCoeff(&j0);
    Vector wy = Vector::Unit(n_y, j0);
    Vector wx_prev;
    Vector wx, wy_next;
    info.converged = false;
    bool collapsed = false;
    for (int it = 1; it <= cfg.max_iter; ++it) {
      wx = solver_x.solve(cxy * wy);
      const double nx = solver_x.metric_norm(wx);
      if (nx <= 0.0) {
        collapsed = true;
        break;
      }
      wx /= nx;
      wy_next = solver_y.solve(cxy.transpose() * wx);
      const double ny = solver_y.metric_norm(wy_next);
      if (ny <= 0.0) {
        collapsed = true;
        break;
      }
      wy = wy_next / ny;
      info.iterations = it;
      if (wx_prev.size() > 0 && (wx - wx_prev).norm() < cfg.tol) {
        info.converged = true;
        break;
      }
      wx_prev = wx;
    }
    if (collapsed || wx.size() == 0 || !wx.allFinite() || !wy.allFinite()) {
      // The solve collapsed (clipped subspace ate the start column); pad.
      w_x.col(comp) = detail::completion_direction(w_x, comp);
      w_y.col(comp) = detail::completion_direction(w_y, comp);
      p_x.col(comp) = w_x.col(comp);
      p_y.col(comp) = w_y.col(comp);
      info.rank_deficient = true;
      info.converged = true;
      continue;
    }

    out.scores[comp] = wx.dot(cxy * wy);
    w_x.col(comp) = wx;
    w_y.col(comp) = wy;
    Vector a = cxx * wx;
    Vector b = cyy * wy;
    const double tau_x = wx.dot(a), tau_y = wy.dot(b);
    p_x.col(comp) = tau_x > 0.0 ? Vector(a / tau_x) : wx;
    p_y.col(comp) = tau_y > 0.0 ? Vector(b / tau_y) : wy;
    detail::deflate_pair(cxx, cyy, cxy, wx, wy);
  }

  out.w_x = detail::rotate_weights(w_x, p_x);
  out.w_y = detail::rotate_weights(w_y, p_y);
  for (int j = 0; j < cfg.k; ++j) {
    const double nx = out.w_x.col(j).norm();
    const double ny = out.w_y.col(j).norm();
    if (nx > 0.0) out.w_x.col(j) /= nx;
    if (ny > 0.0) out.w_y.col(j) /= ny;
  }
  detail::fix_column_signs(out.w_x);
  detail::fix_column_signs(out.w_y);
  out.gram_offdiag_x = detail::gram_offdiag(blocks.c_xx, out.w_x);
  out.gram_offdiag_y = detail::gram_offdiag(blocks.c_yy, out.w_y);
  return out;
}

inline ProjectionPair fit(const Matrix& x, const Matrix& y, const FitConfig& cfg) {
  return fit_from_cov(covariance_blocks(x, y), cfg);
}

inline ProjectionPair fit_pca(const Matrix& x, const Matrix& y, FitConfig cfg) {
  cfg.method = Method::kPca;
  return fit(x, y, cfg);
}

inline ProjectionPair fit_pls(const Matrix& x, const Matrix& y, FitConfig cfg) {
  cfg.method = Method::kPls;
  return fit(x, y, cfg);
}

inline ProjectionPair fit_cca(const Matrix& x, const Matrix& y, FitConfig cfg) {
  cfg.method = Method::kCca;
  return fit(x, y, cfg);
}

inline ProjectionPair fit_rcca(const Matrix& x, const Matrix& y, FitConfig cfg) {
  cfg.method = Method::kRcca;
  return fit(x, y, cfg);
}

}  // namespace mmdr
