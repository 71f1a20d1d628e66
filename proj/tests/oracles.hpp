#pragma once

// Slow, independently written reference implementations that the fast library
// code is tested against.  Everything here favors obviousness over speed.

#include <Eigen/Dense>
#include <cmath>
#include <tuple>

#include "mmdr/common.hpp"

namespace oracle {

using mmdr::Matrix;
using mmdr::Vector;

/// (1/T) A^T B by explicit triple loop.
inline Matrix cov_loops(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (Eigen::Index t = 0; t < a.rows(); ++t) sum += a(t, i) * b(t, j);
      out(i, j) = sum / static_cast<double>(a.rows());
    }
  return out;
}

/// Textbook Pearson correlation of two columns.
inline double pearson_loops(const Vector& x, const Vector& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Top-k eigenvectors of a symmetric matrix, eigenvalues descending.
inline std::pair<Matrix, Vector> eig_descending(const Matrix& cov, int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Eigen::Index n = cov.rows();
  Matrix w(n, k);
  Vector values(k);
  for (int i = 0; i < k; ++i) {
    w.col(i) = eig.eigenvectors().col(n - 1 - i);
    values[i] = eig.eigenvalues()[n - 1 - i];
  }
  return {w, values};
}

/// Symmetric inverse square root via eigendecomposition.
inline Matrix inv_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  Vector d = eig.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = 1.0 / std::sqrt(d[i]);
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

/// Canonical directions by the whitened-SVD construction:
/// SVD of C_XX^{-1/2} C_XY C_YY^{-1/2}, mapped back by the whiteners.
inline std::tuple<Matrix, Matrix, Vector> cca_whitened(const Matrix& cxx,
                                                       const Matrix& cyy,
                                                       const Matrix& cxy,
                                                       int k) {
  const Matrix wx_white = inv_sqrt(cxx);
  const Matrix wy_white = inv_sqrt(cyy);
  Eigen::BDCSVD<Matrix> svd(wx_white * cxy * wy_white,
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix wx = wx_white * svd.matrixU().leftCols(k);
  Matrix wy = wy_white * svd.matrixV().leftCols(k);
  for (int i = 0; i < k; ++i) {
    wx.col(i).normalize();
    wy.col(i).normalize();
  }
  return {wx, wy, svd.singularValues().head(k)};
}

/// |cos| of the angle between two vectors (direction match up to sign).
inline double abs_cosine(const Vector& a, const Vector& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

/// Smallest principal-angle cosine between the column spans of a and b;
/// 1 means identical subspaces.
inline double min_principal_cosine(const Matrix& a, const Matrix& b) {
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() *
                    Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() *
                    Matrix::Identity(b.rows(), b.cols());
  Eigen::BDCSVD<Matrix> svd(qa.transpose() * qb);
  return svd.singularValues().minCoeff();
}

}  // namespace oracle
