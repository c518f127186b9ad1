#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "error.hpp"

namespace alcart {

struct PcaProjection {
  Eigen::MatrixXd projected;    // M x d
  Eigen::MatrixXd basis;        // D x d, orthonormal columns
  Eigen::RowVectorXd mean;      // 1 x D
  Eigen::VectorXd eigenvalues;  // d, descending

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean) * basis;
  }
};

/// Centers the columns of `data` and projects onto the top `dims` eigenvectors
/// of the sample covariance. Each basis column is signed so that its
/// largest-magnitude entry (first one on ties) is positive.
inline PcaProjection pca_project(const Eigen::MatrixXd& data, int dims) {
  const auto d_total = data.cols();
  if (dims < 1) throw UsageError("pca needs dims >= 1");
  if (dims > d_total) throw UsageError("pca dims exceed input dimensionality");
  if (data.rows() < 2) throw UsageError("pca needs at least two rows");

  PcaProjection out;
  out.mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - out.mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw UsageError("covariance eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  out.basis.resize(d_total, dims);
  out.eigenvalues.resize(dims);
  for (int k = 0; k < dims; ++k) {
    const auto src = d_total - 1 - k;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > best) best = std::abs(v[i]), pivot = i;
    if (v[pivot] < 0.0) v = -v;
    out.basis.col(k) = v;
    out.eigenvalues[k] = solver.eigenvalues()[src];
  }
  out.projected = centered * out.basis;
  return out;
}

}  // namespace alcart
