#pragma once

#include <Eigen/SVD>

namespace rpteng::detail {

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

/// Divide-and-conquer SVD, redone with one-sided Jacobi when it breaks down into non-finite
/// output (seen with Eigen 3.4 on some clustered spectra).
inline ThinSvd thin_svd(const Eigen::MatrixXd& a) {
  {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().allFinite() && svd.matrixU().allFinite() && svd.matrixV().allFinite()) {
      return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace rpteng::detail
