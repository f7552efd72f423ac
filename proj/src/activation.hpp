#pragma once

#include <Eigen/Core>

#include "rpteng/network.hpp"

namespace rpteng::detail {

/// sigma and its first three derivatives, evaluated elementwise at z.
struct ActivationTaylor {
  Eigen::ArrayXXd g0, g1, g2, g3;
};

inline Eigen::ArrayXXd activate(Activation activation, const Eigen::ArrayXXd& z) {
  switch (activation) {
    case Activation::tanh: return z.tanh();
    case Activation::sin: return z.sin();
    case Activation::identity: return z;
  }
  return z;
}

inline Eigen::ArrayXXd activate_derivative(Activation activation, const Eigen::ArrayXXd& z) {
  switch (activation) {
    case Activation::tanh: return 1.0 - z.tanh().square();
    case Activation::sin: return z.cos();
    case Activation::identity: return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
  }
  return z;
}

inline ActivationTaylor activation_taylor(Activation activation, const Eigen::ArrayXXd& z) {
  ActivationTaylor t;
  switch (activation) {
    case Activation::tanh: {
      t.g0 = z.tanh();
      const Eigen::ArrayXXd s = 1.0 - t.g0.square();
      t.g1 = s;
      t.g2 = -2.0 * t.g0 * s;
      t.g3 = s * (6.0 * t.g0.square() - 2.0);
      break;
    }
    case Activation::sin: {
      t.g0 = z.sin();
      t.g1 = z.cos();
      t.g2 = -t.g0;
      t.g3 = -t.g1;
      break;
    }
    case Activation::identity: {
      t.g0 = z;
      t.g1 = Eigen::ArrayXXd::Ones(z.rows(), z.cols());
      t.g2 = Eigen::ArrayXXd::Zero(z.rows(), z.cols());
      t.g3 = t.g2;
      break;
    }
  }
  return t;
}

/// Embedding phase 2*pi*frac(x/L); reducing modulo the period keeps x and x+L on the same phase.
inline double embedding_phase(double x, double length) {
  const double s = x / length;
  return 2.0 * EIGEN_PI * (s - std::floor(s));
}

}  // namespace rpteng::detail
