#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "rpteng/network.hpp"
#include "rpteng/quadrature.hpp"

namespace rpteng::test {

/// Output layer only: u = w_s sin(2 pi x / L) + w_c cos(2 pi x / L) + b, linear in theta.
inline NetworkSpec linear_spec(double length = 2.0, int outputs = 1) {
  NetworkSpec spec;
  spec.domain_length = length;
  spec.hidden_widths = {};
  spec.activation = Activation::tanh;
  spec.output_dim = outputs;
  return spec;
}

inline NetworkSpec small_spec(Activation act = Activation::tanh, int outputs = 1,
                              double length = 2.0) {
  NetworkSpec spec;
  spec.domain_length = length;
  spec.hidden_widths = {6, 5};
  spec.activation = act;
  spec.output_dim = outputs;
  return spec;
}

/// Random parameters with nonzero biases, so bias paths are exercised too.
inline FlatParams random_params(const NetworkSpec& spec, std::uint64_t seed, double scale = 0.8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  FlatParams theta(parameter_count(spec));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = dist(rng);
  return theta;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Midpoint rule with n cells, written out independently of the library grid.
template <typename F>
double midpoint_oracle(F f, double a, double b, long n) {
  const double h = (b - a) / double(n);
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += f(a + (double(i) + 0.5) * h);
  return acc * h;
}

/// Bisection for a sign change of f on [lo, hi].
template <typename F>
double bisect(F f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace rpteng::test
