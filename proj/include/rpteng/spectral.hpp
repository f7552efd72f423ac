#pragma once

#include <Eigen/Core>

#include "rpteng/field.hpp"

namespace rpteng {

/// Angular wavenumbers 2*pi*j/L in FFT order (0, 1, ..., n/2-1, -n/2, ..., -1).
Eigen::VectorXd wavenumbers(Eigen::Index n, double length);

/// m-th derivative of periodic equispaced samples by exact DFT differentiation.
/// The Nyquist mode is dropped for odd m so the result stays real.
Eigen::VectorXd spectral_derivative(const Eigen::Ref<const Eigen::VectorXd>& u, double length,
                                    int m);

/// Zeroes every Fourier mode with |j| > n/3.
Eigen::VectorXd dealias_two_thirds(const Eigen::Ref<const Eigen::VectorXd>& u);

/// Derivatives 0..order of every component row of a sampled field.
FieldJets spectral_jets(const Field& samples, double length, int order);

/// Evaluates the trigonometric interpolant of samples u, taken at x0 + i*L/n, at the points xs.
Eigen::VectorXd trig_interpolate(const Eigen::Ref<const Eigen::VectorXd>& u, double x0,
                                 double length, const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Matrix B with (B u)_p = trig_interpolate(u, x0, length, xs)[p] for any u of length n.
Eigen::MatrixXd trig_interpolation_matrix(Eigen::Index n, double x0, double length,
                                          const Eigen::Ref<const Eigen::VectorXd>& xs);

}  // namespace rpteng
