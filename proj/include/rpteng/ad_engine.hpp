#pragma once

#include <vector>

#include <Eigen/Core>

#include "rpteng/field.hpp"
#include "rpteng/jet.hpp"
#include "rpteng/network.hpp"

namespace rpteng {

/// Spatial jets of every output component at x. Entries above `order` are zero.
/// Only x-derivatives are propagated; mixed theta/x derivatives are not available.
std::vector<Jet3<double>> jet_eval(const NetworkSpec& spec, const FlatParams& theta, double x,
                                   int order);

/// Batched jet propagation through the network; each FieldJets block is output_dim x xs.size().
FieldJets jets_on_points(const NetworkSpec& spec, const FlatParams& theta,
                         const Eigen::Ref<const Eigen::VectorXd>& xs, int order);

struct ParamGradient {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Exact gradient of each output component with respect to theta at fixed x.
std::vector<ParamGradient> param_gradient(const NetworkSpec& spec, const FlatParams& theta,
                                          double x);

struct JacobianEval {
  Field values;             // output_dim x n
  Eigen::MatrixXd jacobian;  // (n * output_dim) x n_theta, row p * output_dim + c
};

/// Values and parameter Jacobian on a batch of points, by one reverse sweep per output component.
JacobianEval parameter_jacobian(const NetworkSpec& spec, const FlatParams& theta,
                                const Eigen::Ref<const Eigen::VectorXd>& xs);

}  // namespace rpteng
