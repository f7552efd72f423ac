#pragma once

#include <Eigen/Core>

namespace rpteng {

/// Sampled field: one row per component, one column per grid point.
///
/// Column-major storage makes `field.reshaped()` point-major then component, which is the row
/// order of every least-squares system in the library.
using Field = Eigen::MatrixXd;

/// A field together with its first three x-derivatives on the same points.
struct FieldJets {
  Field d0;
  Field d1;
  Field d2;
  Field d3;

  Eigen::Index components() const { return d0.rows(); }
  Eigen::Index points() const { return d0.cols(); }
};

}  // namespace rpteng
