#include "rpteng/ad_engine.hpp"

#include <array>
#include <cmath>

#include "activation.hpp"
#include "rpteng/error.hpp"

namespace rpteng {

FieldJets jets_on_points(const NetworkSpec& spec, const FlatParams& theta,
                         const Eigen::Ref<const Eigen::VectorXd>& xs, int order) {
  if (order < 0 || order > 3) throw Error(ErrorKind::invalid_argument, "jet order must be 0..3");
  check_params(spec, theta);
  const auto shapes = layer_shapes(spec);
  const Eigen::Index n = xs.size();
  const double k = 2.0 * EIGEN_PI / spec.domain_length;

  // a[m] holds the m-th x-derivative of the current layer's input, one column per point.
  std::array<Eigen::ArrayXXd, 4> a;
  for (auto& m : a) m = Eigen::ArrayXXd::Zero(NetworkSpec::input_dim, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const double phase = detail::embedding_phase(xs[p], spec.domain_length);
    const double s = std::sin(phase), c = std::cos(phase);
    a[0](0, p) = s;
    a[0](1, p) = c;
    a[1](0, p) = k * c;
    a[1](1, p) = -k * s;
    a[2](0, p) = -k * k * s;
    a[2](1, p) = -k * k * c;
    a[3](0, p) = -k * k * k * c;
    a[3](1, p) = k * k * k * s;
  }

  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& sh = shapes[l];
    Eigen::Map<const RowMatrixXd> w(theta.data() + sh.weight_offset, sh.out, sh.in);
    Eigen::Map<const Eigen::VectorXd> b(theta.data() + sh.bias_offset, sh.out);
    std::array<Eigen::ArrayXXd, 4> z;
    Eigen::MatrixXd z0 = w * a[0].matrix();
    z0.colwise() += b;
    z[0] = z0.array();
    for (int m = 1; m <= 3; ++m) {
      z[m] = m <= order ? (w * a[m].matrix()).array().eval()
                        : Eigen::ArrayXXd::Zero(sh.out, n).eval();
    }
    if (l + 1 == shapes.size()) {
      a = std::move(z);
      break;
    }
    const auto g = detail::activation_taylor(spec.activation, z[0]);
    a[0] = g.g0;
    a[1] = g.g1 * z[1];
    a[2] = g.g2 * z[1].square() + g.g1 * z[2];
    a[3] = g.g3 * z[1].cube() + 3.0 * g.g2 * z[1] * z[2] + g.g1 * z[3];
  }

  FieldJets jets;
  jets.d0 = a[0].matrix();
  jets.d1 = a[1].matrix();
  jets.d2 = a[2].matrix();
  jets.d3 = a[3].matrix();
  return jets;
}

std::vector<Jet3<double>> jet_eval(const NetworkSpec& spec, const FlatParams& theta, double x,
                                   int order) {
  if (order < 1 || order > 3) throw Error(ErrorKind::invalid_argument, "jet order must be 1..3");
  Eigen::VectorXd xs(1);
  xs[0] = x;
  const FieldJets jets = jets_on_points(spec, theta, xs, order);
  std::vector<Jet3<double>> out(spec.output_dim);
  for (int c = 0; c < spec.output_dim; ++c) {
    out[c] = {jets.d0(c, 0), jets.d1(c, 0), jets.d2(c, 0), jets.d3(c, 0)};
  }
  return out;
}

JacobianEval parameter_jacobian(const NetworkSpec& spec, const FlatParams& theta,
                                const Eigen::Ref<const Eigen::VectorXd>& xs) {
  check_params(spec, theta);
  const auto shapes = layer_shapes(spec);
  const Eigen::Index n = xs.size();
  const int outputs = spec.output_dim;

  // inputs[l] feeds layer l; slopes[l] = sigma'(z_l) for hidden layer l.
  std::vector<Eigen::MatrixXd> inputs(shapes.size());
  std::vector<Eigen::ArrayXXd> slopes(shapes.size());
  inputs[0].resize(NetworkSpec::input_dim, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto [s, c] = embed(spec, xs[p]);
    inputs[0](0, p) = s;
    inputs[0](1, p) = c;
  }
  JacobianEval result;
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& sh = shapes[l];
    Eigen::Map<const RowMatrixXd> w(theta.data() + sh.weight_offset, sh.out, sh.in);
    Eigen::Map<const Eigen::VectorXd> b(theta.data() + sh.bias_offset, sh.out);
    Eigen::MatrixXd z = w * inputs[l];
    z.colwise() += b;
    if (l + 1 < shapes.size()) {
      slopes[l] = detail::activate_derivative(spec.activation, z.array());
      inputs[l + 1] = detail::activate(spec.activation, z.array()).matrix();
    } else {
      result.values = std::move(z);
    }
  }

  const Eigen::Index rows = n * outputs;
  result.jacobian.resize(rows, theta.size());
  using Strided = Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<>>;
  for (int c = 0; c < outputs; ++c) {
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(outputs, n);
    delta.row(c).setOnes();
    for (std::size_t l = shapes.size(); l-- > 0;) {
      const auto& sh = shapes[l];
      for (int i = 0; i < sh.out; ++i) {
        for (int j = 0; j < sh.in; ++j) {
          Strided col(result.jacobian.col(sh.weight_offset + Eigen::Index(i) * sh.in + j).data() + c,
                      n, Eigen::InnerStride<>(outputs));
          col = delta.row(i).cwiseProduct(inputs[l].row(j)).transpose();
        }
        Strided col(result.jacobian.col(sh.bias_offset + i).data() + c, n,
                    Eigen::InnerStride<>(outputs));
        col = delta.row(i).transpose();
      }
      if (l > 0) {
        Eigen::Map<const RowMatrixXd> w(theta.data() + sh.weight_offset, sh.out, sh.in);
        delta = ((w.transpose() * delta).array() * slopes[l - 1]).matrix();
      }
    }
  }
  return result;
}

std::vector<ParamGradient> param_gradient(const NetworkSpec& spec, const FlatParams& theta,
                                          double x) {
  Eigen::VectorXd xs(1);
  xs[0] = x;
  const JacobianEval eval = parameter_jacobian(spec, theta, xs);
  std::vector<ParamGradient> out(spec.output_dim);
  for (int c = 0; c < spec.output_dim; ++c) {
    out[c].value = eval.values(c, 0);
    out[c].grad = eval.jacobian.row(c).transpose();
  }
  return out;
}

}  // namespace rpteng
