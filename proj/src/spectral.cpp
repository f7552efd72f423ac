#include "rpteng/spectral.hpp"

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rpteng/error.hpp"

namespace rpteng {

namespace {

using cplx = std::complex<double>;

std::vector<cplx> forward_fft(const Eigen::Ref<const Eigen::VectorXd>& u) {
  Eigen::FFT<double> fft;
  std::vector<double> in(u.data(), u.data() + u.size());
  std::vector<cplx> out;
  fft.fwd(out, in);
  return out;
}

Eigen::VectorXd inverse_fft(const std::vector<cplx>& spectrum) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.inv(out, spectrum);
  Eigen::VectorXd u(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) u[i] = out[i].real();
  return u;
}

}  // namespace

Eigen::VectorXd wavenumbers(Eigen::Index n, double length) {
  Eigen::VectorXd k(n);
  const double base = 2.0 * EIGEN_PI / length;
  for (Eigen::Index j = 0; j < n; ++j) k[j] = base * double(j < (n + 1) / 2 ? j : j - n);
  return k;
}

Eigen::VectorXd spectral_derivative(const Eigen::Ref<const Eigen::VectorXd>& u, double length,
                                    int m) {
  if (m < 0) throw Error(ErrorKind::invalid_argument, "derivative order must be >= 0");
  if (m == 0) return u;
  const Eigen::Index n = u.size();
  auto spectrum = forward_fft(u);
  const Eigen::VectorXd k = wavenumbers(n, length);
  cplx factor_unit(0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool nyquist = (n % 2 == 0) && j == n / 2;
    if (nyquist && m % 2 == 1) {
      spectrum[j] = 0.0;
      continue;
    }
    spectrum[j] *= std::pow(factor_unit * k[j], m);
  }
  return inverse_fft(spectrum);
}

Eigen::VectorXd dealias_two_thirds(const Eigen::Ref<const Eigen::VectorXd>& u) {
  const Eigen::Index n = u.size();
  auto spectrum = forward_fft(u);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index mode = j < (n + 1) / 2 ? j : n - j;
    if (3 * mode > n) spectrum[j] = 0.0;
  }
  return inverse_fft(spectrum);
}

FieldJets spectral_jets(const Field& samples, double length, int order) {
  if (order < 0 || order > 3) throw Error(ErrorKind::invalid_argument, "jet order must be 0..3");
  FieldJets jets;
  jets.d0 = samples;
  jets.d1 = Field::Zero(samples.rows(), samples.cols());
  jets.d2 = jets.d1;
  jets.d3 = jets.d1;
  Field* slots[] = {&jets.d0, &jets.d1, &jets.d2, &jets.d3};
  const Eigen::VectorXd k = wavenumbers(samples.cols(), length);
  const Eigen::Index n = samples.cols();
  for (Eigen::Index c = 0; c < samples.rows(); ++c) {
    const Eigen::VectorXd row = samples.row(c).transpose();
    const auto spectrum = forward_fft(row);
    for (int m = 1; m <= order; ++m) {
      std::vector<cplx> s = spectrum;
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool nyquist = (n % 2 == 0) && j == n / 2;
        s[j] = (nyquist && m % 2 == 1) ? cplx(0.0) : s[j] * std::pow(cplx(0.0, k[j]), m);
      }
      slots[m]->row(c) = inverse_fft(s).transpose();
    }
  }
  return jets;
}

Eigen::VectorXd trig_interpolate(const Eigen::Ref<const Eigen::VectorXd>& u, double x0,
                                 double length, const Eigen::Ref<const Eigen::VectorXd>& xs) {
  const Eigen::Index n = u.size();
  const auto spectrum = forward_fft(u);
  const double base = 2.0 * EIGEN_PI / length;
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index p = 0; p < xs.size(); ++p) {
    const double xi = xs[p] - x0;
    double acc = spectrum[0].real();
    for (Eigen::Index j = 1; j < (n + 1) / 2; ++j) {
      // conjugate-symmetric pair j, n - j
      const double angle = base * j * xi;
      acc += 2.0 * (spectrum[j].real() * std::cos(angle) - spectrum[j].imag() * std::sin(angle));
    }
    if (n % 2 == 0) acc += spectrum[n / 2].real() * std::cos(base * (n / 2) * xi);
    out[p] = acc / double(n);
  }
  return out;
}

Eigen::MatrixXd trig_interpolation_matrix(Eigen::Index n, double x0, double length,
                                          const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "interpolation needs at least one sample");
  Eigen::MatrixXd out(xs.size(), n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e[i] = 1.0;
    out.col(i) = trig_interpolate(e, x0, length, xs);
    e[i] = 0.0;
  }
  return out;
}

}  // namespace rpteng
