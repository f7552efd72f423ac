#pragma once

#include <cmath>

namespace rpteng {

/// Value and first three x-derivatives of a scalar field at one point.
///
/// Products follow the Leibniz rule and compositions follow Faa di Bruno truncated at
/// third order, so every arithmetic result carries exact derivatives up to rounding.
template <typename Scalar>
struct Jet3 {
  Scalar v0{0};
  Scalar v1{0};
  Scalar v2{0};
  Scalar v3{0};

  static Jet3 constant(Scalar c) { return {c, Scalar(0), Scalar(0), Scalar(0)}; }
  static Jet3 variable(Scalar x) { return {x, Scalar(1), Scalar(0), Scalar(0)}; }
};

/// Composes g with u given g and its first three derivatives evaluated at u.v0.
template <typename Scalar>
Jet3<Scalar> compose(const Jet3<Scalar>& u, Scalar g0, Scalar g1, Scalar g2, Scalar g3) {
  const Scalar u1sq = u.v1 * u.v1;
  return {g0, g1 * u.v1, g2 * u1sq + g1 * u.v2,
          g3 * u1sq * u.v1 + Scalar(3) * g2 * u.v1 * u.v2 + g1 * u.v3};
}

template <typename Scalar>
Jet3<Scalar> operator+(const Jet3<Scalar>& a, const Jet3<Scalar>& b) {
  return {a.v0 + b.v0, a.v1 + b.v1, a.v2 + b.v2, a.v3 + b.v3};
}

template <typename Scalar>
Jet3<Scalar> operator-(const Jet3<Scalar>& a, const Jet3<Scalar>& b) {
  return {a.v0 - b.v0, a.v1 - b.v1, a.v2 - b.v2, a.v3 - b.v3};
}

template <typename Scalar>
Jet3<Scalar> operator-(const Jet3<Scalar>& a) {
  return {-a.v0, -a.v1, -a.v2, -a.v3};
}

template <typename Scalar>
Jet3<Scalar> operator*(Scalar s, const Jet3<Scalar>& a) {
  return {s * a.v0, s * a.v1, s * a.v2, s * a.v3};
}

template <typename Scalar>
Jet3<Scalar> operator*(const Jet3<Scalar>& a, Scalar s) {
  return s * a;
}

template <typename Scalar>
Jet3<Scalar> operator+(const Jet3<Scalar>& a, Scalar s) {
  return {a.v0 + s, a.v1, a.v2, a.v3};
}

template <typename Scalar>
Jet3<Scalar> operator*(const Jet3<Scalar>& a, const Jet3<Scalar>& b) {
  const Scalar three(3);
  return {a.v0 * b.v0, a.v1 * b.v0 + a.v0 * b.v1, a.v2 * b.v0 + Scalar(2) * a.v1 * b.v1 + a.v0 * b.v2,
          a.v3 * b.v0 + three * a.v2 * b.v1 + three * a.v1 * b.v2 + a.v0 * b.v3};
}

template <typename Scalar>
Jet3<Scalar> sin(const Jet3<Scalar>& u) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(u.v0), c = cos(u.v0);
  return compose(u, s, c, -s, -c);
}

template <typename Scalar>
Jet3<Scalar> cos(const Jet3<Scalar>& u) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(u.v0), c = cos(u.v0);
  return compose(u, c, -s, -c, s);
}

template <typename Scalar>
Jet3<Scalar> tanh(const Jet3<Scalar>& u) {
  using std::tanh;
  const Scalar t = tanh(u.v0);
  const Scalar s = Scalar(1) - t * t;
  return compose(u, t, s, Scalar(-2) * t * s, s * (Scalar(6) * t * t - Scalar(2)));
}

}  // namespace rpteng
