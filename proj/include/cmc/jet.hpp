#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace cmc {

/// Second-order forward jet: a value together with its gradient and Hessian
/// with respect to `Dim` independent variables. Arithmetic propagates the
/// product and chain rules exactly, so composing jets yields exact first and
/// second partial derivatives of any expression built from them.
template <int Dim = Eigen::Dynamic>
struct Jet {
  using Gradient = Eigen::Matrix<double, Dim, 1>;
  using Hessian = Eigen::Matrix<double, Dim, Dim>;

  double value = 0.0;
  Gradient grad;
  Hessian hess;

  Jet() : Jet(0.0, Dim == Eigen::Dynamic ? 0 : Dim) {}

  Jet(double v, Eigen::Index dim) : value(v), grad(Gradient::Zero(dim)), hess(Hessian::Zero(dim, dim)) {}

  static Jet constant(double v, Eigen::Index dim = Dim) { return Jet(v, dim); }

  static Jet variable(double v, Eigen::Index index, Eigen::Index dim = Dim) {
    Jet j(v, dim);
    j.grad(index) = 1.0;
    return j;
  }

  Eigen::Index dim() const { return grad.size(); }

  /// Partial derivative with respect to variable i.
  double d(Eigen::Index i) const { return grad(i); }
  double d(Eigen::Index i, Eigen::Index j) const { return hess(i, j); }

  Jet& operator+=(const Jet& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    value -= o.value;
    grad -= o.grad;
    hess -= o.hess;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    hess = value * o.hess + o.value * hess + grad * o.grad.transpose() + o.grad * grad.transpose();
    grad = value * o.grad + o.value * grad;
    value *= o.value;
    return *this;
  }
  Jet& operator+=(double c) {
    value += c;
    return *this;
  }
  Jet& operator-=(double c) {
    value -= c;
    return *this;
  }
  Jet& operator*=(double c) {
    value *= c;
    grad *= c;
    hess *= c;
    return *this;
  }
};

/// Applies a scalar function to a jet given f(x), f'(x), f''(x) at x = inner.value.
template <int Dim>
Jet<Dim> compose(const Jet<Dim>& inner, double f, double df, double d2f) {
  Jet<Dim> out(f, inner.dim());
  out.grad = df * inner.grad;
  out.hess = df * inner.hess + d2f * inner.grad * inner.grad.transpose();
  return out;
}

template <int Dim>
Jet<Dim> operator+(Jet<Dim> a, const Jet<Dim>& b) { return a += b; }
template <int Dim>
Jet<Dim> operator-(Jet<Dim> a, const Jet<Dim>& b) { return a -= b; }
template <int Dim>
Jet<Dim> operator*(Jet<Dim> a, const Jet<Dim>& b) { return a *= b; }
template <int Dim>
Jet<Dim> operator+(Jet<Dim> a, double c) { return a += c; }
template <int Dim>
Jet<Dim> operator+(double c, Jet<Dim> a) { return a += c; }
template <int Dim>
Jet<Dim> operator-(Jet<Dim> a, double c) { return a -= c; }
template <int Dim>
Jet<Dim> operator-(double c, const Jet<Dim>& a) { return -a + c; }
template <int Dim>
Jet<Dim> operator*(Jet<Dim> a, double c) { return a *= c; }
template <int Dim>
Jet<Dim> operator*(double c, Jet<Dim> a) { return a *= c; }
template <int Dim>
Jet<Dim> operator-(Jet<Dim> a) { return a *= -1.0; }

template <int Dim>
Jet<Dim> reciprocal(const Jet<Dim>& a) {
  const double r = 1.0 / a.value;
  return compose(a, r, -r * r, 2.0 * r * r * r);
}

template <int Dim>
Jet<Dim> operator/(const Jet<Dim>& a, const Jet<Dim>& b) { return a * reciprocal(b); }
template <int Dim>
Jet<Dim> operator/(Jet<Dim> a, double c) { return a *= 1.0 / c; }
template <int Dim>
Jet<Dim> operator/(double c, const Jet<Dim>& a) { return c * reciprocal(a); }

template <int Dim>
Jet<Dim> exp(const Jet<Dim>& a) {
  const double e = std::exp(a.value);
  return compose(a, e, e, e);
}

template <int Dim>
Jet<Dim> log(const Jet<Dim>& a) {
  const double r = 1.0 / a.value;
  return compose(a, std::log(a.value), r, -r * r);
}

template <int Dim>
Jet<Dim> sqrt(const Jet<Dim>& a) {
  const double s = std::sqrt(a.value);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.value));
}

template <int Dim>
Jet<Dim> sin(const Jet<Dim>& a) {
  const double s = std::sin(a.value);
  return compose(a, s, std::cos(a.value), -s);
}

template <int Dim>
Jet<Dim> cos(const Jet<Dim>& a) {
  const double c = std::cos(a.value);
  return compose(a, c, -std::sin(a.value), -c);
}

template <int Dim>
Jet<Dim> tan(const Jet<Dim>& a) {
  const double t = std::tan(a.value);
  const double sec2 = 1.0 + t * t;
  return compose(a, t, sec2, 2.0 * t * sec2);
}

/// Integer power; exact for negative exponents too (value must be nonzero then).
template <int Dim>
Jet<Dim> powi(const Jet<Dim>& a, int k) {
  const double x = a.value;
  if (k == 0) return Jet<Dim>(1.0, a.dim());
  const double f = std::pow(x, k);
  const double df = k * std::pow(x, k - 1);
  const double d2f = k == 1 ? 0.0 : static_cast<double>(k) * (k - 1) * std::pow(x, k - 2);
  return compose(a, f, df, d2f);
}

/// Real power with positive base.
template <int Dim>
Jet<Dim> pow(const Jet<Dim>& a, const Jet<Dim>& b) {
  return exp(b * log(a));
}

/// Narrows or widens a jet onto a different variable set: `map(i)` gives the
/// index in the target jet of source variable i (or -1 to drop it).
template <int To, int From, typename IndexMap>
Jet<To> remap(const Jet<From>& src, Eigen::Index target_dim, IndexMap map) {
  Jet<To> out(src.value, target_dim);
  for (Eigen::Index i = 0; i < src.dim(); ++i) {
    const Eigen::Index ti = map(i);
    if (ti < 0) continue;
    out.grad(ti) += src.grad(i);
    for (Eigen::Index j = 0; j < src.dim(); ++j) {
      const Eigen::Index tj = map(j);
      if (tj < 0) continue;
      out.hess(ti, tj) += src.hess(i, j);
    }
  }
  return out;
}

using JetN = Jet<Eigen::Dynamic>;

/// Jet in the two variables (t, x) of a 1+1 chart: d(0) = ∂t, d(1) = ∂x.
using Jet2 = Jet<2>;

}  // namespace cmc
