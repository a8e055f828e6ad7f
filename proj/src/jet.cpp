#include "unipert/jet.hpp"

#include "unipert/errors.hpp"

#include <algorithm>

namespace unipert {

namespace {

using Derivs = std::array<double, Jet::kMaxOrder + 1>;

void check_order(int order) {
  if (order > Jet::kMaxOrder) {
    throw NumericalError("derivative nesting exceeds the supported depth of " +
                         std::to_string(Jet::kMaxOrder));
  }
}

}  // namespace

Jet Jet::extend(const Jet& base, const Jet& tangent, int bit) {
  check_order(bit + 1);
  Jet r;
  r.order_ = static_cast<std::uint8_t>(bit + 1);
  const int half = 1 << bit;
  for (int m = 0; m < base.size(); ++m) r.c_[m] = base.c_[m];
  for (int m = 0; m < tangent.size(); ++m) r.c_[half + m] = tangent.c_[m];
  return r;
}

Jet Jet::derivative_part(int bit) const {
  Jet r;
  if (order_ <= bit) return r;
  r.order_ = static_cast<std::uint8_t>(bit);
  const int half = 1 << bit;
  for (int m = 0; m < half; ++m) r.c_[m] = c_[half + m];
  return r;
}

Jet Jet::promoted(int order) const {
  Jet r = *this;
  r.order_ = static_cast<std::uint8_t>(std::max<int>(order_, order));
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  order_ = std::max(order_, o.order_);
  for (int m = 0; m < o.size(); ++m) c_[m] += o.c_[m];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  order_ = std::max(order_, o.order_);
  for (int m = 0; m < o.size(); ++m) c_[m] -= o.c_[m];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (int m = 0; m < size(); ++m) c_[m] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.order_ == 0) return b * a.c_[0];
  if (b.order_ == 0) return a * b.c_[0];
  Jet r;
  r.order_ = std::max(a.order_, b.order_);
  const int n = r.size();
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    // all submasks s of m, including 0 and m itself
    for (int s = m;; s = (s - 1) & m) {
      acc += a.c_[s] * b.c_[m ^ s];
      if (s == 0) break;
    }
    r.c_[m] = acc;
  }
  return r;
}

Jet Jet::apply(const Derivs& derivs) const {
  Jet r(derivs[0]);
  if (order_ == 0) return r;
  Jet nil = *this;
  nil.c_[0] = 0.0;
  Jet power = nil;
  double factorial = 1.0;
  for (int j = 1; j <= order_; ++j) {
    factorial *= j;
    r += power * (derivs[j] / factorial);
    if (j < order_) power = power * nil;
  }
  return r.promoted(order_);
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.order_ == 0) return a * (1.0 / b.c_[0]);
  return a * reciprocal(b);
}

Jet sin(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  return x.apply({s, c, -s, -c, s});
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  return x.apply({c, -s, -c, s, c});
}

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  return x.apply({e, e, e, e, e});
}

Jet log(const Jet& x) {
  const double v = x.value();
  if (!(v > 0.0)) throw NumericalError("log of a non-positive value");
  const double r = 1.0 / v;
  return x.apply({std::log(v), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
}

Jet tanh(const Jet& x) {
  // d/dx P(T) = P'(T) (1 - T^2) with T = tanh(x)
  const double t = std::tanh(x.value());
  const double t2 = t * t;
  const double d1 = 1.0 - t2;
  const double d2 = -2.0 * t * d1;
  const double d3 = (6.0 * t2 - 2.0) * d1;
  const double d4 = (16.0 * t - 24.0 * t2 * t) * d1;
  return x.apply({t, d1, d2, d3, d4});
}

Jet reciprocal(const Jet& x) {
  const double v = x.value();
  if (v == 0.0) throw NumericalError("division by zero in field evaluation");
  const double r = 1.0 / v;
  return x.apply({r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r, 24.0 * r * r * r * r * r});
}

Jet pow(const Jet& x, double p) {
  const double v = x.value();
  Derivs d{};
  double coeff = 1.0;
  for (int j = 0; j <= Jet::kMaxOrder; ++j) {
    d[j] = coeff * std::pow(v, p - j);
    coeff *= (p - j);
  }
  // exact zeros for non-negative integer exponents avoid 0^negative
  if (p >= 0.0 && p == std::floor(p)) {
    for (int j = 0; j <= Jet::kMaxOrder; ++j) {
      if (j > p) d[j] = 0.0;
    }
  }
  return x.apply(d);
}

Jet pow(const Jet& x, const Jet& y) {
  if (y.order() == 0) {
    const double p = y.value();
    if (p == std::floor(p) && std::abs(p) <= 16.0) {
      // integer powers by repeated multiplication support negative bases
      Jet r(1.0);
      Jet base = p < 0 ? reciprocal(x) : x;
      for (int i = 0; i < static_cast<int>(std::abs(p)); ++i) r = r * base;
      return r;
    }
    return pow(x, p);
  }
  return exp(y * log(x));
}

}  // namespace unipert
