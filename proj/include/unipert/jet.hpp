#pragma once

// Multilinear jets: truncated polynomials in independent infinitesimals
// e_0, ..., e_{k-1} with e_i^2 = 0. Coefficient `c[mask]` multiplies the
// product of the e_i whose bits are set in `mask`. Evaluating a smooth
// function on a jet performs nested forward-mode differentiation; each
// nesting level allocates the next infinitesimal.

#include <array>
#include <cmath>
#include <cstdint>

namespace unipert {

class Jet {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kCapacity = 1 << kMaxOrder;

  Jet() = default;
  Jet(double value) { c_[0] = value; }  // NOLINT(google-explicit-constructor)

  int order() const { return order_; }
  int size() const { return 1 << order_; }
  double value() const { return c_[0]; }
  double operator[](int mask) const { return c_[mask]; }
  double& operator[](int mask) { return c_[mask]; }

  /// base + e_bit * tangent, where neither operand involves e_bit or higher.
  static Jet extend(const Jet& base, const Jet& tangent, int bit);

  /// Coefficient of e_bit (bit is the highest active infinitesimal), as a
  /// jet in the remaining infinitesimals.
  Jet derivative_part(int bit) const;

  /// The same jet viewed with `order` infinitesimals.
  Jet promoted(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b);

  /// f(x0 + N) = sum_j f^(j)(x0) N^j / j!, given derivs[j] = f^(j)(x0) for
  /// j = 0..order().
  Jet apply(const std::array<double, kMaxOrder + 1>& derivs) const;

 private:
  std::uint8_t order_ = 0;
  std::array<double, kCapacity> c_{};
};

Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet tanh(const Jet& x);
Jet reciprocal(const Jet& x);
/// x^p for a constant exponent.
Jet pow(const Jet& x, double p);
/// x^y for a jet exponent; requires x > 0 unless y is constant.
Jet pow(const Jet& x, const Jet& y);

}  // namespace unipert
