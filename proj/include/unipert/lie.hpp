#pragma once

// Exact linear algebra on sl(3,R) in the fixed frame
//
//   index  0    1    2    3                4                5    6    7
//   frame  E31  E21  E32  (E11 - E22)/2    (E22 - E33)/2    E12  E23  E13
//
// All 8-vectors and 8x8 matrices in the library use this order. Matrices
// acting on 8-vectors are column oriented: column j is the image of frame
// element j.

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace unipert {

using Mat3 = Eigen::Matrix3d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

inline constexpr int kDim = 8;

namespace frame {
inline constexpr int E31 = 0;
inline constexpr int E21 = 1;
inline constexpr int E32 = 2;
inline constexpr int H1 = 3;
inline constexpr int H2 = 4;
inline constexpr int E12 = 5;
inline constexpr int E23 = 6;
inline constexpr int E13 = 7;
inline constexpr int Z = E13;

inline constexpr std::array<std::string_view, kDim> kNames = {
    "E31", "E21", "E32", "H1", "H2", "E12", "E23", "E13"};

/// Index of a frame element by name ("E12", "H1", "Z", ...); -1 if unknown.
int index_of(std::string_view name);
}  // namespace frame

/// Element of sl(3,R), held both as frame coordinates and as a traceless
/// 3x3 matrix.
class AlgebraElement {
 public:
  AlgebraElement();

  static AlgebraElement from_coords(const Vec8& coords);
  /// Throws DomainError when |trace| exceeds `trace_tol`.
  static AlgebraElement from_matrix(const Mat3& m, double trace_tol = 1e-12);
  /// Frame coordinates of the traceless part's off-diagonal and the
  /// (1,1)/(3,3) entries; the (2,2) entry is implied. No trace check.
  static Vec8 project(const Mat3& m);
  static AlgebraElement basis(int index);
  static AlgebraElement zero() { return AlgebraElement(); }

  const Vec8& coords() const { return coords_; }
  const Mat3& matrix() const { return matrix_; }
  double operator[](int i) const { return coords_[i]; }

  bool is_zero() const { return coords_.isZero(0.0); }

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator-() const;
  friend AlgebraElement operator*(double s, const AlgebraElement& x);
  bool operator==(const AlgebraElement& o) const { return coords_ == o.coords_; }

  /// Sparse rendering with frame names, e.g. "2*H1 - E32".
  std::string to_string() const;

 private:
  Vec8 coords_;
  Mat3 matrix_;
};

/// A point of SL(3,R).
class GroupElement {
 public:
  GroupElement() : m_(Mat3::Identity()) {}
  explicit GroupElement(const Mat3& m) : m_(m) {}

  static GroupElement identity() { return GroupElement(); }
  /// Throws DomainError when |det - 1| exceeds `drift_tol`.
  static GroupElement checked(const Mat3& m, double drift_tol = 1e-9);

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double det_drift() const { return std::abs(m_.determinant() - 1.0); }

  GroupElement operator*(const GroupElement& o) const { return GroupElement(m_ * o.m_); }
  GroupElement inverse() const { return GroupElement(m_.inverse()); }

 private:
  Mat3 m_;
};

/// Frobenius distance between group elements.
double distance(const GroupElement& a, const GroupElement& b);

/// Frame coordinates of the tangent vector `v` at `g`, i.e. g^{-1} v.
Vec8 frame_coords_at(const GroupElement& g, const Mat3& v);

/// Structure constants: constants[i][j] holds the frame coordinates of
/// [B_i, B_j].
struct StructureTable {
  std::array<std::array<Vec8, kDim>, kDim> constants;
};

const StructureTable& structure_table();

/// XY - YX.
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

/// exp(tX). Terminating series when (tX)^3 = 0, Pade scaling-and-squaring
/// otherwise.
GroupElement exp_map(const AlgebraElement& x, double t);
Mat3 exp_matrix(const Mat3& a);

/// Matrix of Y -> [X, Y].
Mat8 ad_matrix(const AlgebraElement& x);

/// Matrix of Y -> exp(tV) Y exp(-tV). This is the frame representation of
/// the differential of the constant flow generated by V at time -t.
Mat8 adjoint_matrix(const AlgebraElement& v, double t);

/// Heisenberg partner of a unipotent U = c12 E12 + c23 E23 + c13 E13.
///
/// Sign convention: c is defined by [U, W] = -c Z. With c12 != 0 the
/// partner is W = E23 and c = -c12; otherwise W = E12 and c = c23.
struct HeisenbergTriple {
  AlgebraElement u;
  AlgebraElement w;
  AlgebraElement z;
  double c = 0.0;
};

HeisenbergTriple heisenberg_partner(const AlgebraElement& u);

/// U = c12 E12 + c23 E23 + c13 E13.
AlgebraElement unipotent(double c12, double c23, double c13);

/// Jordan block sizes (descending) of a nilpotent matrix from the ranks of
/// its powers. Throws NumericalError when M^8 is not numerically zero.
std::vector<int> jordan_blocks(const Mat8& m, double rank_tol = 1e-9);

/// sl(3) = n^tr + a + n.
struct Decomposition {
  AlgebraElement n_tr;
  AlgebraElement a;
  AlgebraElement n;
};

Decomposition decompose(const AlgebraElement& x);

}  // namespace unipert
