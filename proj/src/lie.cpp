#include "unipert/lie.hpp"

#include "unipert/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace unipert {

namespace frame {

int index_of(std::string_view name) {
  if (name == "Z") return Z;
  for (int i = 0; i < kDim; ++i) {
    if (kNames[i] == name) return i;
  }
  return -1;
}

}  // namespace frame

namespace {

Mat3 coords_to_matrix(const Vec8& a) {
  Mat3 m = Mat3::Zero();
  m(2, 0) = a[frame::E31];
  m(1, 0) = a[frame::E21];
  m(2, 1) = a[frame::E32];
  m(0, 0) = 0.5 * a[frame::H1];
  m(1, 1) = -0.5 * a[frame::H1] + 0.5 * a[frame::H2];
  m(2, 2) = -0.5 * a[frame::H2];
  m(0, 1) = a[frame::E12];
  m(1, 2) = a[frame::E23];
  m(0, 2) = a[frame::E13];
  return m;
}

StructureTable build_structure_table() {
  StructureTable table;
  for (int i = 0; i < kDim; ++i) {
    const Mat3 bi = AlgebraElement::basis(i).matrix();
    for (int j = 0; j < kDim; ++j) {
      const Mat3 bj = AlgebraElement::basis(j).matrix();
      table.constants[i][j] = AlgebraElement::project(bi * bj - bj * bi);
    }
  }
  return table;
}

int numerical_rank(const Mat8& m, double tol) {
  Eigen::JacobiSVD<Mat8> svd(m);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > tol) ++rank;
  }
  return rank;
}

}  // namespace

AlgebraElement::AlgebraElement() : coords_(Vec8::Zero()), matrix_(Mat3::Zero()) {}

AlgebraElement AlgebraElement::from_coords(const Vec8& coords) {
  AlgebraElement x;
  x.coords_ = coords;
  x.matrix_ = coords_to_matrix(coords);
  return x;
}

Vec8 AlgebraElement::project(const Mat3& m) {
  Vec8 a;
  a[frame::E31] = m(2, 0);
  a[frame::E21] = m(1, 0);
  a[frame::E32] = m(2, 1);
  a[frame::H1] = 2.0 * m(0, 0);
  a[frame::H2] = -2.0 * m(2, 2);
  a[frame::E12] = m(0, 1);
  a[frame::E23] = m(1, 2);
  a[frame::E13] = m(0, 2);
  return a;
}

AlgebraElement AlgebraElement::from_matrix(const Mat3& m, double trace_tol) {
  if (std::abs(m.trace()) > trace_tol) {
    throw DomainError("matrix is not traceless (trace " + std::to_string(m.trace()) + ")");
  }
  AlgebraElement x;
  x.coords_ = project(m);
  x.matrix_ = coords_to_matrix(x.coords_);
  return x;
}

AlgebraElement AlgebraElement::basis(int index) {
  if (index < 0 || index >= kDim) throw DomainError("frame index out of range");
  Vec8 a = Vec8::Zero();
  a[index] = 1.0;
  return from_coords(a);
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  return from_coords(coords_ + o.coords_);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  return from_coords(coords_ - o.coords_);
}

AlgebraElement AlgebraElement::operator-() const { return from_coords(-coords_); }

AlgebraElement operator*(double s, const AlgebraElement& x) {
  return AlgebraElement::from_coords(s * x.coords_);
}

std::string AlgebraElement::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (int i = 0; i < kDim; ++i) {
    const double a = coords_[i];
    if (a == 0.0) continue;
    if (!first) out << (a < 0 ? " - " : " + ");
    else if (a < 0) out << "-";
    const double mag = std::abs(a);
    if (mag != 1.0) out << mag << "*";
    out << frame::kNames[i];
    first = false;
  }
  return first ? "0" : out.str();
}

GroupElement GroupElement::checked(const Mat3& m, double drift_tol) {
  GroupElement g(m);
  if (g.det_drift() > drift_tol) {
    throw DomainError("matrix is not in SL(3,R): |det - 1| = " + std::to_string(g.det_drift()));
  }
  return g;
}

double distance(const GroupElement& a, const GroupElement& b) {
  return (a.matrix() - b.matrix()).norm();
}

Vec8 frame_coords_at(const GroupElement& g, const Mat3& v) {
  return AlgebraElement::project(g.matrix().inverse() * v);
}

const StructureTable& structure_table() {
  static const StructureTable table = build_structure_table();
  return table;
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  const Mat3& a = x.matrix();
  const Mat3& b = y.matrix();
  return AlgebraElement::from_coords(AlgebraElement::project(a * b - b * a));
}

Mat3 exp_matrix(const Mat3& a) {
  const Mat3 a2 = a * a;
  const Mat3 a3 = a2 * a;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (a3.cwiseAbs().maxCoeff() <= 1e-15 * scale * scale * scale) {
    return Mat3::Identity() + a + 0.5 * a2;
  }
  return a.exp();
}

GroupElement exp_map(const AlgebraElement& x, double t) {
  return GroupElement(exp_matrix(t * x.matrix()));
}

Mat8 ad_matrix(const AlgebraElement& x) {
  Mat8 m;
  const auto& table = structure_table();
  m.setZero();
  for (int i = 0; i < kDim; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < kDim; ++j) m.col(j) += x[i] * table.constants[i][j];
  }
  return m;
}

Mat8 adjoint_matrix(const AlgebraElement& v, double t) {
  const Mat3 g = exp_matrix(t * v.matrix());
  const Mat3 g_inv = exp_matrix(-t * v.matrix());
  Mat8 m;
  for (int j = 0; j < kDim; ++j) {
    m.col(j) = AlgebraElement::project(g * AlgebraElement::basis(j).matrix() * g_inv);
  }
  return m;
}

AlgebraElement unipotent(double c12, double c23, double c13) {
  Vec8 a = Vec8::Zero();
  a[frame::E12] = c12;
  a[frame::E23] = c23;
  a[frame::E13] = c13;
  return AlgebraElement::from_coords(a);
}

HeisenbergTriple heisenberg_partner(const AlgebraElement& u) {
  for (int i = 0; i < frame::E12; ++i) {
    if (u[i] != 0.0) throw DomainError("U must lie in the nilpotent subalgebra n");
  }
  const double c12 = u[frame::E12];
  const double c23 = u[frame::E23];
  if (c12 == 0.0 && c23 == 0.0) {
    throw DomainError(
        "U is parallel to Z (c12 = c23 = 0): U + beta Z would be a time-change of the "
        "central flow, which is excluded");
  }
  HeisenbergTriple h;
  h.u = u;
  h.z = AlgebraElement::basis(frame::Z);
  h.w = AlgebraElement::basis(c12 != 0.0 ? frame::E23 : frame::E12);
  // [U, W] = -c Z
  h.c = -bracket(u, h.w)[frame::Z];
  return h;
}

std::vector<int> jordan_blocks(const Mat8& m, double rank_tol) {
  std::array<Mat8, kDim + 1> powers;
  powers[0] = Mat8::Identity();
  for (int k = 1; k <= kDim; ++k) powers[k] = powers[k - 1] * m;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (powers[kDim].cwiseAbs().maxCoeff() > rank_tol * std::pow(scale, kDim)) {
    throw NumericalError("jordan_blocks: matrix is not nilpotent");
  }
  std::array<int, kDim + 2> rank{};
  for (int k = 0; k <= kDim; ++k) rank[k] = numerical_rank(powers[k], rank_tol);
  rank[kDim + 1] = 0;
  // blocks of size >= k: rank[k-1] - rank[k]; exactly k: difference of that.
  std::vector<int> blocks;
  for (int k = kDim; k >= 1; --k) {
    const int at_least_k = rank[k - 1] - rank[k];
    const int at_least_k1 = rank[k] - rank[k + 1];
    for (int n = 0; n < at_least_k - at_least_k1; ++n) blocks.push_back(k);
  }
  return blocks;
}

Decomposition decompose(const AlgebraElement& x) {
  Vec8 lo = Vec8::Zero();
  Vec8 mid = Vec8::Zero();
  Vec8 hi = Vec8::Zero();
  lo.head<3>() = x.coords().head<3>();
  mid.segment<2>(3) = x.coords().segment<2>(3);
  hi.tail<3>() = x.coords().tail<3>();
  return {AlgebraElement::from_coords(lo), AlgebraElement::from_coords(mid),
          AlgebraElement::from_coords(hi)};
}

}  // namespace unipert
