#include "doctest.h"

#include "unipert/errors.hpp"
#include "unipert/lie.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <random>

using namespace unipert;

namespace {

// Frame elements scaled by 2 as integer combinations of elementary matrices
// E_ab: each entry is (a, b, coefficient).
struct Term {
  int a, b, coef;
};

std::vector<Term> doubled_frame(int i) {
  switch (i) {
    case 0: return {{2, 0, 2}};
    case 1: return {{1, 0, 2}};
    case 2: return {{2, 1, 2}};
    case 3: return {{0, 0, 1}, {1, 1, -1}};
    case 4: return {{1, 1, 1}, {2, 2, -1}};
    case 5: return {{0, 1, 2}};
    case 6: return {{1, 2, 2}};
    default: return {{0, 2, 2}};
  }
}

using IntMat = std::array<std::array<long long, 3>, 3>;

// [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb
IntMat delta_bracket(const std::vector<Term>& x, const std::vector<Term>& y) {
  IntMat out{};
  for (const auto& s : x) {
    for (const auto& t : y) {
      const long long k = static_cast<long long>(s.coef) * t.coef;
      if (s.b == t.a) out[s.a][t.b] += k;
      if (t.b == s.a) out[t.a][s.b] -= k;
    }
  }
  return out;
}

std::mt19937_64& rng() {
  static std::mt19937_64 r(7);
  return r;
}

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

AlgebraElement random_element() {
  Vec8 a;
  for (int i = 0; i < kDim; ++i) a[i] = uniform(-1.0, 1.0);
  return AlgebraElement::from_coords(a);
}

}  // namespace

TEST_CASE("structure constants agree with the elementary-matrix delta rule") {
  const auto& table = structure_table();
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      const IntMat m = delta_bracket(doubled_frame(i), doubled_frame(j));
      CHECK(m[0][0] + m[1][1] + m[2][2] == 0);
      // coordinates of the integer matrix, then undo the factor 4
      const std::array<long long, 8> coords = {m[2][0], m[1][0], m[2][1], 2 * m[0][0],
                                               -2 * m[2][2], m[0][1], m[1][2], m[0][2]};
      for (int k = 0; k < kDim; ++k) {
        INFO("pair (", frame::kNames[i], ", ", frame::kNames[j], ") component ", k);
        CHECK(table.constants[i][j][k] * 4.0 == static_cast<double>(coords[k]));
      }
    }
  }
}

TEST_CASE("only nontrivial bracket in n is [E12, E23] = E13") {
  const auto& table = structure_table();
  for (int i = frame::E12; i < kDim; ++i) {
    for (int j = frame::E12; j < kDim; ++j) {
      Vec8 expected = Vec8::Zero();
      if (i == frame::E12 && j == frame::E23) expected[frame::E13] = 1.0;
      if (i == frame::E23 && j == frame::E12) expected[frame::E13] = -1.0;
      CHECK(table.constants[i][j] == expected);
    }
  }
}

TEST_CASE("bracket is antisymmetric and satisfies the Jacobi identity") {
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_element();
    const auto y = random_element();
    const auto z = random_element();
    const Vec8 jac = (bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) +
                      bracket(z, bracket(x, y)))
                         .coords();
    CHECK(jac.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((bracket(x, y) + bracket(y, x)).coords().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("coordinates and matrices round-trip") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_element();
    CHECK((AlgebraElement::project(x.matrix()) - x.coords()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(x.matrix().trace()) <= 1e-15);
  }
  Mat3 bad = Mat3::Identity();
  CHECK_THROWS_AS(AlgebraElement::from_matrix(bad), DomainError);
  CHECK(AlgebraElement::basis(frame::H1).matrix()(0, 0) == 0.5);
  CHECK(AlgebraElement::basis(frame::H1).matrix()(1, 1) == -0.5);
  CHECK_THROWS_AS(AlgebraElement::basis(8), DomainError);
}

TEST_CASE("frame names and rendering") {
  CHECK(frame::index_of("E31") == 0);
  CHECK(frame::index_of("Z") == frame::E13);
  CHECK(frame::index_of("H2") == 4);
  CHECK(frame::index_of("E99") == -1);
  Vec8 a = Vec8::Zero();
  a[frame::H1] = 2.0;
  a[frame::E32] = -1.0;
  CHECK(AlgebraElement::from_coords(a).to_string() == "-E32 + 2*H1");
  CHECK(AlgebraElement::zero().to_string() == "0");
}

TEST_CASE("ad matrix columns are brackets") {
  const auto x = random_element();
  const Mat8 ad = ad_matrix(x);
  for (int j = 0; j < kDim; ++j) {
    CHECK((ad.col(j) - bracket(x, AlgebraElement::basis(j)).coords()).cwiseAbs().maxCoeff() <=
          1e-15);
  }
}

TEST_CASE("exponential of a nilpotent element is a terminating series") {
  const auto z = AlgebraElement::basis(frame::Z);
  for (double t : {-3.0, 0.0, 0.25, 7.0}) {
    Mat3 expected = Mat3::Identity();
    expected(0, 2) = t;
    CHECK(exp_map(z, t).matrix() == expected);
  }
  const auto u = unipotent(1.0, 1.0, 0.0);
  Mat3 expected = Mat3::Identity();
  expected(0, 1) = 2.0;
  expected(1, 2) = 2.0;
  expected(0, 2) = 2.0;
  CHECK((exp_map(u, 2.0).matrix() - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("exponential is a one-parameter group with unit determinant") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_element();
    const double s = uniform(-1.0, 1.0);
    const double t = uniform(-1.0, 1.0);
    const Mat3 lhs = exp_map(x, s).matrix() * exp_map(x, t).matrix();
    const Mat3 rhs = exp_map(x, s + t).matrix();
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    CHECK(exp_map(x, t).det_drift() <= 1e-12);
  }
}

TEST_CASE("adjoint matrix of Z reproduces the constant-flow differential display") {
  for (double at : {0.5, 1.0, 2.0}) {
    Mat8 expected = Mat8::Identity();
    expected(3, 0) = 2 * at;
    expected(4, 0) = 2 * at;
    expected(5, 2) = at;
    expected(6, 1) = -at;
    expected(7, 0) = -at * at;
    expected(7, 3) = -at / 2;
    expected(7, 4) = -at / 2;
    const Mat8 m = adjoint_matrix(AlgebraElement::basis(frame::Z), at);
    CHECK((m - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("adjoint matrix equals the exponential of ad") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_element();
    const double t = uniform(-1.0, 1.0);
    const Mat8 oracle = (t * ad_matrix(v)).exp();
    CHECK((adjoint_matrix(v, t) - oracle).cwiseAbs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("adjoint matrix derivative at zero is ad") {
  const auto v = random_element();
  const double h = 1e-5;
  const Mat8 fd = (adjoint_matrix(v, h) - adjoint_matrix(v, -h)) / (2 * h);
  CHECK((fd - ad_matrix(v)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("Heisenberg partner and its sign convention") {
  SUBCASE("c12 nonzero picks E23") {
    const auto h = heisenberg_partner(unipotent(2.0, 0.0, 0.3));
    CHECK(h.w == AlgebraElement::basis(frame::E23));
    CHECK(h.c == -2.0);
    CHECK(bracket(h.u, h.w) == -h.c * h.z);
  }
  SUBCASE("c12 zero picks E12") {
    const auto h = heisenberg_partner(unipotent(0.0, 1.5, 0.0));
    CHECK(h.w == AlgebraElement::basis(frame::E12));
    CHECK(h.c == 1.5);
    CHECK(bracket(h.u, h.w) == -h.c * h.z);
  }
  SUBCASE("W and U commute with Z") {
    const auto h = heisenberg_partner(unipotent(1.0, 1.0, 0.0));
    CHECK(bracket(h.u, h.z).is_zero());
    CHECK(bracket(h.w, h.z).is_zero());
  }
  CHECK_THROWS_AS(heisenberg_partner(unipotent(0.0, 0.0, 1.0)), DomainError);
  CHECK_THROWS_AS(heisenberg_partner(AlgebraElement::basis(frame::E21)), DomainError);
}

TEST_CASE("Jordan blocks from ranks of powers") {
  using V = std::vector<int>;
  CHECK(jordan_blocks(ad_matrix(AlgebraElement::basis(frame::Z))) == V{3, 2, 2, 1});
  CHECK(jordan_blocks(ad_matrix(3.0 * AlgebraElement::basis(frame::Z))) == V{3, 2, 2, 1});
  CHECK(jordan_blocks(ad_matrix(unipotent(1.0, 1.0, 0.0))) == V{5, 3});
  CHECK(jordan_blocks(ad_matrix(AlgebraElement::basis(frame::E12))) == V{3, 2, 2, 1});
  CHECK(jordan_blocks(Mat8::Zero()) == V(8, 1));
  CHECK_THROWS_AS(jordan_blocks(ad_matrix(AlgebraElement::basis(frame::H1))), NumericalError);
}

TEST_CASE("decomposition into lower, diagonal and upper parts") {
  const auto x = random_element();
  const auto d = decompose(x);
  CHECK((d.n_tr + d.a + d.n) == x);
  CHECK(d.n_tr.matrix().triangularView<Eigen::Upper>().toDenseMatrix().isZero(0.0));
  CHECK(d.n.matrix().triangularView<Eigen::Lower>().toDenseMatrix().isZero(0.0));
}

TEST_CASE("group elements") {
  CHECK_THROWS_AS(GroupElement::checked(2.0 * Mat3::Identity()), DomainError);
  const auto g = exp_map(random_element(), 0.7);
  CHECK(distance(g * g.inverse(), GroupElement::identity()) <= 1e-13);
  const auto v = random_element();
  CHECK((frame_coords_at(g, g.matrix() * v.matrix()) - v.coords()).cwiseAbs().maxCoeff() <=
        1e-13);
}
