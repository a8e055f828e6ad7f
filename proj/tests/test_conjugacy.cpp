#include "doctest.h"

#include "fixtures.hpp"
#include "unipert/conjugacy.hpp"
#include "unipert/errors.hpp"

#include <cmath>
#include <random>

using namespace unipert;

namespace {

const AlgebraElement kZ = AlgebraElement::basis(frame::Z);

PerturbationData sin13_transfer() {
  return fixtures::transfer_perturbation(unipotent(1.0, 0.0, 0.0), "0.05*sin(m13)");
}

}  // namespace

TEST_CASE("conjugacy map inverts along Z-fibers") {
  const ConjugacyMap F(ScalarField::parse("0.2*sin(m13 + m12) + 0.1*m23"));
  for (const auto& g : fixtures::base_points(10, 3)) {
    CHECK(distance(F.inverse(F(g)), g) <= 1e-12);
    const GroupElement y = F(g);
    CHECK(distance(F(F.inverse(y)), y) <= 1e-12);
  }
  const ConjugacyMap id(ScalarField::constant(0.0));
  const auto g = fixtures::base_points(1, 4)[0];
  CHECK(id(g).matrix() == g.matrix());
}

TEST_CASE("conjugacy residual vanishes for matching pairs") {
  const auto flat = unperturbed(unipotent(1.0, 0.0, 0.0));
  const auto g0 = fixtures::base_points(1, 1)[0];
  CHECK(conjugacy_residual(ScalarField::constant(0.0), flat, 3.0, g0) <= 1e-12);

  const auto p = sin13_transfer();
  const auto w = *p.w;
  for (const auto& g : fixtures::base_points(4, 77)) {
    for (double t : {-5.0, -2.0, 0.5, 5.0}) {
      INFO("t=" << t);
      CHECK(conjugacy_residual(w, p, t, g) <= 1e-6);
    }
  }
  for (const auto& tc : fixtures::transfer_cases()) {
    const auto q = fixtures::transfer_perturbation(tc.u, tc.w);
    INFO(tc.name);
    CHECK(conjugacy_residual(*q.w, q, 4.0, fixtures::base_points(1, 8)[0]) <= 1e-6);
  }
}

TEST_CASE("mismatched pairs leave a residual of the size of the mismatch") {
  const auto p = sin13_transfer();
  const auto g = fixtures::base_points(1, 21)[0];
  std::vector<double> residuals;
  for (double delta : {1e-2, 1e-3}) {
    const ScalarField w2 = *p.w + ScalarField::constant(delta) * ScalarField::parse("cos(m12 + m13)");
    residuals.push_back(conjugacy_residual(w2, p, 3.0, g));
  }
  CHECK(residuals[0] > 1e-4);
  CHECK(residuals[0] / residuals[1] == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("conjugacy map pushes the perturbed field to U") {
  const auto flat = unperturbed(unipotent(1.0, 0.0, 0.0));
  CHECK(pushforward_identity_check(ScalarField::constant(0.0), flat, fixtures::base_points(1, 2)[0]) <=
        1e-10);
  for (const auto& tc : fixtures::transfer_cases()) {
    const auto p = fixtures::transfer_perturbation(tc.u, tc.w);
    for (const auto& g : fixtures::base_points(3, 5)) {
      INFO(tc.name);
      CHECK(pushforward_identity_check(*p.w, p, g) <= 1e-5);
    }
  }
}

TEST_CASE("chain-rule decomposition of the push-forward") {
  const auto p = fixtures::transfer_perturbation(unipotent(1.0, 0.0, 0.0), "0.05*sin(m12 + m13)");
  const std::vector<std::string> fs{"m13", "sin(m12)*m13", "exp(0.3*m23) + m11*m13",
                                    "cos(m13 - m21)", "m12^2 + tanh(m13)"};
  for (const auto& src : fs) {
    const ScalarField f = ScalarField::parse(src);
    for (const auto& g : fixtures::base_points(3, 13)) {
      const auto terms = chain_rule_terms(f, *p.w, p, g);
      INFO(src);
      CHECK(std::abs(terms.lhs - terms.rhs()) <= 1e-6);
      // U~w = -beta cancels the Z part
      CHECK(std::abs(terms.z_term + terms.beta_term) <= 1e-12);
      CHECK(std::abs(terms.lhs - terms.u_term) <= 1e-6);
    }
  }
}

TEST_CASE("bracket expansion is an exact identity") {
  const auto zero = bracket_expansion_check(Vec8::Zero(), 1.0, 2.0, 3.0);
  CHECK(zero.residual.isZero(0.0));

  Vec8 e31 = Vec8::Zero();
  e31[frame::E31] = 1.0;
  const auto single = bracket_expansion_check(e31, 1.0, 0.0, 0.0);
  CHECK(single.residual.isZero(0.0));
  CHECK(single.bracket[frame::E21] == 0.0);
  CHECK(single.bracket[frame::E32] == 1.0);
  CHECK(single.bracket[frame::H1] == 0.0);

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-9, 9);
  for (int trial = 0; trial < 100; ++trial) {
    Vec8 a;
    for (int i = 0; i < kDim; ++i) a[i] = coef(rng);
    const auto r = bracket_expansion_check(a, coef(rng), coef(rng), coef(rng));
    CHECK(r.residual.isZero(0.0));
  }
}

TEST_CASE("kakutani anchor") {
  const auto z = kakutani_invariant(kZ);
  CHECK(z.value == 2.0);
  CHECK(z.verified);
  CHECK(z.blocks == std::vector<int>{3, 2, 2, 1});
  CHECK(KakutaniSpec::shipped().gr(z.blocks) == 5.0);
  CHECK(kakutani_invariant(2.0 * kZ).value == 2.0);
  CHECK(kakutani_invariant(-0.5 * kZ).value == 2.0);

  // E21 has the Jordan type of Z, so a block-only GR cannot separate them
  const auto e21 = kakutani_invariant(AlgebraElement::basis(frame::E21));
  CHECK_FALSE(e21.verified);
  CHECK(e21.value == 2.0);

  const auto e12 = kakutani_invariant(AlgebraElement::basis(frame::E12));
  CHECK_FALSE(e12.verified);
  CHECK(e12.value == 2.0);

  const auto regular = kakutani_invariant(unipotent(1.0, 1.0, 0.0));
  CHECK(regular.blocks == std::vector<int>{5, 3});
  CHECK(regular.value == 10.0 + 3.0 - 3.0);

  CHECK_THROWS_AS(kakutani_invariant(AlgebraElement::basis(frame::H1)), DomainError);
  CHECK_THROWS_AS(kakutani_invariant(AlgebraElement::zero()), DomainError);

  KakutaniSpec custom;
  custom.name = "largest block";
  custom.gr = [](const std::vector<int>& b) { return static_cast<double>(b.front()); };
  custom.offset = 0.0;
  CHECK(kakutani_invariant(kZ, custom).value == 3.0);
}

TEST_CASE("time-change excess stays bounded and telescopes") {
  const auto g = fixtures::base_points(1, 30)[0];
  const auto flat = lambda_transfer_diagnostic(ScalarField::constant(1.0), 10.0, g, 20);
  CHECK(flat.sup_abs_excess <= 1e-10);
  CHECK(flat.strictly_increasing);

  const ScalarField w = ScalarField::parse("0.3*sin(m13) + 0.1*cos(m23)");
  const ScalarField lambda = ScalarField::constant(1.0) + w.along(kZ);
  const auto series = lambda_transfer_diagnostic(lambda, 100.0, g, 200);
  CHECK(series.strictly_increasing);
  CHECK(series.sup_abs_excess > 1e-3);
  CHECK(series.sup_abs_excess <= 2.0 * (0.3 + 0.1) + 1e-9);
  CHECK(telescoping_residual(w, 100.0, g, 200) <= 1e-7);

  CHECK_THROWS_AS(lambda_transfer_diagnostic(ScalarField::parse("m13 - 10"), 1.0, g), DomainError);
}
