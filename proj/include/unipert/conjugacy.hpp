#pragma once

// Conjugacy between U + beta Z and U for beta = -U w / (1 + Z w), the
// bracket expansion of [V, U] in the frame, a pluggable Kakutani anchor,
// and the running time-change integral Lambda_t - t.

#include "unipert/flow.hpp"
#include "unipert/perturbation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace unipert {

/// g -> g exp(w(g) Z).
class ConjugacyMap {
 public:
  ConjugacyMap(ScalarField w, AlgebraElement z = AlgebraElement::basis(frame::Z));

  GroupElement operator()(const GroupElement& g) const;
  /// Scalar Newton along the Z-fiber; needs 1 + Z w > 0 near the answer.
  GroupElement inverse(const GroupElement& y, double tol = 1e-14, int max_iter = 50) const;

  const ScalarField& w() const { return w_; }
  const AlgebraElement& z() const { return z_; }

 private:
  ScalarField w_;
  AlgebraElement z_;
};

/// dist(F(h_t g), F(g) exp(t U)) where h_t is the flow of U + beta Z from p
/// and F is built from `w` (which need not be the transfer function of p).
double conjugacy_residual(const ScalarField& w, const PerturbationData& p, double t,
                          const GroupElement& g, const IntegratorConfig& config = {});

/// Frame norm of (central difference of F along U + beta(g) Z at g) - U.
double pushforward_identity_check(const ScalarField& w, const PerturbationData& p,
                                  const GroupElement& g, double fd_step = 1e-4);

/// Both sides of
///   U~(f o F) = (Zf o F) U~w + Uf o F + beta (Zf o F)
/// for one test function f; the left side by central differences.
struct ChainRuleTerms {
  double lhs = 0.0;
  double z_term = 0.0;     // (Zf o F) U~w
  double u_term = 0.0;     // Uf o F
  double beta_term = 0.0;  // beta (Zf o F)
  double rhs() const { return z_term + u_term + beta_term; }
};

ChainRuleTerms chain_rule_terms(const ScalarField& f, const ScalarField& w,
                                const PerturbationData& p, const GroupElement& g,
                                double fd_step = 1e-4);

/// [sum a_E E, U] for constant a and U = c12 E12 + c23 E23 + c13 E13, read
/// in the frame but with the diagonal part on E11 - E22 and E22 - E33. Entry
/// i of `bracket` comes from lie brackets, entry i of `display` from the
/// closed coefficient expressions; `residual` is their difference.
struct BracketExpansion {
  Vec8 bracket = Vec8::Zero();
  Vec8 display = Vec8::Zero();
  Vec8 residual = Vec8::Zero();
};

/// `a` holds frame coordinates (H1 and H2 included as frame elements).
BracketExpansion bracket_expansion_check(const Vec8& a, double c12, double c23, double c13);

/// GR maps Jordan block sizes of ad V to a number; the invariant is
/// GR + offset.
struct KakutaniSpec {
  std::string name = "sum d(d-1)/2";
  std::function<double(const std::vector<int>&)> gr;
  double offset = -3.0;

  static KakutaniSpec shipped();
};

struct KakutaniResult {
  double value = 0.0;
  std::vector<int> blocks;
  /// True only when V is a nonzero multiple of Z, the single anchored case.
  bool verified = false;
  std::string flag;
};

/// Throws DomainError when ad V is not nilpotent or V = 0.
KakutaniResult kakutani_invariant(const AlgebraElement& v,
                                  const KakutaniSpec& spec = KakutaniSpec::shipped());

/// Lambda_t(g) - t for the flow of (1/lambda) Z, with
/// Lambda_t = int_0^t (1/lambda) along that flow.
struct LambdaTransferSeries {
  std::vector<double> times;
  std::vector<double> big_lambda;
  std::vector<double> excess;  // Lambda_t - t
  double sup_abs_excess = 0.0;
  bool strictly_increasing = true;
};

/// `samples` equal intervals of [0, T]. Throws DomainError if lambda <= 0 at
/// any visited grid point.
LambdaTransferSeries lambda_transfer_diagnostic(const ScalarField& lambda, double T,
                                                const GroupElement& g, int samples = 100,
                                                const IntegratorConfig& config = {},
                                                const AlgebraElement& z = AlgebraElement::basis(frame::Z));

/// For lambda = 1 + Z w the excess telescopes: Lambda_t - t = (-w)(phi_t g) - (-w)(g).
/// Returns the max deviation from that over the grid.
double telescoping_residual(const ScalarField& w, double T, const GroupElement& g,
                            int samples = 100, const IntegratorConfig& config = {});

}  // namespace unipert
