#pragma once

// Scalar fields on SL(3,R) given by expressions over the matrix entries
// m11..m33 of a point g.
//
// Grammar (whitespace insignificant, newlines allowed):
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := ("+" | "-") unary | power
//   power   := primary [ "^" unary ]
//   primary := number | "pi" | entry | call | "(" expr ")"
//   entry   := "m" digit digit            (row, column in 1..3)
//   call    := name "(" expr { "," expr } ")"
//   name    := sin | cos | exp | tanh | pow | d
//   number  := decimal literal with optional exponent
//
// `pow(a, b)` equals a^b. `d(f, a0, ..., a7)` is the derivative of f along
// the left-invariant field with frame coordinates a0..a7; the coordinates
// must be numeric literals.
//
// Directional derivatives are exact: (V f)(g) = d/dt f(g exp(tV)) at t = 0
// is computed by forward-mode differentiation through g + t g V.

#include "unipert/jet.hpp"
#include "unipert/lie.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace unipert {

enum class NodeKind { kConstant, kEntry, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall, kDerivative };
enum class Function { kSin, kCos, kExp, kTanh };

struct Node {
  NodeKind kind = NodeKind::kConstant;
  double value = 0.0;           // kConstant
  int row = 0, col = 0;         // kEntry (0-based)
  Function function = Function::kSin;  // kCall
  Vec8 direction = Vec8::Zero();       // kDerivative
  std::vector<std::shared_ptr<const Node>> children;
};

using NodePtr = std::shared_ptr<const Node>;

using JetMat3 = std::array<std::array<Jet, 3>, 3>;

/// Immutable, shareable scalar field.
class ScalarField {
 public:
  /// The zero field.
  ScalarField();
  explicit ScalarField(NodePtr root) : root_(std::move(root)) {}

  static ScalarField parse(std::string_view source);
  static ScalarField constant(double value);
  /// Matrix entry m_{row+1, col+1} (0-based arguments).
  static ScalarField entry(int row, int col);

  /// Value at g.
  double operator()(const GroupElement& g) const;
  double operator()(const Mat3& g) const;

  /// (V f)(g).
  double derivative(const AlgebraElement& v, const GroupElement& g) const;
  /// (V1 (V2 f))(g).
  double derivative(const AlgebraElement& v1, const AlgebraElement& v2,
                    const GroupElement& g) const;
  /// (V f)(g) with V given by its 3x3 matrix.
  double derivative(const Mat3& v, const Mat3& g) const;
  /// Frame gradient: component i is (B_i f)(g).
  Vec8 gradient(const Mat3& g) const;
  /// The field V f.
  ScalarField along(const AlgebraElement& v) const;

  /// Evaluation at a jet-valued point whose entries use infinitesimals
  /// 0..depth-1.
  Jet evaluate(const JetMat3& point, int depth) const;

  bool is_constant() const { return root_->kind == NodeKind::kConstant; }
  bool is_zero() const { return is_constant() && root_->value == 0.0; }
  double constant_value() const { return root_->value; }

  const NodePtr& root() const { return root_; }
  std::string to_string() const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a);

 private:
  NodePtr root_;
};

ScalarField sin(const ScalarField& f);
ScalarField cos(const ScalarField& f);
ScalarField exp(const ScalarField& f);
ScalarField tanh(const ScalarField& f);
ScalarField pow(const ScalarField& base, const ScalarField& exponent);

/// Structural equality of expression trees.
bool same_tree(const ScalarField& a, const ScalarField& b);

/// (V f)(g), and (V1 V2 f)(g).
double directional_derivative(const ScalarField& f, const AlgebraElement& v,
                              const GroupElement& g);
double directional_derivative(const ScalarField& f, const AlgebraElement& v1,
                              const AlgebraElement& v2, const GroupElement& g);

}  // namespace unipert
