#include "unipert/field.hpp"

#include "unipert/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace unipert {

namespace {

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kConstant;
  n->value = v;
  return n;
}

NodePtr make_entry(int row, int col) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kEntry;
  n->row = row;
  n->col = col;
  return n;
}

NodePtr make_unary(NodeKind kind, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = {std::move(child)};
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = {std::move(a), std::move(b)};
  return n;
}

NodePtr make_call(Function f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kCall;
  n->function = f;
  n->children = {std::move(arg)};
  return n;
}

NodePtr make_derivative(const Vec8& direction, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kDerivative;
  n->direction = direction;
  n->children = {std::move(child)};
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == NodeKind::kConstant && n->value == v;
}

bool is_const(const NodePtr& n) { return n->kind == NodeKind::kConstant; }

// ---------------------------------------------------------------- evaluation

Jet eval(const Node& n, const JetMat3& p, int depth) {
  switch (n.kind) {
    case NodeKind::kConstant:
      return Jet(n.value);
    case NodeKind::kEntry:
      return p[n.row][n.col];
    case NodeKind::kNeg:
      return -eval(*n.children[0], p, depth);
    case NodeKind::kAdd:
      return eval(*n.children[0], p, depth) + eval(*n.children[1], p, depth);
    case NodeKind::kSub:
      return eval(*n.children[0], p, depth) - eval(*n.children[1], p, depth);
    case NodeKind::kMul:
      return eval(*n.children[0], p, depth) * eval(*n.children[1], p, depth);
    case NodeKind::kDiv:
      return eval(*n.children[0], p, depth) / eval(*n.children[1], p, depth);
    case NodeKind::kPow:
      return pow(eval(*n.children[0], p, depth), eval(*n.children[1], p, depth));
    case NodeKind::kCall: {
      const Jet x = eval(*n.children[0], p, depth);
      switch (n.function) {
        case Function::kSin: return sin(x);
        case Function::kCos: return cos(x);
        case Function::kExp: return exp(x);
        case Function::kTanh: return tanh(x);
      }
      break;
    }
    case NodeKind::kDerivative: {
      const Mat3 v = AlgebraElement::from_coords(n.direction).matrix();
      JetMat3 moved;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Jet tangent;
          for (int k = 0; k < 3; ++k) {
            if (v(k, j) != 0.0) tangent += p[i][k] * v(k, j);
          }
          moved[i][j] = Jet::extend(p[i][j], tangent, depth);
        }
      }
      return eval(*n.children[0], moved, depth + 1).derivative_part(depth);
    }
  }
  throw Error("corrupt expression node");
}

JetMat3 to_jets(const Mat3& g) {
  JetMat3 p;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p[i][j] = Jet(g(i, j));
  }
  return p;
}

// ------------------------------------------------------------------ printing

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::kAdd:
    case NodeKind::kSub: return 1;
    case NodeKind::kMul:
    case NodeKind::kDiv: return 2;
    case NodeKind::kNeg: return 3;
    case NodeKind::kPow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

const char* function_name(Function f) {
  switch (f) {
    case Function::kSin: return "sin";
    case Function::kCos: return "cos";
    case Function::kExp: return "exp";
    case Function::kTanh: return "tanh";
  }
  return "?";
}

void print(const Node& n, int min_prec, std::string& out) {
  const bool parens = precedence(n) < min_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case NodeKind::kConstant:
      if (n.value < 0 || (n.value == 0.0 && std::signbit(n.value))) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      break;
    case NodeKind::kEntry:
      out += 'm';
      out += static_cast<char>('1' + n.row);
      out += static_cast<char>('1' + n.col);
      break;
    case NodeKind::kNeg:
      out += '-';
      if (n.children[0]->kind == NodeKind::kConstant) {
        // keep "-(2)" distinct from the literal -2
        out += '(';
        print(*n.children[0], 0, out);
        out += ')';
      } else {
        print(*n.children[0], 3, out);
      }
      break;
    case NodeKind::kAdd:
    case NodeKind::kSub:
      print(*n.children[0], 1, out);
      out += n.kind == NodeKind::kAdd ? " + " : " - ";
      print(*n.children[1], 2, out);
      break;
    case NodeKind::kMul:
    case NodeKind::kDiv:
      print(*n.children[0], 2, out);
      out += n.kind == NodeKind::kMul ? "*" : "/";
      print(*n.children[1], 3, out);
      break;
    case NodeKind::kPow:
      print(*n.children[0], 5, out);
      out += '^';
      print(*n.children[1], 3, out);
      break;
    case NodeKind::kCall:
      out += function_name(n.function);
      out += '(';
      print(*n.children[0], 0, out);
      out += ')';
      break;
    case NodeKind::kDerivative:
      out += "d(";
      print(*n.children[0], 0, out);
      for (int i = 0; i < kDim; ++i) out += ", " + format_number(n.direction[i]);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

// ------------------------------------------------------------------- parsing

enum class Tok { kNumber, kIdent, kOp, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= src_.size()) {
        t.type = Tok::kEnd;
        tokens.push_back(t);
        return tokens;
      }
      const char ch = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        t.type = Tok::kNumber;
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        t.number = std::strtod(begin, &end);
        const auto len = static_cast<std::size_t>(end - begin);
        if (len == 0) throw ParseError("malformed number", line_, column_);
        t.text = std::string(begin, len);
        advance(len);
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        t.type = Tok::kIdent;
        std::size_t len = 0;
        while (pos_ + len < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_ + len])) ||
                src_[pos_ + len] == '_')) {
          ++len;
        }
        t.text = std::string(src_.substr(pos_, len));
        advance(len);
      } else if (std::string_view("+-*/^(),").find(ch) != std::string_view::npos) {
        t.type = Tok::kOp;
        t.text = std::string(1, ch);
        advance(1);
      } else {
        throw ParseError(std::string("unexpected character '") + ch + "'", line_, column_);
      }
      tokens.push_back(t);
    }
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      advance(1);
    }
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (peek().type != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_op(const char* op, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::kOp && peek(ahead).text == op;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.line, t.column);
  }
  void expect(const char* op) {
    if (!at_op(op)) {
      fail(std::string("expected '") + op + "'" +
           (peek().type == Tok::kEnd ? " but reached end of input" : ""));
    }
    next();
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (at_op("+") || at_op("-")) {
      const NodeKind k = next().text == "+" ? NodeKind::kAdd : NodeKind::kSub;
      lhs = make_binary(k, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (at_op("*") || at_op("/")) {
      const NodeKind k = next().text == "*" ? NodeKind::kMul : NodeKind::kDiv;
      lhs = make_binary(k, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (at_op("+")) {
      next();
      return unary();
    }
    if (at_op("-")) {
      next();
      // "-2" is the literal -2 unless an exponent binds to the 2
      if (peek().type == Tok::kNumber && !at_op("^", 1)) {
        return make_constant(-next().number);
      }
      return make_unary(NodeKind::kNeg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (at_op("^")) {
      next();
      return make_binary(NodeKind::kPow, base, unary());
    }
    return base;
  }

  double signed_literal() {
    double sign = 1.0;
    if (at_op("-") || at_op("+")) sign = next().text == "-" ? -1.0 : 1.0;
    if (peek().type != Tok::kNumber) fail("derivative direction must be a numeric literal");
    return sign * next().number;
  }

  NodePtr primary() {
    const Token& t = peek();
    if (t.type == Tok::kNumber) return make_constant(next().number);
    if (at_op("(")) {
      next();
      NodePtr e = expr();
      expect(")");
      return e;
    }
    if (t.type == Tok::kIdent) {
      const Token id = next();
      if (id.text == "pi") return make_constant(std::numbers::pi);
      if (id.text.size() == 3 && id.text[0] == 'm' && id.text[1] >= '1' && id.text[1] <= '3' &&
          id.text[2] >= '1' && id.text[2] <= '3') {
        return make_entry(id.text[1] - '1', id.text[2] - '1');
      }
      static const std::array<std::pair<std::string_view, int>, 6> kArity = {{
          {"sin", 1}, {"cos", 1}, {"exp", 1}, {"tanh", 1}, {"pow", 2}, {"d", 1 + kDim}}};
      int arity = -1;
      for (const auto& [name, n] : kArity) {
        if (name == id.text) arity = n;
      }
      if (arity < 0) throw ParseError("unknown identifier '" + id.text + "'", id.line, id.column);
      if (!at_op("(")) fail("expected '(' after function '" + id.text + "'");
      next();
      std::vector<NodePtr> args;
      Vec8 direction = Vec8::Zero();
      args.push_back(expr());
      int count = 1;
      while (at_op(",")) {
        next();
        if (id.text == "d") {
          if (count - 1 < kDim) direction[count - 1] = signed_literal();
          else signed_literal();
        } else {
          args.push_back(expr());
        }
        ++count;
      }
      if (count != arity) {
        throw ParseError("function '" + id.text + "' expects " + std::to_string(arity) +
                             " argument(s), got " + std::to_string(count),
                         id.line, id.column);
      }
      expect(")");
      if (id.text == "pow") return make_binary(NodeKind::kPow, args[0], args[1]);
      if (id.text == "d") return make_derivative(direction, args[0]);
      const Function f = id.text == "sin"   ? Function::kSin
                         : id.text == "cos" ? Function::kCos
                         : id.text == "exp" ? Function::kExp
                                            : Function::kTanh;
      return make_call(f, args[0]);
    }
    if (t.type == Tok::kEnd) fail("unexpected end of input");
    fail("unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool same_node(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::kConstant:
      if (a.value != b.value) return false;
      break;
    case NodeKind::kEntry:
      if (a.row != b.row || a.col != b.col) return false;
      break;
    case NodeKind::kCall:
      if (a.function != b.function) return false;
      break;
    case NodeKind::kDerivative:
      if (a.direction != b.direction) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_node(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

}  // namespace

ScalarField::ScalarField() : root_(make_constant(0.0)) {}

ScalarField ScalarField::parse(std::string_view source) {
  return ScalarField(Parser(Lexer(source).run()).parse());
}

ScalarField ScalarField::constant(double value) { return ScalarField(make_constant(value)); }

ScalarField ScalarField::entry(int row, int col) {
  if (row < 0 || row > 2 || col < 0 || col > 2) throw DomainError("matrix entry out of range");
  return ScalarField(make_entry(row, col));
}

double ScalarField::operator()(const Mat3& g) const {
  return eval(*root_, to_jets(g), 0).value();
}

double ScalarField::operator()(const GroupElement& g) const { return (*this)(g.matrix()); }

Jet ScalarField::evaluate(const JetMat3& point, int depth) const {
  return eval(*root_, point, depth);
}

ScalarField ScalarField::along(const AlgebraElement& v) const {
  if (is_constant() || v.is_zero()) return ScalarField();
  return ScalarField(make_derivative(v.coords(), root_));
}

double ScalarField::derivative(const AlgebraElement& v, const GroupElement& g) const {
  return along(v)(g);
}

double ScalarField::derivative(const AlgebraElement& v1, const AlgebraElement& v2,
                               const GroupElement& g) const {
  return along(v2).along(v1)(g);
}

double ScalarField::derivative(const Mat3& v, const Mat3& g) const {
  if (is_constant()) return 0.0;
  const Mat3 tangent = g * v;
  JetMat3 p;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p[i][j] = Jet::extend(Jet(g(i, j)), Jet(tangent(i, j)), 0);
  }
  return eval(*root_, p, 1)[1];
}

Vec8 ScalarField::gradient(const Mat3& g) const {
  Vec8 out = Vec8::Zero();
  if (is_constant()) return out;
  for (int k = 0; k < kDim; ++k) out[k] = derivative(AlgebraElement::basis(k).matrix(), g);
  return out;
}

std::string ScalarField::to_string() const {
  std::string out;
  print(*root_, 0, out);
  return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  const NodePtr& x = a.root();
  const NodePtr& y = b.root();
  if (is_const(x) && is_const(y)) return ScalarField::constant(x->value + y->value);
  if (is_const(x, 0.0)) return b;
  if (is_const(y, 0.0)) return a;
  return ScalarField(make_binary(NodeKind::kAdd, x, y));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  const NodePtr& x = a.root();
  const NodePtr& y = b.root();
  if (is_const(x) && is_const(y)) return ScalarField::constant(x->value - y->value);
  if (is_const(y, 0.0)) return a;
  if (is_const(x, 0.0)) return -b;
  return ScalarField(make_binary(NodeKind::kSub, x, y));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  const NodePtr& x = a.root();
  const NodePtr& y = b.root();
  if (is_const(x) && is_const(y)) return ScalarField::constant(x->value * y->value);
  if (is_const(x, 0.0) || is_const(y, 0.0)) return ScalarField();
  if (is_const(x, 1.0)) return b;
  if (is_const(y, 1.0)) return a;
  return ScalarField(make_binary(NodeKind::kMul, x, y));
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  const NodePtr& x = a.root();
  const NodePtr& y = b.root();
  if (is_const(y, 0.0)) throw DomainError("division by the zero field");
  if (is_const(x) && is_const(y)) return ScalarField::constant(x->value / y->value);
  if (is_const(x, 0.0)) return ScalarField();
  if (is_const(y, 1.0)) return a;
  return ScalarField(make_binary(NodeKind::kDiv, x, y));
}

ScalarField operator-(const ScalarField& a) {
  if (a.is_constant()) return ScalarField::constant(-a.constant_value());
  return ScalarField(make_unary(NodeKind::kNeg, a.root()));
}

ScalarField sin(const ScalarField& f) { return ScalarField(make_call(Function::kSin, f.root())); }
ScalarField cos(const ScalarField& f) { return ScalarField(make_call(Function::kCos, f.root())); }
ScalarField exp(const ScalarField& f) { return ScalarField(make_call(Function::kExp, f.root())); }
ScalarField tanh(const ScalarField& f) {
  return ScalarField(make_call(Function::kTanh, f.root()));
}
ScalarField pow(const ScalarField& base, const ScalarField& exponent) {
  return ScalarField(make_binary(NodeKind::kPow, base.root(), exponent.root()));
}

bool same_tree(const ScalarField& a, const ScalarField& b) {
  return same_node(*a.root(), *b.root());
}

double directional_derivative(const ScalarField& f, const AlgebraElement& v,
                              const GroupElement& g) {
  return f.derivative(v, g);
}

double directional_derivative(const ScalarField& f, const AlgebraElement& v1,
                              const AlgebraElement& v2, const GroupElement& g) {
  return f.derivative(v1, v2, g);
}

}  // namespace unipert
