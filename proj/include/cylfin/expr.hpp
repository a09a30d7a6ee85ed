#ifndef CYLFIN_EXPR_HPP_
#define CYLFIN_EXPR_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "cylfin/rational.hpp"

namespace cylfin {

// Symbolic expressions over the reduced coordinates {x0, r, s, z} and named
// parameters. Nodes are immutable and shared; smart constructors fold
// constants, apply 0/1 identities and keep exact rationals exact until a
// floating literal or a transcendental function enters.

enum class Axis : int { x0 = 0, r = 1, s = 2, z = 3 };
inline const char* axis_name(Axis a) {
  static const char* names[4] = {"x0", "r", "s", "z"};
  return names[static_cast<int>(a)];
}

enum class NodeKind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Builtin { Sqrt, Exp, Log, Sin, Cos };

struct ExprNode;
using Expression = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;

  // Constant
  bool exact = false;
  Rational rat;
  double fval = 0.0;

  // Variable: axis >= 0 for a reserved coordinate, -1 for a named parameter.
  int axis = -1;
  std::string name;

  // Pow exponent (integer or rational).
  Rational expo;

  // Call
  Builtin fn = Builtin::Sqrt;

  Expression a, b;
};

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

struct EvalError : std::runtime_error {
  std::string subexpr;
  EvalError(const std::string& msg, std::string sub)
      : std::runtime_error(msg + " in sub-expression `" + sub + "`"), subexpr(std::move(sub)) {}
};

// --- construction -----------------------------------------------------------

Expression make_number(Rational v);
Expression make_number(double v);
Expression make_variable(const std::string& name);
Expression make_neg(Expression e);
Expression make_add(Expression x, Expression y);
Expression make_sub(Expression x, Expression y);
Expression make_mul(Expression x, Expression y);
Expression make_div(Expression x, Expression y);
Expression make_pow(Expression base, Rational expo);
Expression make_call(Builtin fn, Expression arg);

// --- core operations --------------------------------------------------------

Expression parse(const std::string& text);
std::string print(const Expression& e);
Expression differentiate(const Expression& e, Axis var);
bool structurally_equal(const Expression& x, const Expression& y);
bool depends_on(const Expression& e, Axis var);
std::size_t node_count(const Expression& e);

double evaluate(const Expression& e, const std::unordered_map<std::string, double>& bindings);

// Guarded derivative memo; pins its keys so raw-pointer identity stays valid.
class DerivCache {
 public:
  Expression get(const Expression& e, Axis var);

 private:
  struct Key {
    const ExprNode* node;
    int axis;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<const void*>()(k.node) * 31u + static_cast<std::size_t>(k.axis);
    }
  };
  std::unordered_map<Key, std::pair<Expression, Expression>, KeyHash> cache_;
};

// --- generic evaluation -----------------------------------------------------

// Numeric environment: axis values of type T plus double-valued parameters.
// `proto` is a zero-valued exemplar used to lift plain constants into T
// (for jet types it carries the truncation shape).
template <class T>
struct EvalEnv {
  std::array<const T*, 4> axis{nullptr, nullptr, nullptr, nullptr};
  const std::unordered_map<std::string, double>* params = nullptr;
  T proto{};
};

namespace detail {
template <class T>
T rebuild_constant(const T& like, double v);  // provided per numeric type
template <class T>
T pow_rational(const T& base, const Rational& q, const ExprNode* where);
inline double constant_part(double x) { return x; }
template <class T>
double constant_part(const T& x) {
  return x.value();
}
}  // namespace detail

template <class T>
T evaluate_generic(const Expression& e, const EvalEnv<T>& env) {
  switch (e->kind) {
    case NodeKind::Constant: {
      double v = e->exact ? e->rat.to_double() : e->fval;
      return detail::rebuild_constant(env.proto, v);
    }
    case NodeKind::Variable: {
      if (e->axis >= 0) {
        const T* p = env.axis[e->axis];
        if (!p) throw EvalError("unbound variable", e->name);
        return *p;
      }
      if (!env.params || !env.params->count(e->name))
        throw EvalError("unbound parameter", e->name);
      return detail::rebuild_constant(env.proto, env.params->at(e->name));
    }
    case NodeKind::Neg:
      return -evaluate_generic(e->a, env);
    case NodeKind::Add:
      return evaluate_generic(e->a, env) + evaluate_generic(e->b, env);
    case NodeKind::Sub:
      return evaluate_generic(e->a, env) - evaluate_generic(e->b, env);
    case NodeKind::Mul:
      return evaluate_generic(e->a, env) * evaluate_generic(e->b, env);
    case NodeKind::Div: {
      T num = evaluate_generic(e->a, env);
      T den = evaluate_generic(e->b, env);
      if (detail::constant_part(den) == 0.0) throw EvalError("division by zero", print(e->b));
      return num / den;
    }
    case NodeKind::Pow:
      return detail::pow_rational(evaluate_generic(e->a, env), e->expo, e.get());
    case NodeKind::Call: {
      using std::cos;
      using std::exp;
      using std::log;
      using std::sin;
      using std::sqrt;
      T arg = evaluate_generic(e->a, env);
      double c = detail::constant_part(arg);
      switch (e->fn) {
        case Builtin::Sqrt:
          if (c < 0) throw EvalError("sqrt of negative value", print(e->a));
          return sqrt(arg);
        case Builtin::Exp:
          return exp(arg);
        case Builtin::Log:
          if (c <= 0) throw EvalError("log of non-positive value", print(e->a));
          return log(arg);
        case Builtin::Sin:
          return sin(arg);
        case Builtin::Cos:
          return cos(arg);
      }
      throw EvalError("unknown function", print(e));
    }
  }
  throw EvalError("corrupt node", "?");
}

namespace detail {
template <>
inline double rebuild_constant<double>(const double&, double v) {
  return v;
}
template <>
inline double pow_rational<double>(const double& base, const Rational& q, const ExprNode* where) {
  if (q.is_integer()) {
    double acc = 1.0;
    double b = q.num >= 0 ? base : 1.0 / base;
    std::int64_t n = q.num >= 0 ? q.num : -q.num;
    for (std::int64_t i = 0; i < n; ++i) acc *= b;
    return acc;
  }
  if (base < 0) throw EvalError("negative base with rational exponent", print(where->a));
  return std::pow(base, q.to_double());
}
}  // namespace detail

}  // namespace cylfin

#endif  // CYLFIN_EXPR_HPP_
