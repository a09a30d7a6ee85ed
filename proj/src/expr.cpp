#include "cylfin/expr.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace cylfin {

namespace {

Expression node(NodeKind k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  return n;
}

bool is_const(const Expression& e) { return e->kind == NodeKind::Constant; }
bool is_exact(const Expression& e) { return is_const(e) && e->exact; }
bool is_zero(const Expression& e) {
  return is_const(e) && (e->exact ? e->rat.is_zero() : e->fval == 0.0);
}
bool is_one(const Expression& e) {
  return is_const(e) && (e->exact ? e->rat.is_one() : e->fval == 1.0);
}
double const_val(const Expression& e) { return e->exact ? e->rat.to_double() : e->fval; }

}  // namespace

Expression make_number(Rational v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->exact = true;
  n->rat = v;
  return n;
}

Expression make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->exact = false;
  n->fval = v;
  return n;
}

Expression make_variable(const std::string& name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Variable;
  n->name = name;
  n->axis = -1;
  for (int a = 0; a < 4; ++a)
    if (name == axis_name(static_cast<Axis>(a))) n->axis = a;
  return n;
}

Expression make_neg(Expression e) {
  if (is_exact(e)) return make_number(Rational(-e->rat.num, e->rat.den));
  if (is_const(e)) return make_number(-e->fval);
  if (e->kind == NodeKind::Neg) return e->a;
  auto n = node(NodeKind::Neg);
  const_cast<ExprNode*>(n.get())->a = e;
  return n;
}

Expression make_add(Expression x, Expression y) {
  if (is_zero(x)) return y;
  if (is_zero(y)) return x;
  if (is_const(x) && is_const(y)) {
    if (x->exact && y->exact)
      if (auto r = Rational::add(x->rat, y->rat)) return make_number(*r);
    return make_number(const_val(x) + const_val(y));
  }
  // gather constants: (e + c1) + c2 -> e + (c1+c2)
  if (is_const(y) && x->kind == NodeKind::Add && is_const(x->b))
    return make_add(x->a, make_add(x->b, y));
  auto n = node(NodeKind::Add);
  auto* m = const_cast<ExprNode*>(n.get());
  m->a = x;
  m->b = y;
  return n;
}

Expression make_sub(Expression x, Expression y) {
  if (is_zero(y)) return x;
  if (is_zero(x)) return make_neg(y);
  if (is_const(x) && is_const(y)) {
    if (x->exact && y->exact)
      if (auto r = Rational::sub(x->rat, y->rat)) return make_number(*r);
    return make_number(const_val(x) - const_val(y));
  }
  auto n = node(NodeKind::Sub);
  auto* m = const_cast<ExprNode*>(n.get());
  m->a = x;
  m->b = y;
  return n;
}

Expression make_mul(Expression x, Expression y) {
  if (is_zero(x) || is_zero(y)) return make_number(Rational(0));
  if (is_one(x)) return y;
  if (is_one(y)) return x;
  if (is_const(x) && is_const(y)) {
    if (x->exact && y->exact)
      if (auto r = Rational::mul(x->rat, y->rat)) return make_number(*r);
    return make_number(const_val(x) * const_val(y));
  }
  // gather constants: c2 * (c1 * e) -> (c1*c2) * e
  if (is_const(x) && y->kind == NodeKind::Mul && is_const(y->a))
    return make_mul(make_mul(x, y->a), y->b);
  if (is_const(y)) return make_mul(y, x);  // constants lead
  auto n = node(NodeKind::Mul);
  auto* m = const_cast<ExprNode*>(n.get());
  m->a = x;
  m->b = y;
  return n;
}

Expression make_div(Expression x, Expression y) {
  if (is_zero(x) && !is_zero(y)) return make_number(Rational(0));
  if (is_one(y)) return x;
  if (is_const(x) && is_const(y) && !is_zero(y)) {
    if (x->exact && y->exact)
      if (auto r = Rational::div(x->rat, y->rat)) return make_number(*r);
    return make_number(const_val(x) / const_val(y));
  }
  auto n = node(NodeKind::Div);
  auto* m = const_cast<ExprNode*>(n.get());
  m->a = x;
  m->b = y;
  return n;
}

Expression make_pow(Expression base, Rational expo) {
  if (expo.is_zero()) return make_number(Rational(1));
  if (expo.is_one()) return base;
  if (is_exact(base) && expo.is_integer())
    if (auto r = Rational::pow_int(base->rat, expo.num)) return make_number(*r);
  if (is_const(base) && !is_exact(base) && expo.is_integer())
    return make_number(std::pow(const_val(base), static_cast<double>(expo.num)));
  if (base->kind == NodeKind::Pow) {
    if (auto q = Rational::mul(base->expo, expo)) return make_pow(base->a, *q);
  }
  auto n = node(NodeKind::Pow);
  auto* m = const_cast<ExprNode*>(n.get());
  m->a = base;
  m->expo = expo;
  return n;
}

Expression make_call(Builtin fn, Expression arg) {
  if (is_const(arg)) {
    double v = const_val(arg);
    switch (fn) {
      case Builtin::Sqrt:
        if (arg->exact && !arg->rat.is_zero()) break;  // keep sqrt of exact constants symbolic
        if (v < 0) break;
        return make_number(std::sqrt(v));
      case Builtin::Exp:
        if (is_zero(arg)) return make_number(Rational(1));
        break;
      case Builtin::Log:
        if (is_one(arg)) return make_number(Rational(0));
        break;
      case Builtin::Sin:
        if (is_zero(arg)) return make_number(Rational(0));
        break;
      case Builtin::Cos:
        if (is_zero(arg)) return make_number(Rational(1));
        break;
    }
  }
  auto n = node(NodeKind::Call);
  auto* m = const_cast<ExprNode*>(n.get());
  m->fn = fn;
  m->a = arg;
  return n;
}

// --- parser -----------------------------------------------------------------

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos, std::string("expected ") + what);
  }

  Expression parse_expr() {
    Expression e = parse_term();
    for (;;) {
      if (accept('+'))
        e = make_add(e, parse_term());
      else if (accept('-'))
        e = make_sub(e, parse_term());
      else
        return e;
    }
  }

  Expression parse_term() {
    Expression e = parse_factor();
    for (;;) {
      if (accept('*'))
        e = make_mul(e, parse_factor());
      else if (accept('/'))
        e = make_div(e, parse_factor());
      else
        return e;
    }
  }

  Expression parse_factor() {
    Expression b = parse_base();
    if (accept('^')) return make_pow(b, parse_exponent());
    return b;
  }

  Rational parse_integer() {
    skip_ws();
    bool negative = accept('-');
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      throw ParseError(pos, "expected integer exponent");
    std::int64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      ++pos;
    }
    return Rational(negative ? -v : v);
  }

  Rational parse_exponent() {
    if (accept('(')) {
      Rational p = parse_integer();
      skip_ws();
      if (accept(')')) return p;  // parenthesized integer, e.g. z^(-2)
      expect('/', "'/' in rational exponent");
      Rational q = parse_integer();
      expect(')', "')' closing rational exponent");
      auto r = Rational::div(p, q);
      if (!r) throw ParseError(pos, "zero denominator in exponent");
      return *r;
    }
    return parse_integer();
  }

  Expression parse_base() {
    char c = peek();
    if (c == '(') {
      ++pos;
      Expression e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (c == '-') {
      ++pos;
      return make_neg(parse_factor());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(pos, "expected number, identifier or '('");
  }

  Expression parse_number() {
    skip_ws();
    std::size_t start = pos;
    __int128 mant = 0;
    int frac_digits = 0;
    bool overflow = false;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      mant = mant * 10 + (text[pos] - '0');
      if (mant > INT64_MAX) overflow = true;
      ++pos;
      any = true;
    }
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        mant = mant * 10 + (text[pos] - '0');
        if (mant > INT64_MAX) overflow = true;
        ++frac_digits;
        ++pos;
        any = true;
      }
    }
    if (!any) throw ParseError(start, "malformed number");
    std::int64_t exp10 = 0;
    bool has_exp = false;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t save = pos;
      ++pos;
      bool eneg = false;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        eneg = text[pos] == '-';
        ++pos;
      }
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        has_exp = true;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          exp10 = exp10 * 10 + (text[pos] - '0');
          if (exp10 > 64) overflow = true;
          ++pos;
        }
        if (eneg) exp10 = -exp10;
      } else {
        pos = save;  // trailing identifier, not an exponent
      }
    }
    (void)has_exp;
    std::int64_t net = exp10 - frac_digits;
    if (!overflow) {
      __int128 num = mant, den = 1;
      std::int64_t k = net;
      while (k > 0 && num <= (INT64_MAX / 10)) {
        num *= 10;
        --k;
      }
      while (k < 0 && den <= (INT64_MAX / 10)) {
        den *= 10;
        ++k;
      }
      if (k == 0)
        if (auto r = Rational::make_checked(num, den)) return make_number(*r);
    }
    return make_number(std::stod(text.substr(start, pos - start)));
  }

  Expression parse_ident() {
    skip_ws();
    std::size_t start = pos;
    std::string id;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      id += text[pos];
      ++pos;
    }
    if (peek() == '(') {
      ++pos;
      Builtin fn;
      if (id == "sqrt")
        fn = Builtin::Sqrt;
      else if (id == "exp")
        fn = Builtin::Exp;
      else if (id == "log")
        fn = Builtin::Log;
      else if (id == "sin")
        fn = Builtin::Sin;
      else if (id == "cos")
        fn = Builtin::Cos;
      else
        throw ParseError(start, "unknown function '" + id + "'");
      Expression arg = parse_expr();
      expect(')', "')' closing function call");
      return make_call(fn, arg);
    }
    return make_variable(id);
  }
};

}  // namespace

Expression parse(const std::string& text) {
  Parser p(text);
  Expression e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError(p.pos, "unexpected trailing input");
  return e;
}

// --- printer ----------------------------------------------------------------

namespace {

int precedence(const Expression& e) {
  switch (e->kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_rec(std::ostream& os, const Expression& e, int parent_prec, bool right_side) {
  int prec = precedence(e);
  bool need = prec < parent_prec || (prec == parent_prec && right_side);
  if (is_const(e) && const_val(e) < 0) need = parent_prec > 1;
  if (need) os << '(';
  switch (e->kind) {
    case NodeKind::Constant:
      if (e->exact) {
        if (e->rat.is_integer())
          os << e->rat.num;
        else
          os << e->rat.num << '/' << e->rat.den;
      } else {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << e->fval;
        os << tmp.str();
      }
      break;
    case NodeKind::Variable:
      os << e->name;
      break;
    case NodeKind::Neg:
      os << '-';
      print_rec(os, e->a, 3, true);
      break;
    case NodeKind::Add:
      print_rec(os, e->a, 1, false);
      os << " + ";
      print_rec(os, e->b, 1, true);
      break;
    case NodeKind::Sub:
      print_rec(os, e->a, 1, false);
      os << " - ";
      print_rec(os, e->b, 1, true);
      break;
    case NodeKind::Mul:
      print_rec(os, e->a, 2, false);
      os << "*";
      print_rec(os, e->b, 2, true);
      break;
    case NodeKind::Div:
      print_rec(os, e->a, 2, false);
      os << "/";
      print_rec(os, e->b, 2, true);
      break;
    case NodeKind::Pow:
      print_rec(os, e->a, 5, false);
      os << '^';
      if (e->expo.is_integer() && e->expo.num >= 0)
        os << e->expo.num;
      else
        os << '(' << e->expo.num << '/' << e->expo.den << ')';
      break;
    case NodeKind::Call: {
      static const char* names[] = {"sqrt", "exp", "log", "sin", "cos"};
      os << names[static_cast<int>(e->fn)] << '(';
      print_rec(os, e->a, 0, false);
      os << ')';
      break;
    }
  }
  if (need) os << ')';
}

}  // namespace

std::string print(const Expression& e) {
  std::ostringstream os;
  print_rec(os, e, 0, false);
  return os.str();
}

// --- differentiation --------------------------------------------------------

Expression differentiate(const Expression& e, Axis var) {
  const int ax = static_cast<int>(var);
  switch (e->kind) {
    case NodeKind::Constant:
      return make_number(Rational(0));
    case NodeKind::Variable:
      return make_number(Rational(e->axis == ax ? 1 : 0));
    case NodeKind::Neg:
      return make_neg(differentiate(e->a, var));
    case NodeKind::Add:
      return make_add(differentiate(e->a, var), differentiate(e->b, var));
    case NodeKind::Sub:
      return make_sub(differentiate(e->a, var), differentiate(e->b, var));
    case NodeKind::Mul:
      return make_add(make_mul(differentiate(e->a, var), e->b),
                      make_mul(e->a, differentiate(e->b, var)));
    case NodeKind::Div:
      return make_div(make_sub(make_mul(differentiate(e->a, var), e->b),
                               make_mul(e->a, differentiate(e->b, var))),
                      make_pow(e->b, Rational(2)));
    case NodeKind::Pow: {
      auto em1 = Rational::sub(e->expo, Rational(1));
      if (!em1) throw EvalError("exponent overflow in differentiation", print(e));
      return make_mul(make_mul(make_number(e->expo), make_pow(e->a, *em1)),
                      differentiate(e->a, var));
    }
    case NodeKind::Call: {
      Expression da = differentiate(e->a, var);
      switch (e->fn) {
        case Builtin::Sqrt:
          return make_div(da, make_mul(make_number(Rational(2)), make_call(Builtin::Sqrt, e->a)));
        case Builtin::Exp:
          return make_mul(da, e);
        case Builtin::Log:
          return make_div(da, e->a);
        case Builtin::Sin:
          return make_mul(da, make_call(Builtin::Cos, e->a));
        case Builtin::Cos:
          return make_neg(make_mul(da, make_call(Builtin::Sin, e->a)));
      }
      break;
    }
  }
  throw EvalError("corrupt node in differentiate", "?");
}

Expression DerivCache::get(const Expression& e, Axis var) {
  Key k{e.get(), static_cast<int>(var)};
  auto it = cache_.find(k);
  if (it != cache_.end()) return it->second.second;
  Expression d = differentiate(e, var);
  cache_[k] = {e, d};
  return d;
}

// --- misc -------------------------------------------------------------------

bool structurally_equal(const Expression& x, const Expression& y) {
  if (x.get() == y.get()) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case NodeKind::Constant:
      // a folded float literal may re-parse as an exact decimal rational;
      // constants compare by value
      if (x->exact && y->exact) return x->rat == y->rat;
      return const_val(x) == const_val(y);
    case NodeKind::Variable:
      return x->name == y->name;
    case NodeKind::Neg:
      return structurally_equal(x->a, y->a);
    case NodeKind::Pow:
      return x->expo == y->expo && structurally_equal(x->a, y->a);
    case NodeKind::Call:
      return x->fn == y->fn && structurally_equal(x->a, y->a);
    default:
      return structurally_equal(x->a, y->a) && structurally_equal(x->b, y->b);
  }
}

bool depends_on(const Expression& e, Axis var) {
  switch (e->kind) {
    case NodeKind::Constant:
      return false;
    case NodeKind::Variable:
      return e->axis == static_cast<int>(var);
    case NodeKind::Neg:
    case NodeKind::Pow:
    case NodeKind::Call:
      return depends_on(e->a, var);
    default:
      return depends_on(e->a, var) || depends_on(e->b, var);
  }
}

std::size_t node_count(const Expression& e) {
  switch (e->kind) {
    case NodeKind::Constant:
    case NodeKind::Variable:
      return 1;
    case NodeKind::Neg:
    case NodeKind::Pow:
    case NodeKind::Call:
      return 1 + node_count(e->a);
    default:
      return 1 + node_count(e->a) + node_count(e->b);
  }
}

double evaluate(const Expression& e, const std::unordered_map<std::string, double>& bindings) {
  EvalEnv<double> env;
  std::array<double, 4> vals{};
  for (int a = 0; a < 4; ++a) {
    auto it = bindings.find(axis_name(static_cast<Axis>(a)));
    if (it != bindings.end()) {
      vals[a] = it->second;
      env.axis[a] = &vals[a];
    }
  }
  env.params = &bindings;
  env.proto = 0.0;
  return evaluate_generic<double>(e, env);
}

}  // namespace cylfin
