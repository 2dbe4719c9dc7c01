#include "carath/field_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "carath/errors.hpp"

namespace carath {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_scalar_function(const ScalarFunction& g, std::ostringstream& os) {
  using K = ScalarFunction::Kind;
  switch (g.kind()) {
    case K::ramp_wave:
      os << "(H)";
      return;
    case K::step_wave:
      os << "(Hbar)";
      return;
    case K::ramp_integral:
      os << "(h)";
      return;
    case K::step_integral:
      os << "(hbar)";
      return;
    case K::sinusoid:
      os << "(sin " << num(g.amplitude()) << ' ' << num(g.omega()) << ' ' << num(g.phase()) << ')';
      return;
    case K::piecewise:
      break;
  }
  auto coeffs = [&](const std::array<double, 4>& c) {
    for (std::size_t i = 0; i < 4; ++i) os << (i ? " " : "") << num(c[i]);
  };
  if (g.table_breaks().empty()) {
    os << "(poly ";
    coeffs(g.table_coeffs()[0]);
    os << ')';
    return;
  }
  os << "(pw (breaks";
  for (double b : g.table_breaks()) os << ' ' << num(b);
  os << ')';
  for (const auto& c : g.table_coeffs()) {
    os << " (piece ";
    coeffs(c);
    os << ')';
  }
  os << ')';
}

void print_node(const ExprNode& n, std::ostringstream& os) {
  auto list = [&](const std::vector<double>& v) {
    for (double x : v) os << ' ' << num(x);
  };
  std::visit(overloaded{
                 [&](const node::Constant& c) {
                   os << "(const " << n.shape.rows << ' ' << n.shape.cols;
                   list(c.values);
                   os << ')';
                 },
                 [&](const node::LinearInX& l) {
                   os << "(linear " << n.shape.rows << ' ' << n.dim_in;
                   list(l.a);
                   os << ')';
                 },
                 [&](const node::TimeFunction& f) {
                   os << "(time ";
                   print_scalar_function(f.g, os);
                   os << ')';
                 },
                 [&](const node::ShiftCompose& s) {
                   os << "(shift ";
                   print_scalar_function(s.g, os);
                   list(s.a);
                   os << ')';
                 },
                 [&](const node::Sum& s) {
                   os << "(sum";
                   for (const auto& e : s.terms) {
                     os << ' ';
                     print_node(*e, os);
                   }
                   os << ')';
                 },
                 [&](const node::ScalarScale& s) {
                   os << "(scale " << num(s.c) << ' ';
                   print_node(*s.e, os);
                   os << ')';
                 },
                 [&](const node::Product& p) {
                   os << "(product ";
                   print_node(*p.s, os);
                   os << ' ';
                   print_node(*p.e, os);
                   os << ')';
                 },
                 [&](const node::MatMul& m) {
                   os << "(matmul ";
                   print_node(*m.lhs, os);
                   os << ' ';
                   print_node(*m.rhs, os);
                   os << ')';
                 },
                 [&](const node::MatrixAssemble& m) {
                   os << "(assemble " << n.shape.rows << ' ' << n.shape.cols;
                   for (const auto& e : m.entries) {
                     os << ' ';
                     print_node(*e, os);
                   }
                   os << ')';
                 },
                 [&](const node::Translate& t) {
                   os << "(translate " << num(t.tau) << ' ';
                   print_node(*t.e, os);
                   os << ')';
                 },
                 [&](const node::Callback& c) {
                   os << "(callback " << c.name << ' ' << n.shape.rows << ' ' << n.shape.cols << ' ' << n.dim_in << ')';
                 },
             },
             n.data);
}

void print_field_into(const FieldDescriptor& f, std::ostringstream& os) {
  os << "(field (in " << f.dim_in() << ") (p " << num(f.p()) << ") (class " << to_string(f.class_claim())
     << ") (expr ";
  print_node(*f.expr(), os);
  os << ')';
  if (f.jacobian()) {
    os << " (jacobian ";
    print_field_into(*f.jacobian(), os);
    os << ')';
  }
  os << ')';
}

// ---- reader ----

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1;
  int col = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_top() {
    SExpr e = read();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    SExpr e;
    e.line = line_;
    e.col = col_;
    if (text_[pos_] == ')') fail("unexpected ')'");
    if (text_[pos_] == '(') {
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unclosed '('", e.line, e.col);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    e.is_atom = true;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      e.atom.push_back(c);
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void fail_at(const SExpr& e, const std::string& what) { throw ParseError(what, e.line, e.col); }

double to_number(const SExpr& e) {
  if (!e.is_atom) fail_at(e, "expected a number");
  const std::string& s = e.atom;
  const auto slash = s.find('/');
  auto parse = [&](std::string_view part) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) fail_at(e, "invalid number '" + s + "'");
    return v;
  };
  if (slash == std::string::npos) return parse(s);
  const double den = parse(std::string_view(s).substr(slash + 1));
  if (den == 0.0) fail_at(e, "zero denominator in '" + s + "'");
  return parse(std::string_view(s).substr(0, slash)) / den;
}

std::size_t to_size(const SExpr& e) {
  const double v = to_number(e);
  if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) fail_at(e, "expected a positive integer");
  return static_cast<std::size_t>(v);
}

const std::string& head(const SExpr& e) {
  if (e.is_atom || e.items.empty() || !e.items[0].is_atom) fail_at(e, "expected a list starting with a keyword");
  return e.items[0].atom;
}

void expect_arity(const SExpr& e, std::size_t n) {
  if (e.items.size() != n) fail_at(e, "'" + head(e) + "' expects " + std::to_string(n - 1) + " argument(s)");
}

std::array<double, 4> to_coeffs(const SExpr& e, std::size_t first) {
  std::array<double, 4> c{};
  if (e.items.size() <= first || e.items.size() - first > 4) fail_at(e, "expected 1 to 4 polynomial coefficients");
  for (std::size_t i = first; i < e.items.size(); ++i) c[i - first] = to_number(e.items[i]);
  return c;
}

ScalarFunction to_scalar_function(const SExpr& e) {
  const std::string& h = head(e);
  try {
    if (h == "H") return expect_arity(e, 1), ScalarFunction::ramp_wave();
    if (h == "Hbar") return expect_arity(e, 1), ScalarFunction::step_wave();
    if (h == "h") return expect_arity(e, 1), ScalarFunction::ramp_integral();
    if (h == "hbar") return expect_arity(e, 1), ScalarFunction::step_integral();
    if (h == "sin") {
      expect_arity(e, 4);
      return ScalarFunction::sinusoid(to_number(e.items[1]), to_number(e.items[2]), to_number(e.items[3]));
    }
    if (h == "poly") return ScalarFunction::polynomial(to_coeffs(e, 1));
    if (h == "pw") {
      if (e.items.size() < 3 || head(e.items[1]) != "breaks") fail_at(e, "pw expects (breaks ...) then pieces");
      std::vector<double> breaks;
      for (std::size_t i = 1; i < e.items[1].items.size(); ++i) breaks.push_back(to_number(e.items[1].items[i]));
      std::vector<std::array<double, 4>> coeffs;
      for (std::size_t i = 2; i < e.items.size(); ++i) {
        if (head(e.items[i]) != "piece") fail_at(e.items[i], "expected (piece c0 ...)");
        coeffs.push_back(to_coeffs(e.items[i], 1));
      }
      return ScalarFunction::piecewise(std::move(breaks), std::move(coeffs));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    fail_at(e, err.what());
  }
  fail_at(e, "unknown time function '" + h + "'");
}

ExprPtr to_expr(const SExpr& e, const CallbackRegistry* callbacks) {
  const std::string& h = head(e);
  auto numbers_from = [&](std::size_t first) {
    std::vector<double> v;
    for (std::size_t i = first; i < e.items.size(); ++i) v.push_back(to_number(e.items[i]));
    return v;
  };
  auto child = [&](std::size_t i) { return to_expr(e.items[i], callbacks); };
  try {
    if (h == "const") {
      if (e.items.size() < 4) fail_at(e, "const expects rows, cols and values");
      return expr::constant({to_size(e.items[1]), to_size(e.items[2])}, numbers_from(3));
    }
    if (h == "linear") {
      if (e.items.size() < 4) fail_at(e, "linear expects rows, cols and entries");
      return expr::linear(to_size(e.items[1]), to_size(e.items[2]), numbers_from(3));
    }
    if (h == "time") {
      expect_arity(e, 2);
      return expr::time(to_scalar_function(e.items[1]));
    }
    if (h == "shift") {
      if (e.items.size() < 3) fail_at(e, "shift expects a time function and projection coefficients");
      return expr::shift(to_scalar_function(e.items[1]), numbers_from(2));
    }
    if (h == "sum") {
      if (e.items.size() < 2) fail_at(e, "sum expects at least one term");
      std::vector<ExprPtr> terms;
      for (std::size_t i = 1; i < e.items.size(); ++i) terms.push_back(child(i));
      return expr::sum(std::move(terms));
    }
    if (h == "scale") {
      expect_arity(e, 3);
      return expr::scale(to_number(e.items[1]), child(2));
    }
    if (h == "product") {
      expect_arity(e, 3);
      return expr::product(child(1), child(2));
    }
    if (h == "matmul") {
      expect_arity(e, 3);
      return expr::matmul(child(1), child(2));
    }
    if (h == "assemble") {
      if (e.items.size() < 4) fail_at(e, "assemble expects rows, cols and entries");
      std::vector<ExprPtr> entries;
      for (std::size_t i = 3; i < e.items.size(); ++i) entries.push_back(child(i));
      return expr::assemble(to_size(e.items[1]), to_size(e.items[2]), std::move(entries));
    }
    if (h == "translate") {
      expect_arity(e, 3);
      return expr::translate(to_number(e.items[1]), child(2));
    }
    if (h == "callback") {
      expect_arity(e, 5);
      if (!e.items[1].is_atom) fail_at(e.items[1], "callback name must be an atom");
      const std::string& name = e.items[1].atom;
      if (!callbacks) fail_at(e, "callback '" + name + "' used but no registry given");
      auto it = callbacks->find(name);
      if (it == callbacks->end()) fail_at(e, "unknown callback '" + name + "'");
      return expr::callback(name, {to_size(e.items[2]), to_size(e.items[3])}, to_size(e.items[4]), it->second);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    fail_at(e, err.what());
  }
  fail_at(e, "unknown expression '" + h + "'");
}

FieldDescriptor to_field(const SExpr& e, const CallbackRegistry* callbacks) {
  if (head(e) != "field") fail_at(e, "expected (field ...)");
  std::size_t dim = 0;
  double p = 1.0;
  ClassClaim claim = ClassClaim::LC;
  ExprPtr body;
  std::shared_ptr<const FieldDescriptor> jac;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& item = e.items[i];
    const std::string& key = head(item);
    expect_arity(item, 2);
    if (key == "in") {
      dim = to_size(item.items[1]);
    } else if (key == "p") {
      p = to_number(item.items[1]);
    } else if (key == "class") {
      const std::string& c = item.items[1].atom;
      if (c == "LC") claim = ClassClaim::LC;
      else if (c == "SC") claim = ClassClaim::SC;
      else if (c == "ThetaC") claim = ClassClaim::ThetaC;
      else fail_at(item.items[1], "class must be LC, SC or ThetaC");
    } else if (key == "expr") {
      body = to_expr(item.items[1], callbacks);
    } else if (key == "jacobian") {
      jac = std::make_shared<const FieldDescriptor>(to_field(item.items[1], callbacks));
    } else {
      fail_at(item, "unknown field attribute '" + key + "'");
    }
  }
  if (!body) fail_at(e, "field has no (expr ...)");
  if (dim == 0) dim = body->dim_in == 0 ? 1 : body->dim_in;
  try {
    return FieldDescriptor(body, dim, p, claim, jac);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    fail_at(e, err.what());
  }
}

}  // namespace

std::string print_expr(const ExprNode& e) {
  std::ostringstream os;
  print_node(e, os);
  return os.str();
}

std::string print_field(const FieldDescriptor& f) {
  std::ostringstream os;
  print_field_into(f, os);
  return os.str();
}

FieldDescriptor parse_field(std::string_view text, const CallbackRegistry* callbacks) {
  return to_field(Reader(text).read_top(), callbacks);
}

ExprPtr parse_expr(std::string_view text, const CallbackRegistry* callbacks) {
  return to_expr(Reader(text).read_top(), callbacks);
}

FieldDescriptor parse_field_or_expr(std::string_view text, const CallbackRegistry* callbacks) {
  const SExpr top = Reader(text).read_top();
  if (head(top) == "field") return to_field(top, callbacks);
  ExprPtr body = to_expr(top, callbacks);
  const std::size_t dim = body->dim_in == 0 ? 1 : body->dim_in;
  return FieldDescriptor(body, dim);
}

}  // namespace carath
