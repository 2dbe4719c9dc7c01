#include "carath/field.hpp"

#include <algorithm>
#include <cmath>

#include "small_buffer.hpp"

#include "carath/errors.hpp"
#include "carath/linalg.hpp"

namespace carath {
namespace {

using Scratch = detail::SmallBuffer;

std::size_t merge_dim(std::size_t a, std::size_t b) {
  if (a == 0) return b;
  if (b == 0 || a == b) return a;
  throw DimensionError("sub-expressions disagree on the state dimension (" + std::to_string(a) + " vs " +
                       std::to_string(b) + ")");
}

ExprPtr make(ExprNode::Data data, Shape shape, std::size_t dim_in) {
  return std::make_shared<const ExprNode>(ExprNode{std::move(data), shape, dim_in});
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void eval_node(const ExprNode& n, double t, std::span<const double> x, std::span<double> out) {
  std::visit(
      overloaded{
          [&](const node::Constant& c) { std::copy(c.values.begin(), c.values.end(), out.begin()); },
          [&](const node::LinearInX& l) {
            const std::size_t cols = x.size();
            for (std::size_t r = 0; r < n.shape.rows; ++r) {
              double s = 0.0;
              for (std::size_t c = 0; c < cols; ++c) s += l.a[r * cols + c] * x[c];
              out[r] = s;
            }
          },
          [&](const node::TimeFunction& f) { out[0] = f.g(t); },
          [&](const node::ShiftCompose& s) {
            double u = t;
            for (std::size_t i = 0; i < s.a.size(); ++i) u += s.a[i] * x[i];
            out[0] = s.g(u);
          },
          [&](const node::Sum& s) {
            eval_node(*s.terms[0], t, x, out);
            Scratch tmp(out.size());
            for (std::size_t k = 1; k < s.terms.size(); ++k) {
              eval_node(*s.terms[k], t, x, tmp);
              for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
            }
          },
          [&](const node::ScalarScale& s) {
            eval_node(*s.e, t, x, out);
            for (double& v : out) v *= s.c;
          },
          [&](const node::Product& p) {
            double s = 0.0;
            eval_node(*p.s, t, x, std::span<double>(&s, 1));
            eval_node(*p.e, t, x, out);
            for (double& v : out) v *= s;
          },
          [&](const node::MatMul& m) {
            const Shape ls = m.lhs->shape, rs = m.rhs->shape;
            Scratch a(ls.size()), b(rs.size());
            eval_node(*m.lhs, t, x, a);
            eval_node(*m.rhs, t, x, b);
            for (std::size_t i = 0; i < ls.rows; ++i)
              for (std::size_t j = 0; j < rs.cols; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < ls.cols; ++k) s += a[i * ls.cols + k] * b[k * rs.cols + j];
                out[i * rs.cols + j] = s;
              }
          },
          [&](const node::MatrixAssemble& m) {
            for (std::size_t i = 0; i < m.entries.size(); ++i) eval_node(*m.entries[i], t, x, out.subspan(i, 1));
          },
          [&](const node::Translate& tr) { eval_node(*tr.e, t + tr.tau, x, out); },
          [&](const node::Callback& cb) { cb.fn(t, x, out); },
      },
      n.data);
}

void collect_breakpoints(const ExprNode& n, double t0, double t1, std::span<const double> xa,
                         std::span<const double> xb, std::vector<double>& out) {
  std::visit(overloaded{
                 [&](const node::TimeFunction& f) { f.g.breakpoints(t0, t1, out); },
                 [&](const node::ShiftCompose& s) {
                   double u0 = t0, u1 = t1;
                   for (std::size_t i = 0; i < s.a.size(); ++i) {
                     u0 += s.a[i] * xa[i];
                     u1 += s.a[i] * xb[i];
                   }
                   if (u0 == u1) return;
                   std::vector<double> us;
                   s.g.breakpoints(std::min(u0, u1), std::max(u0, u1), us);
                   for (double u : us) out.push_back(t0 + (u - u0) / (u1 - u0) * (t1 - t0));
                 },
                 [&](const node::Sum& s) {
                   for (const auto& e : s.terms) collect_breakpoints(*e, t0, t1, xa, xb, out);
                 },
                 [&](const node::ScalarScale& s) { collect_breakpoints(*s.e, t0, t1, xa, xb, out); },
                 [&](const node::Product& p) {
                   collect_breakpoints(*p.s, t0, t1, xa, xb, out);
                   collect_breakpoints(*p.e, t0, t1, xa, xb, out);
                 },
                 [&](const node::MatMul& m) {
                   collect_breakpoints(*m.lhs, t0, t1, xa, xb, out);
                   collect_breakpoints(*m.rhs, t0, t1, xa, xb, out);
                 },
                 [&](const node::MatrixAssemble& m) {
                   for (const auto& e : m.entries) collect_breakpoints(*e, t0, t1, xa, xb, out);
                 },
                 [&](const node::Translate& tr) {
                   const std::size_t first = out.size();
                   collect_breakpoints(*tr.e, t0 + tr.tau, t1 + tr.tau, xa, xb, out);
                   for (std::size_t i = first; i < out.size(); ++i) out[i] -= tr.tau;
                 },
                 [&](const auto&) {},
             },
             n.data);
}

// Jacobian with respect to x of a vector-valued node, as an M x N expression.
ExprPtr jacobian_expr(const ExprPtr& e, std::size_t dim) {
  const Shape shape = e->shape;
  if (!shape.is_vector()) throw UnsupportedError("Jacobian is only defined for vector-valued expressions");
  const std::size_t m = shape.rows;
  return std::visit(
      overloaded{
          [&](const node::Constant&) { return expr::zero({m, dim}); },
          [&](const node::LinearInX& l) { return expr::constant({m, dim}, l.a); },
          [&](const node::TimeFunction&) { return expr::zero({1, dim}); },
          [&](const node::ShiftCompose& s) -> ExprPtr {
            auto d = s.g.derivative();
            if (!d) throw UnsupportedError("time function has no derivative in the primitive vocabulary");
            if (dim == 1) return expr::scale(s.a[0], expr::shift(*d, s.a));
            return expr::product(expr::shift(*d, s.a), expr::constant({1, dim}, s.a));
          },
          [&](const node::Sum& s) {
            std::vector<ExprPtr> terms;
            for (const auto& t : s.terms) terms.push_back(jacobian_expr(t, dim));
            return expr::sum(std::move(terms));
          },
          [&](const node::ScalarScale& s) { return expr::scale(s.c, jacobian_expr(s.e, dim)); },
          [&](const node::Product& p) {
            return expr::sum({expr::product(p.s, jacobian_expr(p.e, dim)), expr::matmul(p.e, jacobian_expr(p.s, dim))});
          },
          [&](const node::MatMul& mm) -> ExprPtr {
            if (mm.lhs->dim_in != 0) throw UnsupportedError("Jacobian of a product with state-dependent left factor");
            return expr::matmul(mm.lhs, jacobian_expr(mm.rhs, dim));
          },
          [&](const node::MatrixAssemble& a) -> ExprPtr {
            std::vector<ExprPtr> entries;
            for (const auto& entry : a.entries) {
              ExprPtr row = jacobian_expr(entry, dim);
              if (dim == 1) {
                entries.push_back(row);
                continue;
              }
              for (std::size_t c = 0; c < dim; ++c) {
                std::vector<double> unit(dim, 0.0);
                unit[c] = 1.0;
                entries.push_back(expr::matmul(row, expr::constant({dim, 1}, unit)));
              }
            }
            return expr::assemble(m, dim, std::move(entries));
          },
          [&](const node::Translate& tr) { return expr::translate(tr.tau, jacobian_expr(tr.e, dim)); },
          [&](const node::Callback& cb) -> ExprPtr {
            throw UnsupportedError("callback '" + cb.name + "' has no declared Jacobian");
          },
      },
      e->data);
}

}  // namespace

const char* to_string(ClassClaim c) {
  switch (c) {
    case ClassClaim::LC:
      return "LC";
    case ClassClaim::SC:
      return "SC";
    case ClassClaim::ThetaC:
      return "ThetaC";
  }
  return "?";
}

namespace expr {

ExprPtr constant(Shape shape, std::vector<double> values) {
  if (values.size() != shape.size()) throw DimensionError("constant: value count does not match shape");
  return make(node::Constant{std::move(values)}, shape, 0);
}

ExprPtr constant(double c) { return constant({1, 1}, {c}); }

ExprPtr zero(Shape shape) { return constant(shape, std::vector<double>(shape.size(), 0.0)); }

ExprPtr linear(std::size_t rows, std::size_t cols, std::vector<double> a) {
  if (rows == 0 || cols == 0 || a.size() != rows * cols) throw DimensionError("linear: matrix size mismatch");
  return make(node::LinearInX{std::move(a)}, {rows, 1}, cols);
}

ExprPtr time(ScalarFunction g) { return make(node::TimeFunction{std::move(g)}, {1, 1}, 0); }

ExprPtr shift(ScalarFunction g, std::vector<double> a) {
  if (a.empty()) throw DimensionError("shift: projection vector is empty");
  const std::size_t n = a.size();
  return make(node::ShiftCompose{std::move(g), std::move(a)}, {1, 1}, n);
}

ExprPtr sum(std::vector<ExprPtr> terms) {
  if (terms.empty()) throw DimensionError("sum: no terms");
  const Shape shape = terms[0]->shape;
  std::size_t dim = 0;
  for (const auto& t : terms) {
    if (!(t->shape == shape)) throw DimensionError("sum: terms have different shapes");
    dim = merge_dim(dim, t->dim_in);
  }
  return make(node::Sum{std::move(terms)}, shape, dim);
}

ExprPtr scale(double c, ExprPtr e) {
  const Shape shape = e->shape;
  const std::size_t dim = e->dim_in;
  return make(node::ScalarScale{c, std::move(e)}, shape, dim);
}

ExprPtr product(ExprPtr s, ExprPtr e) {
  if (s->shape.size() != 1) throw DimensionError("product: left factor must be scalar-valued");
  const Shape shape = e->shape;
  const std::size_t dim = merge_dim(s->dim_in, e->dim_in);
  return make(node::Product{std::move(s), std::move(e)}, shape, dim);
}

ExprPtr matmul(ExprPtr lhs, ExprPtr rhs) {
  if (lhs->shape.cols != rhs->shape.rows) throw DimensionError("matmul: inner dimensions differ");
  const Shape shape{lhs->shape.rows, rhs->shape.cols};
  const std::size_t dim = merge_dim(lhs->dim_in, rhs->dim_in);
  return make(node::MatMul{std::move(lhs), std::move(rhs)}, shape, dim);
}

ExprPtr assemble(std::size_t rows, std::size_t cols, std::vector<ExprPtr> entries) {
  if (rows == 0 || cols == 0 || entries.size() != rows * cols) throw DimensionError("assemble: entry count mismatch");
  std::size_t dim = 0;
  for (const auto& e : entries) {
    if (e->shape.size() != 1) throw DimensionError("assemble: entries must be scalar-valued");
    dim = merge_dim(dim, e->dim_in);
  }
  return make(node::MatrixAssemble{std::move(entries)}, {rows, cols}, dim);
}

ExprPtr translate(double tau, ExprPtr e) {
  if (tau == 0.0) return e;
  const Shape shape = e->shape;
  const std::size_t dim = e->dim_in;
  return make(node::Translate{tau, std::move(e)}, shape, dim);
}

ExprPtr callback(std::string name, Shape shape, std::size_t dim_in, CallbackFn fn) {
  if (!fn) throw DimensionError("callback: empty evaluator");
  return make(node::Callback{std::move(name), std::move(fn)}, shape, dim_in);
}

}  // namespace expr

FieldDescriptor::FieldDescriptor(ExprPtr expr, std::size_t dim_in, double p, ClassClaim claim,
                                 std::shared_ptr<const FieldDescriptor> jacobian)
    : expr_(std::move(expr)), base_(expr_), dim_in_(dim_in), p_(p), claim_(claim), jacobian_(std::move(jacobian)) {
  if (!expr_) throw DimensionError("field: null expression");
  if (dim_in_ == 0) throw DimensionError("field: state dimension must be positive");
  if (expr_->dim_in != 0 && expr_->dim_in != dim_in_)
    throw DimensionError("field: expression reads " + std::to_string(expr_->dim_in) + " state components, field has " +
                         std::to_string(dim_in_));
  if (!(p_ >= 1.0) || !std::isfinite(p_)) throw DimensionError("field: exponent p must be finite and >= 1");
  if (jacobian_) {
    if (jacobian_->dim_in() != dim_in_ || !(jacobian_->shape() == Shape{dim_out(), dim_in_}))
      throw DimensionError("field: declared Jacobian has the wrong shape");
  }
}

FieldDescriptor FieldDescriptor::keep_shift(FieldDescriptor g) const {
  g.base_ = base_;
  g.shift_ = shift_;
  return g;
}

FieldDescriptor FieldDescriptor::with_jacobian(FieldDescriptor jac) const {
  return keep_shift(FieldDescriptor(expr_, dim_in_, p_, claim_, std::make_shared<const FieldDescriptor>(std::move(jac))));
}

FieldDescriptor FieldDescriptor::with_claim(ClassClaim claim) const {
  return keep_shift(FieldDescriptor(expr_, dim_in_, p_, claim, jacobian_));
}

FieldDescriptor FieldDescriptor::with_p(double p) const {
  return keep_shift(FieldDescriptor(expr_, dim_in_, p, claim_, jacobian_));
}

std::vector<double> FieldDescriptor::evaluate(double t, std::span<const double> x) const {
  std::vector<double> out(dim_out());
  evaluate_into(t, x, out);
  return out;
}

void FieldDescriptor::evaluate_into(double t, std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_in_)
    throw DimensionError("evaluate: state has " + std::to_string(x.size()) + " components, field expects " +
                         std::to_string(dim_in_));
  if (out.size() != dim_out()) throw DimensionError("evaluate: output buffer has the wrong size");
  eval_node(*expr_, t, x, out);
}

double FieldDescriptor::norm_at(double t, std::span<const double> x) const {
  Scratch v(dim_out());
  evaluate_into(t, x, v);
  return value_norm(v, shape());
}

void evaluate_expr(const ExprNode& e, double t, std::span<const double> x, std::span<double> out) {
  if (out.size() != e.shape.size()) throw DimensionError("evaluate: output buffer has the wrong size");
  if (e.dim_in != 0 && x.size() != e.dim_in) throw DimensionError("evaluate: state dimension mismatch");
  eval_node(e, t, x, out);
}

double value_norm(std::span<const double> v, Shape shape) {
  if (shape.is_vector()) return euclidean_norm(v);
  return operator_norm(v, shape.rows, shape.cols);
}

FieldDescriptor translate(const FieldDescriptor& f, double tau) {
  std::shared_ptr<const FieldDescriptor> jac;
  if (f.jacobian()) jac = std::make_shared<const FieldDescriptor>(translate(*f.jacobian(), tau));
  // One Translate node over the untranslated expression; shifts add up here.
  const double shift = f.shift_ + tau;
  FieldDescriptor g(expr::translate(shift, f.base_), f.dim_in(), f.p(), f.class_claim(), std::move(jac));
  g.base_ = f.base_;
  g.shift_ = shift;
  return g;
}

FieldDescriptor jacobian_field(const FieldDescriptor& f) {
  if (f.jacobian()) return *f.jacobian();
  return FieldDescriptor(jacobian_expr(f.expr(), f.dim_in()), f.dim_in(), f.p(), ClassClaim::SC);
}

FieldDescriptor difference(const FieldDescriptor& f, const FieldDescriptor& g) {
  if (!(f.shape() == g.shape()) || f.dim_in() != g.dim_in())
    throw DimensionError("difference: fields have different dimensions");
  return FieldDescriptor(expr::sum({f.expr(), expr::scale(-1.0, g.expr())}), f.dim_in(), f.p(), ClassClaim::SC);
}

void segment_breakpoints(const FieldDescriptor& f, double t0, double t1, std::span<const double> xa,
                         std::span<const double> xb, std::vector<double>& out) {
  if (t1 < t0) {
    std::swap(t0, t1);
    std::swap(xa, xb);
  }
  const std::size_t first = out.size();
  collect_breakpoints(*f.expr(), t0, t1, xa, xb, out);
  auto begin = out.begin() + static_cast<std::ptrdiff_t>(first);
  auto end = std::remove_if(begin, out.end(), [&](double t) { return !(t > t0 && t < t1); });
  std::sort(begin, end);
  out.erase(std::unique(begin, end), out.end());
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (&a == &b) return true;
  if (a.data.index() != b.data.index() || !(a.shape == b.shape) || a.dim_in != b.dim_in) return false;
  auto eq = [](const ExprPtr& x, const ExprPtr& y) { return structurally_equal(*x, *y); };
  auto eq_list = [&](const std::vector<ExprPtr>& x, const std::vector<ExprPtr>& y) {
    return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), eq);
  };
  return std::visit(
      overloaded{
          [&](const node::Constant& x) { return x.values == std::get<node::Constant>(b.data).values; },
          [&](const node::LinearInX& x) { return x.a == std::get<node::LinearInX>(b.data).a; },
          [&](const node::TimeFunction& x) { return x.g == std::get<node::TimeFunction>(b.data).g; },
          [&](const node::ShiftCompose& x) {
            const auto& y = std::get<node::ShiftCompose>(b.data);
            return x.g == y.g && x.a == y.a;
          },
          [&](const node::Sum& x) { return eq_list(x.terms, std::get<node::Sum>(b.data).terms); },
          [&](const node::ScalarScale& x) {
            const auto& y = std::get<node::ScalarScale>(b.data);
            return x.c == y.c && eq(x.e, y.e);
          },
          [&](const node::Product& x) {
            const auto& y = std::get<node::Product>(b.data);
            return eq(x.s, y.s) && eq(x.e, y.e);
          },
          [&](const node::MatMul& x) {
            const auto& y = std::get<node::MatMul>(b.data);
            return eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
          },
          [&](const node::MatrixAssemble& x) {
            return eq_list(x.entries, std::get<node::MatrixAssemble>(b.data).entries);
          },
          [&](const node::Translate& x) {
            const auto& y = std::get<node::Translate>(b.data);
            return x.tau == y.tau && eq(x.e, y.e);
          },
          [&](const node::Callback& x) { return x.name == std::get<node::Callback>(b.data).name; },
      },
      a.data);
}

bool structurally_equal(const FieldDescriptor& a, const FieldDescriptor& b) {
  if (a.dim_in() != b.dim_in() || a.p() != b.p() || a.class_claim() != b.class_claim()) return false;
  if (!structurally_equal(*a.expr(), *b.expr())) return false;
  if ((a.jacobian() == nullptr) != (b.jacobian() == nullptr)) return false;
  return a.jacobian() == nullptr || structurally_equal(*a.jacobian(), *b.jacobian());
}

RampExample ramp_example(double p) {
  const double third = 1.0 / 3.0;
  FieldDescriptor F(expr::scale(third, expr::shift(ScalarFunction::ramp_wave(), {third})), 1, p, ClassClaim::SC);
  FieldDescriptor G(expr::scale(third, expr::shift(ScalarFunction::step_wave(), {third})), 1, p, ClassClaim::ThetaC);
  FieldDescriptor f(expr::shift(ScalarFunction::ramp_integral(), {third}), 1, p, ClassClaim::LC,
                    std::make_shared<const FieldDescriptor>(F));
  FieldDescriptor g(expr::shift(ScalarFunction::step_integral(), {third}), 1, p, ClassClaim::LC,
                    std::make_shared<const FieldDescriptor>(G));
  return {f, F, g, G};
}

}  // namespace carath
