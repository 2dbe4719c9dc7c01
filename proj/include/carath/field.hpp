#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "carath/scalar_function.hpp"

namespace carath {

struct Shape {
  std::size_t rows = 1;
  std::size_t cols = 1;

  std::size_t size() const { return rows * cols; }
  bool is_vector() const { return cols == 1; }
  bool operator==(const Shape&) const = default;
};

/// Regularity class a descriptor claims: locally Lipschitz, continuous in x,
/// or continuous only along modulus-constrained curves.
enum class ClassClaim { LC, SC, ThetaC };

const char* to_string(ClassClaim c);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Opaque user evaluator: writes f(t, x) into `out` (size = declared shape).
using CallbackFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

namespace node {
struct Constant {
  std::vector<double> values;
};
/// x -> A x, A row-major rows x cols.
struct LinearInX {
  std::vector<double> a;
};
struct TimeFunction {
  ScalarFunction g;
};
/// (t, x) -> g(t + <a, x>)
struct ShiftCompose {
  ScalarFunction g;
  std::vector<double> a;
};
struct Sum {
  std::vector<ExprPtr> terms;
};
struct ScalarScale {
  double c;
  ExprPtr e;
};
/// scalar-valued `s` times `e`
struct Product {
  ExprPtr s;
  ExprPtr e;
};
struct MatMul {
  ExprPtr lhs;
  ExprPtr rhs;
};
/// rows x cols, each entry scalar-valued, row-major
struct MatrixAssemble {
  std::vector<ExprPtr> entries;
};
struct Translate {
  double tau;
  ExprPtr e;
};
struct Callback {
  std::string name;
  CallbackFn fn;
};
}  // namespace node

struct ExprNode {
  using Data = std::variant<node::Constant, node::LinearInX, node::TimeFunction, node::ShiftCompose, node::Sum,
                            node::ScalarScale, node::Product, node::MatMul, node::MatrixAssemble, node::Translate,
                            node::Callback>;
  Data data;
  Shape shape;
  /// State dimension the node requires; 0 when it does not read x.
  std::size_t dim_in = 0;
};

// Expression builders. They validate shapes and throw DimensionError.
namespace expr {
ExprPtr constant(Shape shape, std::vector<double> values);
ExprPtr constant(double c);
ExprPtr zero(Shape shape);
ExprPtr linear(std::size_t rows, std::size_t cols, std::vector<double> a);
ExprPtr time(ScalarFunction g);
ExprPtr shift(ScalarFunction g, std::vector<double> a);
ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr scale(double c, ExprPtr e);
ExprPtr product(ExprPtr s, ExprPtr e);
ExprPtr matmul(ExprPtr lhs, ExprPtr rhs);
ExprPtr assemble(std::size_t rows, std::size_t cols, std::vector<ExprPtr> entries);
/// Nested translations are merged into one node.
ExprPtr translate(double tau, ExprPtr e);
ExprPtr callback(std::string name, Shape shape, std::size_t dim_in, CallbackFn fn);
}  // namespace expr

/// Immutable Caratheodory vector field f: R x R^N -> R^{rows x cols}.
class FieldDescriptor {
 public:
  FieldDescriptor(ExprPtr expr, std::size_t dim_in, double p = 1.0, ClassClaim claim = ClassClaim::LC,
                  std::shared_ptr<const FieldDescriptor> jacobian = nullptr);

  const ExprPtr& expr() const { return expr_; }
  std::size_t dim_in() const { return dim_in_; }
  Shape shape() const { return expr_->shape; }
  std::size_t dim_out() const { return expr_->shape.size(); }
  double p() const { return p_; }
  ClassClaim class_claim() const { return claim_; }
  /// Declared Jacobian, or nullptr.
  const FieldDescriptor* jacobian() const { return jacobian_.get(); }
  const std::shared_ptr<const FieldDescriptor>& jacobian_ptr() const { return jacobian_; }

  FieldDescriptor with_jacobian(FieldDescriptor jac) const;
  FieldDescriptor with_claim(ClassClaim claim) const;
  FieldDescriptor with_p(double p) const;

  std::vector<double> evaluate(double t, std::span<const double> x) const;
  /// Allocation-free for small shapes; `out.size()` must equal dim_out().
  void evaluate_into(double t, std::span<const double> x, std::span<double> out) const;
  /// Norm of f(t, x): Euclidean for vectors, operator 2-norm for matrices.
  double norm_at(double t, std::span<const double> x) const;

 private:
  friend FieldDescriptor translate(const FieldDescriptor& f, double tau);
  FieldDescriptor keep_shift(FieldDescriptor g) const;

  ExprPtr expr_;
  /// expr_ is base_ translated by shift_.
  ExprPtr base_;
  double shift_ = 0.0;
  std::size_t dim_in_;
  double p_;
  ClassClaim claim_;
  std::shared_ptr<const FieldDescriptor> jacobian_;
};

/// Evaluates a bare expression node; `x` and `out` must match its dimensions.
void evaluate_expr(const ExprNode& e, double t, std::span<const double> x, std::span<double> out);

/// Norm of a value of the given shape.
double value_norm(std::span<const double> v, Shape shape);

/// (s, x) -> f(s + tau, x). Jacobian is translated along. Shifts accumulate on
/// the descriptor, so translate(translate(f, s), t) and translate(f, s + t)
/// are structurally equal for an untranslated f.
FieldDescriptor translate(const FieldDescriptor& f, double tau);

/// Declared Jacobian, or one derived from the primitive rules.
FieldDescriptor jacobian_field(const FieldDescriptor& f);

/// f - g, keeping f's exponent.
FieldDescriptor difference(const FieldDescriptor& f, const FieldDescriptor& g);

/// Times in the open interval (t0, t1) where the straight segment
/// (t, xa + (xb - xa)(t - t0)/(t1 - t0)) crosses a declared breakpoint of f.
void segment_breakpoints(const FieldDescriptor& f, double t0, double t1, std::span<const double> xa,
                         std::span<const double> xb, std::vector<double>& out);

/// Deep structural equality (callbacks compare by name).
bool structurally_equal(const ExprNode& a, const ExprNode& b);
bool structurally_equal(const FieldDescriptor& a, const FieldDescriptor& b);

/// The ramp example: f(t,x) = h(t + x/3), F = f_x = (1/3) H(t + x/3), and the
/// limits g(t,x) = hbar(t + x/3), G = (1/3) Hbar(t + x/3) of their 4k-translates.
struct RampExample {
  FieldDescriptor f;
  FieldDescriptor F;
  FieldDescriptor g;
  FieldDescriptor G;
};
RampExample ramp_example(double p = 1.0);

}  // namespace carath
