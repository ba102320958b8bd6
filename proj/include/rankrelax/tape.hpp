#pragma once

// Reverse-mode differentiation over dense arrays.
//
// A Tape records every operation applied to its variables. Nodes are appended
// in execution order, so the node list is already topologically sorted and
// backward() is a single reverse sweep. Gradients for fan-out are accumulated
// additively in node order, which makes repeated backward passes over the
// same tape bit-identical.
//
// A Tape is single-threaded. Independent tapes may run on different threads.

#include <cstddef>
#include <deque>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "rankrelax/array.hpp"

namespace rankrelax {

enum class OpKind {
  leaf,
  constant,
  matmul,
  add,
  sub,
  mul,
  div,
  scalar_mul,
  exp,
  log,
  log2,
  abs,
  sqrt,
  power_of_two_minus_one,
  softmax_rows,
  log_softmax_rows,
  sum,
  sum_axis,
  transpose,
  reshape,
  gather,
  tanh,
  sigmoid,
  softplus,
  clamp,
  normalize_rows,
  normalize_cols,
  suffix_logsumexp,
};

[[nodiscard]] std::string_view op_name(OpKind kind) noexcept;

// Non-array operands. Only the fields an operation documents are read.
struct OpAttrs {
  double scalar = 0.0;                                       // scalar_mul
  std::size_t axis = 0;                                      // sum_axis (result keeps the axis as size 1)
  double lo = -std::numeric_limits<double>::infinity();      // clamp
  double hi = std::numeric_limits<double>::infinity();       // clamp
  std::vector<std::size_t> indices;                          // gather
  Shape shape;                                               // reshape
};

// Evaluates one operation without recording anything.
// Throws ShapeError on non-conforming inputs and NonFiniteError when the
// result contains NaN or infinity.
[[nodiscard]] Array forward_op(OpKind kind, std::span<const Array* const> inputs, const OpAttrs& attrs = {});
[[nodiscard]] Array forward_op(OpKind kind, std::initializer_list<const Array*> inputs, const OpAttrs& attrs = {});

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;

  [[nodiscard]] const Array& value() const;
  [[nodiscard]] const Shape& shape() const { return value().shape(); }
  [[nodiscard]] std::size_t size() const { return value().size(); }
  [[nodiscard]] Tape* tape() const noexcept { return tape_; }
  [[nodiscard]] std::size_t id() const noexcept { return id_; }
  [[nodiscard]] bool attached() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Result of a backward pass: one gradient per node that the output depends on.
class Gradients {
 public:
  // Gradient with respect to `v`; zeros when the output does not depend on it.
  [[nodiscard]] Array wrt(const Var& v) const;

 private:
  friend class Tape;
  const Tape* tape_ = nullptr;
  std::vector<std::vector<double>> grads_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = delete;
  Tape& operator=(Tape&&) = delete;

  /// Differentiable input.
  Var variable(Array value);
  /// Input that never receives a gradient.
  Var constant(Array value);

  Var apply(OpKind kind, std::initializer_list<Var> inputs, const OpAttrs& attrs = {});

  /// d(output)/d(node) for every node; `output` must be a scalar on this tape.
  [[nodiscard]] Gradients backward(const Var& output) const;
  /// Vector-Jacobian product seeded with `seed` at `output` (same shape).
  [[nodiscard]] Gradients backward(const Var& output, const Array& seed) const;

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

 private:
  friend class Var;
  friend class Gradients;

  struct Node {
    OpKind kind;
    std::vector<std::size_t> inputs;
    OpAttrs attrs;
    Array value;
    Array saved;  // op-specific intermediate (row sums for the normalizations)
    bool needs_grad;
  };

  void check_owned(const Var& v, std::string_view what) const;
  void propagate(const Node& node, const std::vector<double>& upstream,
                 std::vector<std::vector<double>>& grads) const;

  // deque keeps node references stable while the tape grows.
  std::deque<Node> nodes_;
};

// Operation helpers. Each records one node on the tape of its first input.
Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var scalar_mul(const Var& a, double c);
Var exp(const Var& a);
Var log(const Var& a);
Var log2(const Var& a);
Var abs(const Var& a);
Var sqrt(const Var& a);
Var power_of_two_minus_one(const Var& a);
Var softmax_rows(const Var& a);
Var log_softmax_rows(const Var& a);
Var sum(const Var& a);
Var sum_axis(const Var& a, std::size_t axis);
Var transpose(const Var& a);
Var reshape(const Var& a, Shape shape);
Var gather(const Var& a, std::vector<std::size_t> indices);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var softplus(const Var& a);
/// Gradient is zero strictly outside [lo, hi].
Var clamp(const Var& a, double lo, double hi);
Var normalize_rows(const Var& a);
Var normalize_cols(const Var& a);
/// y_i = log(sum_{j >= i} exp(x_j)) for a vector x, computed stably.
Var suffix_logsumexp(const Var& a);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }
inline Var operator*(double c, const Var& a) { return scalar_mul(a, c); }
inline Var operator-(const Var& a) { return scalar_mul(a, -1.0); }

}  // namespace rankrelax
