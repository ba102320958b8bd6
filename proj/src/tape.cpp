#include "rankrelax/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "rankrelax/error.hpp"
#include "rankrelax/kernels.hpp"

namespace rankrelax {

std::string_view op_name(OpKind kind) noexcept {
  switch (kind) {
    case OpKind::leaf: return "leaf";
    case OpKind::constant: return "constant";
    case OpKind::matmul: return "matmul";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::scalar_mul: return "scalar_mul";
    case OpKind::exp: return "exp";
    case OpKind::log: return "log";
    case OpKind::log2: return "log2";
    case OpKind::abs: return "abs";
    case OpKind::sqrt: return "sqrt";
    case OpKind::power_of_two_minus_one: return "power_of_two_minus_one";
    case OpKind::softmax_rows: return "softmax_rows";
    case OpKind::log_softmax_rows: return "log_softmax_rows";
    case OpKind::sum: return "sum";
    case OpKind::sum_axis: return "sum_axis";
    case OpKind::transpose: return "transpose";
    case OpKind::reshape: return "reshape";
    case OpKind::gather: return "gather";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::softplus: return "softplus";
    case OpKind::clamp: return "clamp";
    case OpKind::normalize_rows: return "normalize_rows";
    case OpKind::normalize_cols: return "normalize_cols";
    case OpKind::suffix_logsumexp: return "suffix_logsumexp";
  }
  return "unknown";
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

int arity(OpKind kind) {
  switch (kind) {
    case OpKind::leaf:
    case OpKind::constant: return 0;
    case OpKind::matmul:
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
    case OpKind::div: return 2;
    default: return 1;
  }
}

[[noreturn]] void shape_error(OpKind kind, std::span<const Array* const> in, const std::string& detail) {
  std::string msg = std::string(op_name(kind)) + ": " + detail + " (input shapes";
  for (const Array* a : in) msg += " " + to_string(a->shape());
  throw ShapeError(msg + ")");
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Array unary(const Array& a, auto f) {
  std::vector<double> out(a.size());
  kernels::map(a.data(), out, f);
  return Array(a.shape(), std::move(out));
}

Array binary(const Array& a, const Array& b, auto f) {
  std::vector<double> out(a.size());
  kernels::zip(a.data(), b.data(), out, f);
  return Array(a.shape(), std::move(out));
}

void require_rank2(OpKind kind, std::span<const Array* const> in) {
  if (in[0]->rank() != 2) shape_error(kind, in, "expects a matrix");
}

void require_positive(OpKind kind, const Array& a) {
  for (double x : a.data()) {
    if (!(x > 0.0)) {
      throw DomainError(std::string(op_name(kind)) + ": requires strictly positive input, got " + std::to_string(x));
    }
  }
}

// Rank-1 arrays are treated as a single row by the row-wise operations.
std::pair<std::size_t, std::size_t> row_view(const Array& a) { return {a.rows(), a.cols()}; }

Array compute(OpKind kind, std::span<const Array* const> in, const OpAttrs& attrs, Array* saved) {
  if (static_cast<int>(in.size()) != arity(kind)) {
    throw ShapeError(std::string(op_name(kind)) + ": expected " + std::to_string(arity(kind)) + " inputs, got " +
                     std::to_string(in.size()));
  }
  switch (kind) {
    case OpKind::leaf:
    case OpKind::constant: throw ShapeError(std::string(op_name(kind)) + ": not an operation");

    case OpKind::matmul: {
      const Array& a = *in[0];
      const Array& b = *in[1];
      if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) shape_error(kind, in, "inner dimensions differ");
      std::vector<double> out(a.rows() * b.cols());
      kernels::matmul(a.data(), b.data(), out, a.rows(), a.cols(), b.cols());
      return Array::matrix(a.rows(), b.cols(), std::move(out));
    }
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
    case OpKind::div: {
      if (in[0]->shape() != in[1]->shape()) shape_error(kind, in, "shapes must match");
      switch (kind) {
        case OpKind::add: return binary(*in[0], *in[1], [](double x, double y) { return x + y; });
        case OpKind::sub: return binary(*in[0], *in[1], [](double x, double y) { return x - y; });
        case OpKind::mul: return binary(*in[0], *in[1], [](double x, double y) { return x * y; });
        default: return binary(*in[0], *in[1], [](double x, double y) { return x / y; });
      }
    }
    case OpKind::scalar_mul: {
      const double c = attrs.scalar;
      return unary(*in[0], [c](double x) { return c * x; });
    }
    case OpKind::exp: return unary(*in[0], [](double x) { return std::exp(x); });
    case OpKind::log:
      require_positive(kind, *in[0]);
      return unary(*in[0], [](double x) { return std::log(x); });
    case OpKind::log2:
      require_positive(kind, *in[0]);
      return unary(*in[0], [](double x) { return std::log2(x); });
    case OpKind::abs: return unary(*in[0], [](double x) { return std::fabs(x); });
    case OpKind::sqrt:
      for (double x : in[0]->data()) {
        if (x < 0.0) throw DomainError("sqrt: negative input " + std::to_string(x));
      }
      return unary(*in[0], [](double x) { return std::sqrt(x); });
    case OpKind::power_of_two_minus_one: return unary(*in[0], [](double x) { return std::expm1(x * kLn2); });
    case OpKind::softmax_rows:
    case OpKind::log_softmax_rows: {
      if (in[0]->rank() == 0) shape_error(kind, in, "expects a vector or matrix");
      auto [r, c] = row_view(*in[0]);
      std::vector<double> out(in[0]->size());
      if (kind == OpKind::softmax_rows) {
        kernels::softmax_rows(in[0]->data(), out, r, c);
      } else {
        kernels::log_softmax_rows(in[0]->data(), out, r, c);
      }
      return Array(in[0]->shape(), std::move(out));
    }
    case OpKind::sum: {
      double total = 0.0;
      for (double x : in[0]->data()) total += x;
      return Array::scalar(total);
    }
    case OpKind::sum_axis: {
      require_rank2(kind, in);
      const Array& a = *in[0];
      if (attrs.axis == 0) {
        std::vector<double> out(a.cols());
        kernels::col_sums(a.data(), out, a.rows(), a.cols());
        return Array::matrix(1, a.cols(), std::move(out));
      }
      if (attrs.axis == 1) {
        std::vector<double> out(a.rows());
        kernels::row_sums(a.data(), out, a.rows(), a.cols());
        return Array::matrix(a.rows(), 1, std::move(out));
      }
      shape_error(kind, in, "axis must be 0 or 1");
    }
    case OpKind::transpose: {
      require_rank2(kind, in);
      const Array& a = *in[0];
      std::vector<double> out(a.size());
      kernels::transpose(a.data(), out, a.rows(), a.cols());
      return Array::matrix(a.cols(), a.rows(), std::move(out));
    }
    case OpKind::reshape: {
      if (element_count(attrs.shape) != in[0]->size()) {
        shape_error(kind, in, "cannot reshape to " + to_string(attrs.shape));
      }
      return Array(attrs.shape, in[0]->values());
    }
    case OpKind::gather: {
      if (in[0]->rank() != 1) shape_error(kind, in, "expects a vector");
      if (attrs.indices.empty()) shape_error(kind, in, "needs at least one index");
      std::vector<double> out;
      out.reserve(attrs.indices.size());
      for (auto idx : attrs.indices) {
        if (idx >= in[0]->size()) shape_error(kind, in, "index " + std::to_string(idx) + " out of range");
        out.push_back((*in[0])[idx]);
      }
      return Array::vector(std::move(out));
    }
    case OpKind::tanh: return unary(*in[0], [](double x) { return std::tanh(x); });
    case OpKind::sigmoid: return unary(*in[0], stable_sigmoid);
    case OpKind::softplus: return unary(*in[0], stable_softplus);
    case OpKind::clamp: {
      if (!(attrs.lo <= attrs.hi)) throw DomainError("clamp: lower bound exceeds upper bound");
      const double lo = attrs.lo;
      const double hi = attrs.hi;
      return unary(*in[0], [lo, hi](double x) { return std::clamp(x, lo, hi); });
    }
    case OpKind::normalize_rows:
    case OpKind::normalize_cols: {
      require_rank2(kind, in);
      const Array& a = *in[0];
      std::vector<double> out(a.size());
      std::vector<double> sums(kind == OpKind::normalize_rows ? a.rows() : a.cols());
      if (kind == OpKind::normalize_rows) {
        kernels::normalize_rows(a.data(), out, sums, a.rows(), a.cols());
      } else {
        kernels::normalize_cols(a.data(), out, sums, a.rows(), a.cols());
      }
      for (double s : sums) {
        if (!(s > 0.0)) throw DomainError(std::string(op_name(kind)) + ": a row or column sums to zero");
      }
      if (saved != nullptr) *saved = Array::vector(std::move(sums));
      return Array(a.shape(), std::move(out));
    }
    case OpKind::suffix_logsumexp: {
      if (in[0]->rank() != 1) shape_error(kind, in, "expects a vector");
      const auto x = in[0]->data();
      const std::size_t n = x.size();
      std::vector<double> out(n);
      double acc = x[n - 1];
      out[n - 1] = acc;
      for (std::size_t i = n - 1; i-- > 0;) {
        const double hi = std::max(acc, x[i]);
        acc = hi + std::log(std::exp(acc - hi) + std::exp(x[i] - hi));
        out[i] = acc;
      }
      return Array::vector(std::move(out));
    }
  }
  throw ShapeError("unknown operation");
}

Array checked(OpKind kind, std::span<const Array* const> in, const OpAttrs& attrs, Array* saved) {
  Array out = compute(kind, in, attrs, saved);
  if (!out.all_finite()) {
    throw NonFiniteError(std::string(op_name(kind)) + ": produced a non-finite value");
  }
  return out;
}

std::vector<double>& slot(std::vector<std::vector<double>>& grads, std::size_t id, std::size_t size) {
  auto& g = grads[id];
  if (g.empty()) g.assign(size, 0.0);
  return g;
}

}  // namespace

Array forward_op(OpKind kind, std::span<const Array* const> inputs, const OpAttrs& attrs) {
  return checked(kind, inputs, attrs, nullptr);
}

Array forward_op(OpKind kind, std::initializer_list<const Array*> inputs, const OpAttrs& attrs) {
  return forward_op(kind, std::span<const Array* const>(inputs.begin(), inputs.size()), attrs);
}

const Array& Var::value() const {
  if (tape_ == nullptr) throw TapeError("variable is not attached to a tape");
  return tape_->nodes_.at(id_).value;
}

Array Gradients::wrt(const Var& v) const {
  if (tape_ == nullptr || v.tape() != tape_) throw TapeError("gradient requested for a variable of another tape");
  const auto& g = grads_.at(v.id());
  if (g.empty()) return Array::zeros(v.shape());
  return Array(v.shape(), g);
}

Var Tape::variable(Array value) {
  if (!value.all_finite()) throw NonFiniteError("leaf: input contains a non-finite value");
  nodes_.push_back(Node{OpKind::leaf, {}, {}, std::move(value), {}, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Array value) {
  if (!value.all_finite()) throw NonFiniteError("constant: input contains a non-finite value");
  nodes_.push_back(Node{OpKind::constant, {}, {}, std::move(value), {}, false});
  return Var(this, nodes_.size() - 1);
}

void Tape::check_owned(const Var& v, std::string_view what) const {
  if (v.tape() != this) {
    throw TapeError(std::string(what) + ": variable is detached or belongs to another tape");
  }
}

Var Tape::apply(OpKind kind, std::initializer_list<Var> inputs, const OpAttrs& attrs) {
  std::vector<const Array*> values;
  std::vector<std::size_t> ids;
  bool needs_grad = false;
  for (const Var& v : inputs) {
    check_owned(v, op_name(kind));
    values.push_back(&nodes_[v.id()].value);
    ids.push_back(v.id());
    needs_grad = needs_grad || nodes_[v.id()].needs_grad;
  }
  Array saved;
  Array out = checked(kind, values, attrs, &saved);
  nodes_.push_back(Node{kind, std::move(ids), attrs, std::move(out), std::move(saved), needs_grad});
  return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(const Var& output) const {
  check_owned(output, "backward");
  if (output.size() != 1) {
    throw TapeError("backward: output must be a scalar, got shape " + to_string(output.shape()));
  }
  return backward(output, Array(output.shape(), {1.0}));
}

Gradients Tape::backward(const Var& output, const Array& seed) const {
  check_owned(output, "backward");
  if (seed.size() != output.size()) {
    throw ShapeError("backward: seed shape " + to_string(seed.shape()) + " does not match output " +
                     to_string(output.shape()));
  }
  Gradients result;
  result.tape_ = this;
  result.grads_.resize(nodes_.size());
  result.grads_[output.id()] = seed.values();
  for (std::size_t id = output.id() + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!node.needs_grad || node.inputs.empty() || result.grads_[id].empty()) continue;
    propagate(node, result.grads_[id], result.grads_);
  }
  return result;
}

void Tape::propagate(const Node& node, const std::vector<double>& dy,
                     std::vector<std::vector<double>>& grads) const {
  const Node& in0 = nodes_[node.inputs[0]];
  const Array& x = in0.value;
  const Array& y = node.value;
  const std::size_t n = x.size();
  auto grad0 = [&]() -> std::vector<double>& { return slot(grads, node.inputs[0], n); };

  auto elementwise = [&](auto local) {
    if (!in0.needs_grad) return;
    auto& g = grad0();
    for (std::size_t i = 0; i < n; ++i) g[i] += dy[i] * local(x[i], y[i]);
  };

  switch (node.kind) {
    case OpKind::leaf:
    case OpKind::constant: return;

    case OpKind::matmul: {
      const Array& b = nodes_[node.inputs[1]].value;
      const std::size_t m = x.rows();
      const std::size_t k = x.cols();
      const std::size_t p = b.cols();
      if (in0.needs_grad) {
        std::vector<double> bt(b.size());
        kernels::transpose(b.data(), bt, k, p);
        std::vector<double> da(m * k);
        kernels::matmul(dy, bt, da, m, p, k);
        auto& g = grad0();
        for (std::size_t i = 0; i < da.size(); ++i) g[i] += da[i];
      }
      if (nodes_[node.inputs[1]].needs_grad) {
        std::vector<double> at(x.size());
        kernels::transpose(x.data(), at, m, k);
        std::vector<double> db(k * p);
        kernels::matmul(at, dy, db, k, m, p);
        auto& g = slot(grads, node.inputs[1], b.size());
        for (std::size_t i = 0; i < db.size(); ++i) g[i] += db[i];
      }
      return;
    }
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
    case OpKind::div: {
      const Node& in1 = nodes_[node.inputs[1]];
      const Array& b = in1.value;
      if (in0.needs_grad) {
        auto& g = grad0();
        for (std::size_t i = 0; i < n; ++i) {
          switch (node.kind) {
            case OpKind::mul: g[i] += dy[i] * b[i]; break;
            case OpKind::div: g[i] += dy[i] / b[i]; break;
            default: g[i] += dy[i]; break;
          }
        }
      }
      if (in1.needs_grad) {
        auto& g = slot(grads, node.inputs[1], n);
        for (std::size_t i = 0; i < n; ++i) {
          switch (node.kind) {
            case OpKind::add: g[i] += dy[i]; break;
            case OpKind::sub: g[i] -= dy[i]; break;
            case OpKind::mul: g[i] += dy[i] * x[i]; break;
            default: g[i] -= dy[i] * x[i] / (b[i] * b[i]); break;
          }
        }
      }
      return;
    }
    case OpKind::scalar_mul: {
      const double c = node.attrs.scalar;
      elementwise([c](double, double) { return c; });
      return;
    }
    case OpKind::exp: elementwise([](double, double yi) { return yi; }); return;
    case OpKind::log: elementwise([](double xi, double) { return 1.0 / xi; }); return;
    case OpKind::log2: elementwise([](double xi, double) { return 1.0 / (xi * kLn2); }); return;
    case OpKind::abs:
      elementwise([](double xi, double) { return xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0); });
      return;
    case OpKind::sqrt: elementwise([](double, double yi) { return yi > 0.0 ? 0.5 / yi : 0.0; }); return;
    case OpKind::power_of_two_minus_one: elementwise([](double, double yi) { return (yi + 1.0) * kLn2; }); return;
    case OpKind::tanh: elementwise([](double, double yi) { return 1.0 - yi * yi; }); return;
    case OpKind::sigmoid: elementwise([](double, double yi) { return yi * (1.0 - yi); }); return;
    case OpKind::softplus: elementwise([](double xi, double) { return stable_sigmoid(xi); }); return;
    case OpKind::clamp: {
      const double lo = node.attrs.lo;
      const double hi = node.attrs.hi;
      elementwise([lo, hi](double xi, double) { return (xi < lo || xi > hi) ? 0.0 : 1.0; });
      return;
    }
    case OpKind::softmax_rows: {
      if (!in0.needs_grad) return;
      auto [r, c] = row_view(x);
      auto& g = grad0();
      for (std::size_t i = 0; i < r; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += dy[i * c + j] * y[i * c + j];
        for (std::size_t j = 0; j < c; ++j) g[i * c + j] += y[i * c + j] * (dy[i * c + j] - dot);
      }
      return;
    }
    case OpKind::log_softmax_rows: {
      if (!in0.needs_grad) return;
      auto [r, c] = row_view(x);
      auto& g = grad0();
      for (std::size_t i = 0; i < r; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) total += dy[i * c + j];
        for (std::size_t j = 0; j < c; ++j) g[i * c + j] += dy[i * c + j] - std::exp(y[i * c + j]) * total;
      }
      return;
    }
    case OpKind::sum: {
      if (!in0.needs_grad) return;
      auto& g = grad0();
      for (std::size_t i = 0; i < n; ++i) g[i] += dy[0];
      return;
    }
    case OpKind::sum_axis: {
      if (!in0.needs_grad) return;
      const std::size_t r = x.rows();
      const std::size_t c = x.cols();
      auto& g = grad0();
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) g[i * c + j] += node.attrs.axis == 0 ? dy[j] : dy[i];
      }
      return;
    }
    case OpKind::transpose: {
      if (!in0.needs_grad) return;
      std::vector<double> back(n);
      kernels::transpose(dy, back, y.rows(), y.cols());
      auto& g = grad0();
      for (std::size_t i = 0; i < n; ++i) g[i] += back[i];
      return;
    }
    case OpKind::reshape: {
      if (!in0.needs_grad) return;
      auto& g = grad0();
      for (std::size_t i = 0; i < n; ++i) g[i] += dy[i];
      return;
    }
    case OpKind::gather: {
      if (!in0.needs_grad) return;
      auto& g = grad0();
      const auto& idx = node.attrs.indices;
      for (std::size_t t = 0; t < idx.size(); ++t) g[idx[t]] += dy[t];
      return;
    }
    case OpKind::normalize_rows: {
      if (!in0.needs_grad) return;
      const std::size_t r = x.rows();
      const std::size_t c = x.cols();
      const Array& sums = node.saved;
      auto& g = grad0();
      for (std::size_t i = 0; i < r; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += dy[i * c + j] * y[i * c + j];
        for (std::size_t j = 0; j < c; ++j) g[i * c + j] += (dy[i * c + j] - dot) / sums[i];
      }
      return;
    }
    case OpKind::normalize_cols: {
      if (!in0.needs_grad) return;
      const std::size_t r = x.rows();
      const std::size_t c = x.cols();
      const Array& sums = node.saved;
      std::vector<double> dot(c, 0.0);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) dot[j] += dy[i * c + j] * y[i * c + j];
      }
      auto& g = grad0();
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) g[i * c + j] += (dy[i * c + j] - dot[j]) / sums[j];
      }
      return;
    }
    case OpKind::suffix_logsumexp: {
      if (!in0.needs_grad) return;
      auto& g = grad0();
      // d y_i / d x_j = exp(x_j - y_i) for j >= i; every term is at most 1.
      for (std::size_t j = 0; j < n; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i <= j; ++i) total += dy[i] * std::exp(x[j] - y[i]);
        g[j] += total;
      }
      return;
    }
  }
}

namespace {

Var record(OpKind kind, std::initializer_list<Var> inputs, const OpAttrs& attrs = {}) {
  const Var& first = *inputs.begin();
  if (!first.attached()) throw TapeError(std::string(op_name(kind)) + ": variable is detached");
  return first.tape()->apply(kind, inputs, attrs);
}

}  // namespace

Var matmul(const Var& a, const Var& b) { return record(OpKind::matmul, {a, b}); }
Var add(const Var& a, const Var& b) { return record(OpKind::add, {a, b}); }
Var sub(const Var& a, const Var& b) { return record(OpKind::sub, {a, b}); }
Var mul(const Var& a, const Var& b) { return record(OpKind::mul, {a, b}); }
Var div(const Var& a, const Var& b) { return record(OpKind::div, {a, b}); }
Var scalar_mul(const Var& a, double c) {
  OpAttrs attrs;
  attrs.scalar = c;
  return record(OpKind::scalar_mul, {a}, attrs);
}
Var exp(const Var& a) { return record(OpKind::exp, {a}); }
Var log(const Var& a) { return record(OpKind::log, {a}); }
Var log2(const Var& a) { return record(OpKind::log2, {a}); }
Var abs(const Var& a) { return record(OpKind::abs, {a}); }
Var sqrt(const Var& a) { return record(OpKind::sqrt, {a}); }
Var power_of_two_minus_one(const Var& a) { return record(OpKind::power_of_two_minus_one, {a}); }
Var softmax_rows(const Var& a) { return record(OpKind::softmax_rows, {a}); }
Var log_softmax_rows(const Var& a) { return record(OpKind::log_softmax_rows, {a}); }
Var sum(const Var& a) { return record(OpKind::sum, {a}); }
Var sum_axis(const Var& a, std::size_t axis) {
  OpAttrs attrs;
  attrs.axis = axis;
  return record(OpKind::sum_axis, {a}, attrs);
}
Var transpose(const Var& a) { return record(OpKind::transpose, {a}); }
Var reshape(const Var& a, Shape shape) {
  OpAttrs attrs;
  attrs.shape = std::move(shape);
  return record(OpKind::reshape, {a}, attrs);
}
Var gather(const Var& a, std::vector<std::size_t> indices) {
  OpAttrs attrs;
  attrs.indices = std::move(indices);
  return record(OpKind::gather, {a}, attrs);
}
Var tanh(const Var& a) { return record(OpKind::tanh, {a}); }
Var sigmoid(const Var& a) { return record(OpKind::sigmoid, {a}); }
Var softplus(const Var& a) { return record(OpKind::softplus, {a}); }
Var clamp(const Var& a, double lo, double hi) {
  OpAttrs attrs;
  attrs.lo = lo;
  attrs.hi = hi;
  return record(OpKind::clamp, {a}, attrs);
}
Var normalize_rows(const Var& a) { return record(OpKind::normalize_rows, {a}); }
Var normalize_cols(const Var& a) { return record(OpKind::normalize_cols, {a}); }
Var suffix_logsumexp(const Var& a) { return record(OpKind::suffix_logsumexp, {a}); }

}  // namespace rankrelax
