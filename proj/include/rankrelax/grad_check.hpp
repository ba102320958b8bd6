#pragma once

#include <cstddef>
#include <functional>

#include "rankrelax/array.hpp"
#include "rankrelax/tape.hpp"

namespace rankrelax {

// Builds a scalar on `tape` from the differentiable input `x`.
using ScalarFunction = std::function<Var(Tape& tape, const Var& x)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  Array analytic;
  Array numeric;
};

/// Compares the tape gradient of `f` at `x` against central differences
/// (f(x + h e_i) - f(x - h e_i)) / 2h. The relative error per coordinate is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckResult grad_check(const ScalarFunction& f, const Array& x, double h = 1e-5);

/// Value of `f` at `x` on a fresh tape.
double evaluate(const ScalarFunction& f, const Array& x);

}  // namespace rankrelax
