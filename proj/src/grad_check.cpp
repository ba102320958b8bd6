#include "rankrelax/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rankrelax/error.hpp"

namespace rankrelax {

double evaluate(const ScalarFunction& f, const Array& x) {
  Tape tape;
  const Var out = f(tape, tape.variable(x));
  const double value = out.value().item();
  if (!std::isfinite(value)) throw NonFiniteError("grad_check: function value is not finite");
  return value;
}

GradCheckResult grad_check(const ScalarFunction& f, const Array& x, double h) {
  if (!(h > 0.0)) throw DomainError("grad_check: step must be positive");

  GradCheckResult result;
  {
    Tape tape;
    const Var input = tape.variable(x);
    const Var out = f(tape, input);
    result.analytic = tape.backward(out).wrt(input);
  }

  std::vector<double> numeric(x.size());
  std::vector<double> probe = x.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double plus = evaluate(f, Array(x.shape(), probe));
    probe[i] = original - h;
    const double minus = evaluate(f, Array(x.shape(), probe));
    probe[i] = original;
    numeric[i] = (plus - minus) / (2.0 * h);
  }
  result.numeric = Array(x.shape(), std::move(numeric));

  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = result.analytic[i];
    const double n = result.numeric[i];
    const double err = std::fabs(a - n) / std::max({std::fabs(a), std::fabs(n), 1e-8});
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace rankrelax
