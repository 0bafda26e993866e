#include "sslse/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sslse::ad {

template <typename T>
double max_grad_error(const LossFn<T>& loss, std::span<Tensor<T>> inputs, double eps) {
  for (auto& x : inputs) {
    x.set_requires_grad(true);
    x.zero_grad();
  }
  std::vector<std::vector<T>> analytic;
  {
    Tape<T> tape;
    Tensor<T> value = loss(tape);
    tape.backward(value);
    for (auto& x : inputs) {
      analytic.emplace_back(x.grad().begin(), x.grad().end());
      x.zero_grad();
    }
  }

  auto evaluate = [&] {
    Tape<T> tape(false);
    return static_cast<double>(loss(tape).item());
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto data = inputs[k].data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const T original = data[i];
      data[i] = static_cast<T>(original + eps);
      const double plus = evaluate();
      data[i] = static_cast<T>(original - eps);
      const double minus = evaluate();
      data[i] = original;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double a = static_cast<double>(analytic[k][i]);
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

template <typename T>
double grad_check(const std::function<Tensor<T>(Tape<T>&, const Tensor<T>&)>& f, Tensor<T> x, double eps) {
  std::vector<Tensor<T>> inputs{x};
  return max_grad_error<T>([&](Tape<T>& tape) { return f(tape, x); }, inputs, eps);
}

template double max_grad_error(const LossFn<float>&, std::span<Tensor<float>>, double);
template double max_grad_error(const LossFn<double>&, std::span<Tensor<double>>, double);
template double grad_check(const std::function<Tensor<float>(Tape<float>&, const Tensor<float>&)>&,
                           Tensor<float>, double);
template double grad_check(const std::function<Tensor<double>(Tape<double>&, const Tensor<double>&)>&,
                           Tensor<double>, double);

}  // namespace sslse::ad
