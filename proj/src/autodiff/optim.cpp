#include "sslse/autodiff/optim.hpp"

#include <cmath>
#include <string>

#include "sslse/error.hpp"

namespace sslse::ad {

template <typename T>
void adam_step(std::span<Tensor<T>> params, AdamState<T>& state, const AdamOptions& options) {
  if (state.first_moment.empty() && state.second_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.shape());
      state.second_moment.emplace_back(p.shape());
    }
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw Error(Errc::ShapeMismatch, "adam_step: state holds " + std::to_string(state.first_moment.size()) +
                                         " moments for " + std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.first_moment[i].shape() != params[i].shape() || state.second_moment[i].shape() != params[i].shape()) {
      throw Error(Errc::ShapeMismatch, "adam_step: moment shape differs from parameter " + std::to_string(i));
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(options.beta1);
  const T b2 = static_cast<T>(options.beta2);
  const T correction1 = static_cast<T>(1.0 - std::pow(options.beta1, t));
  const T correction2 = static_cast<T>(1.0 - std::pow(options.beta2, t));
  const T lr = static_cast<T>(options.learning_rate);
  const T eps = static_cast<T>(options.epsilon);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto value = params[i].data();
    auto grad = std::as_const(params[i]).grad();
    auto m = state.first_moment[i].data();
    auto v = state.second_moment[i].data();
    for (std::size_t j = 0; j < value.size(); ++j) {
      const T g = grad.empty() ? T{0} : grad[j];
      m[j] = b1 * m[j] + (T{1} - b1) * g;
      v[j] = b2 * v[j] + (T{1} - b2) * g * g;
      const T m_hat = m[j] / correction1;
      const T v_hat = v[j] / correction2;
      value[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template <typename T>
void sgd_step(std::span<Tensor<T>> params, double learning_rate) {
  const T lr = static_cast<T>(learning_rate);
  for (auto& p : params) {
    auto grad = std::as_const(p).grad();
    if (grad.empty()) continue;
    auto value = p.data();
    for (std::size_t j = 0; j < value.size(); ++j) value[j] -= lr * grad[j];
  }
}

template void adam_step(std::span<Tensor<float>>, AdamState<float>&, const AdamOptions&);
template void adam_step(std::span<Tensor<double>>, AdamState<double>&, const AdamOptions&);
template void sgd_step(std::span<Tensor<float>>, double);
template void sgd_step(std::span<Tensor<double>>, double);

}  // namespace sslse::ad
