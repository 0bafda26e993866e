#include "sslse/ssl/ntxent.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sslse/error.hpp"

namespace sslse::ssl {

namespace {
template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

template <typename T>
ad::Tensor<T> nt_xent_loss(ad::Tape<T>& tape, const ad::Tensor<T>& z, double temperature) {
  if (!(temperature > 0.0)) throw Error(Errc::NonPositiveTemperature, "temperature must be > 0");
  if (z.rank() != 2 || z.dim(0) == 0 || z.dim(0) % 2 != 0) {
    throw Error(Errc::ShapeMismatch, "nt_xent_loss expects 2N x d rows, got " + ad::shape_string(z.shape()));
  }
  const std::size_t rows = z.dim(0), d = z.dim(1);
  Eigen::Map<const RowMat<T>> zm(z.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows; ++i) {
    const double norm = static_cast<double>(zm.row(static_cast<Eigen::Index>(i)).norm());
    if (std::abs(norm - 1.0) > 1e-4) {
      throw Error(Errc::NonUnitRows, "row " + std::to_string(i) + " has norm " + std::to_string(norm));
    }
  }

  const T inv_tau = static_cast<T>(1.0 / temperature);
  RowMat<T> sim = (zm * zm.transpose()) * inv_tau;
  // probs(i, k): softmax of row i over k != i; the diagonal stays 0.
  RowMat<T> probs = RowMat<T>::Zero(sim.rows(), sim.cols());
  T total{0};
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    const Eigen::Index pos = i ^ 1;
    T mx = -std::numeric_limits<T>::infinity();
    for (Eigen::Index k = 0; k < sim.cols(); ++k) {
      if (k != i) mx = std::max(mx, sim(i, k));
    }
    T se{0};
    for (Eigen::Index k = 0; k < sim.cols(); ++k) {
      if (k == i) continue;
      probs(i, k) = std::exp(sim(i, k) - mx);
      se += probs(i, k);
    }
    probs.row(i) /= se;
    total += (mx + std::log(se)) - sim(i, pos);
  }

  ad::Tensor<T> out(ad::Shape{1}, tape.wants({&z}));
  out[0] = total / static_cast<T>(rows);
  if (out.requires_grad()) {
    tape.record(out, [zn = z.node(), on = out.node(), probs = std::move(probs), rows, d, inv_tau] {
      // dL/dS(i,k) = (P(i,k) - [k == p(i)]) / 2N, S = Z Z^T / tau.
      RowMat<T> g = probs;
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, i ^ 1) -= T{1};
      g *= on->grad[0] / static_cast<T>(rows);
      if (zn->grad.empty()) zn->grad.assign(zn->value.size(), T{0});
      Eigen::Map<const RowMat<T>> zv(zn->value.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
      Eigen::Map<RowMat<T>> dz(zn->grad.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
      dz.noalias() += ((g + g.transpose()) * zv) * inv_tau;
    });
  }
  return out;
}

template ad::Tensor<float> nt_xent_loss(ad::Tape<float>&, const ad::Tensor<float>&, double);
template ad::Tensor<double> nt_xent_loss(ad::Tape<double>&, const ad::Tensor<double>&, double);

}  // namespace sslse::ssl
