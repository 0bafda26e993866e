#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sslse::eval {

/// K x K counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  static ConfusionMatrix from_pairs(std::size_t classes, std::span<const int> truth, std::span<const int> predicted);

  void add(int truth, int predicted);

  std::size_t classes() const noexcept { return k_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
  std::uint64_t total() const noexcept;

  std::uint64_t true_positives(std::size_t c) const;
  std::uint64_t false_positives(std::size_t c) const;
  std::uint64_t false_negatives(std::size_t c) const;
  std::uint64_t true_negatives(std::size_t c) const;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

struct MetricsReport {
  std::string condition;
  double accuracy = 0.0;
  std::vector<double> per_class_f1;
  double macro_f1 = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  /// {"condition", "accuracy", "macro_f1", "per_class_f1", "n", "seed"}
  std::string to_json() const;
};

/// accuracy = trace / total; F1_c = 2TP / (2TP + FP + FN) one-vs-rest, 0 when
/// the denominator is 0; macro_f1 = mean over classes. Errors: EmptyMatrix.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

/// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const float> row);

}  // namespace sslse::eval
