#include "sslse/eval/metrics.hpp"

#include "json.hpp"
#include "sslse/error.hpp"

namespace sslse::eval {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : k_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw Error(Errc::InvalidSpec, "confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_pairs(std::size_t classes, std::span<const int> truth,
                                            std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error(Errc::ShapeMismatch, "truth and prediction counts differ");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= k_ || static_cast<std::size_t>(predicted) >= k_) {
    throw Error(Errc::LabelOutOfRange, "class pair (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                                           ") outside a " + std::to_string(k_) + "-class matrix");
  }
  counts_[static_cast<std::size_t>(truth) * k_ + static_cast<std::size_t>(predicted)] += 1;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::true_positives(std::size_t c) const { return at(c, c); }

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t t = 0; t < k_; ++t) {
    if (t != c) s += at(t, c);
  }
  return s;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) {
    if (p != c) s += at(c, p);
  }
  return s;
}

std::uint64_t ConfusionMatrix::true_negatives(std::size_t c) const {
  return total() - true_positives(c) - false_positives(c) - false_negatives(c);
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(Errc::EmptyMatrix, "no samples in confusion matrix");
  MetricsReport r;
  r.n = total;
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < cm.classes(); ++c) trace += cm.at(c, c);
  r.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const std::uint64_t tp = cm.true_positives(c);
    const std::uint64_t denom = 2 * tp + cm.false_positives(c) + cm.false_negatives(c);
    const double f1 = denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
    r.per_class_f1.push_back(f1);
    f1_sum += f1;
  }
  r.macro_f1 = f1_sum / static_cast<double>(cm.classes());
  return r;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["condition"] = condition;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["per_class_f1"] = per_class_f1;
  j["n"] = n;
  j["seed"] = seed;
  return j.dump();
}

int argmax(std::span<const float> row) {
  int best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace sslse::eval
