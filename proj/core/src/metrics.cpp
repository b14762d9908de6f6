#include "sdt/metrics.hpp"

#include <fmt/format.h>

#include "sdt/error.hpp"

namespace sdt {

ConfusionMatrix::ConfusionMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : ConfusionMatrix(rows.size()) {
  std::size_t t = 0;
  for (const auto& row : rows) {
    if (row.size() != n_) throw InvalidArgument("confusion matrix must be square");
    std::size_t p = 0;
    for (std::int64_t v : row) add(t, p++, v);
    ++t;
  }
}

void ConfusionMatrix::add(std::size_t truth, std::size_t pred, std::int64_t n) {
  if (truth >= n_ || pred >= n_) throw InvalidArgument("class index out of range");
  if (n < 0) throw InvalidArgument("confusion counts must be non-negative");
  cells_[truth * n_ + pred] += n;
}

std::int64_t ConfusionMatrix::total() const noexcept {
  std::int64_t t = 0;
  for (std::int64_t v : cells_) t += v;
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw InvalidArgument("confusion matrices differ in size");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  return *this;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred,
                          std::size_t n_classes) {
  if (truth.size() != pred.size()) {
    throw InvalidArgument(fmt::format("length mismatch: {} truths vs {} predictions", truth.size(), pred.size()));
  }
  ConfusionMatrix m(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], pred[i]);
  return m;
}

double accuracy(const ConfusionMatrix& m) {
  const std::int64_t total = m.total();
  if (total == 0) throw InvalidArgument("accuracy of an empty confusion matrix");
  std::int64_t trace = 0;
  for (std::size_t c = 0; c < m.n_classes(); ++c) trace += m(c, c);
  return 100.0 * static_cast<double>(trace) / static_cast<double>(total);
}

double kappa(const ConfusionMatrix& m) {
  const std::int64_t total = m.total();
  if (total == 0) throw InvalidArgument("kappa of an empty confusion matrix");
  const double n = static_cast<double>(total);
  std::int64_t trace = 0;
  double pe = 0.0;
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    trace += m(c, c);
    std::int64_t row = 0, col = 0;
    for (std::size_t k = 0; k < m.n_classes(); ++k) {
      row += m(c, k);
      col += m(k, c);
    }
    pe += (static_cast<double>(row) / n) * (static_cast<double>(col) / n);
  }
  const double po = static_cast<double>(trace) / n;
  if (pe >= 1.0) return trace == total ? 100.0 : 0.0;
  return 100.0 * (po - pe) / (1.0 - pe);
}

ClassMetrics per_class_metrics(const ConfusionMatrix& m, std::size_t c) {
  if (c >= m.n_classes()) throw InvalidArgument("class index out of range");
  std::int64_t tp = m(c, c), fn = 0, fp = 0;
  for (std::size_t k = 0; k < m.n_classes(); ++k) {
    if (k == c) continue;
    fn += m(c, k);
    fp += m(k, c);
  }
  const std::int64_t tn = m.total() - tp - fn - fp;
  auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(tp, tp + fn), ratio(tn, tn + fp), ratio(tp, tp + fp)};
}

ClassMetrics macro_metrics(const ConfusionMatrix& m) {
  double sums[3] = {0, 0, 0};
  int counts[3] = {0, 0, 0};
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    const ClassMetrics pc = per_class_metrics(m, c);
    const std::optional<double> vals[3] = {pc.sensitivity, pc.specificity, pc.precision};
    for (int k = 0; k < 3; ++k) {
      if (vals[k]) {
        sums[k] += *vals[k];
        ++counts[k];
      }
    }
  }
  auto mean = [&](int k) -> std::optional<double> {
    if (counts[k] == 0) return std::nullopt;
    return sums[k] / counts[k];
  };
  return {mean(0), mean(1), mean(2)};
}

std::string format_percent(std::optional<double> v) {
  if (!v) return "";
  return fmt::format("{:.2f}", *v);
}

}  // namespace sdt
