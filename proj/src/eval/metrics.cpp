#include "wearssl/eval/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wearssl::eval {

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions, const std::vector<int>& labels,
                                 std::size_t n_classes) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("predictions and labels differ in length");
  ConfusionMatrix cm(n_classes, std::vector<std::uint64_t>(n_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int a = labels[i], p = predictions[i];
    if (a < 0 || p < 0 || static_cast<std::size_t>(a) >= n_classes || static_cast<std::size_t>(p) >= n_classes)
      throw std::invalid_argument("class code out of range at row " + std::to_string(i));
    ++cm[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)];
  }
  return cm;
}

F1Scores f1_scores(const ConfusionMatrix& cm) {
  const std::size_t K = cm.size();
  F1Scores out;
  std::uint64_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const std::uint64_t tp = cm[k][k];
    std::uint64_t fp = 0, fn = 0;
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      fp += cm[j][k];
      fn += cm[k][j];
    }
    const std::uint64_t denom = 2 * tp + fp + fn;
    out.per_class.push_back(denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom));
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  double sum = 0.0;
  for (double f : out.per_class) sum += f;
  out.macro = K == 0 ? 0.0 : sum / static_cast<double>(K);
  const std::uint64_t denom = 2 * tp_all + fp_all + fn_all;
  out.micro = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp_all) / static_cast<double>(denom);
  return out;
}

F1Scores f1_scores(const std::vector<int>& predictions, const std::vector<int>& labels, std::size_t n_classes) {
  return f1_scores(confusion_matrix(predictions, labels, n_classes));
}

double accuracy(const ConfusionMatrix& cm) {
  std::uint64_t hit = 0, all = 0;
  for (std::size_t a = 0; a < cm.size(); ++a)
    for (std::size_t p = 0; p < cm[a].size(); ++p) {
      all += cm[a][p];
      if (a == p) hit += cm[a][p];
    }
  return all == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(all);
}

Interval aggregate_runs(std::span<const double> scores, double confidence) {
  if (scores.size() < 2) throw std::invalid_argument("aggregate_runs needs at least 2 runs");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  Interval out;
  out.n = scores.size();
  const double n = static_cast<double>(out.n);
  if (std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores.front(); })) {
    out.mean = scores.front();
    return out;
  }
  for (double s : scores) out.mean += s;
  out.mean /= n;
  double ss = 0.0;
  for (double s : scores) ss += (s - out.mean) * (s - out.mean);
  out.stddev = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  out.half_width = t * out.stddev / std::sqrt(n);
  return out;
}

}  // namespace wearssl::eval
