#include "decgan/metrics.hpp"

#include "decgan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace decgan {

namespace {

void check_inputs(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.empty()) throw UsageError("metrics: empty input");
  if (predictions.size() != labels.size()) throw UsageError("metrics: length mismatch");
}

double ratio(long num, long den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts count_confusion(const std::vector<int>& predictions, const std::vector<int>& labels,
                                int positive_class) {
  check_inputs(predictions, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == positive_class;
    const bool predicted = predictions[i] == positive_class;
    if (actual && predicted) ++c.tp;
    if (!actual && !predicted) ++c.tn;
    if (!actual && predicted) ++c.fp;
    if (actual && !predicted) ++c.fn;
  }
  return c;
}

BinaryMetrics metrics_from_counts(const ConfusionCounts& c) {
  BinaryMetrics m;
  m.acc = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn, m.undefined);
  m.sen = ratio(c.tp, c.tp + c.fn, m.undefined);
  m.spe = ratio(c.tn, c.tn + c.fp, m.undefined);
  bool precision_undefined = false;
  const double precision = ratio(c.tp, c.tp + c.fp, precision_undefined);
  m.undefined = m.undefined || precision_undefined;
  if (precision + m.sen > 0.0) {
    m.f1 = 2.0 * precision * m.sen / (precision + m.sen);
  } else {
    m.f1 = 0.0;
    m.undefined = true;
  }
  return m;
}

BinaryMetrics compute_metrics(const std::vector<int>& predictions, const std::vector<int>& labels,
                              int positive_class) {
  return metrics_from_counts(count_confusion(predictions, labels, positive_class));
}

BinaryMetrics classification_metrics(const std::vector<int>& predictions,
                                     const std::vector<int>& labels, int n_classes) {
  if (n_classes <= 2) return compute_metrics(predictions, labels, 1);
  check_inputs(predictions, labels);
  BinaryMetrics macro;
  for (int c = 0; c < n_classes; ++c) {
    const BinaryMetrics m = compute_metrics(predictions, labels, c);
    macro.sen += m.sen;
    macro.spe += m.spe;
    macro.f1 += m.f1;
    macro.undefined = macro.undefined || m.undefined;
  }
  macro.sen /= n_classes;
  macro.spe /= n_classes;
  macro.f1 /= n_classes;
  long correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  macro.acc = static_cast<double>(correct) / static_cast<double>(labels.size());
  return macro;
}

std::vector<std::vector<long>> confusion_matrix(const std::vector<int>& predictions,
                                                const std::vector<int>& labels, int n_classes) {
  check_inputs(predictions, labels);
  std::vector<std::vector<long>> m(static_cast<std::size_t>(n_classes),
                                   std::vector<long>(static_cast<std::size_t>(n_classes), 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes || predictions[i] < 0 ||
        predictions[i] >= n_classes) {
      throw UsageError("confusion_matrix: class index out of range");
    }
    ++m[labels[i]][predictions[i]];
  }
  return m;
}

double auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw UsageError("auc: length mismatch");
  // average ranks handle ties
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double rank_sum = 0.0;
  long n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (positive[i]) {
      rank_sum += rank[i];
      ++n_pos;
    }
  }
  const long n_neg = static_cast<long>(scores.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const double u = rank_sum - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double rmse(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("rmse: shape mismatch");
  if (a.size() == 0) throw DimensionError("rmse: empty matrices");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double jaccard(const Circuit& a, const Circuit& b) {
  const std::set<int> sa(a.begin(), a.end());
  const std::set<int> sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (int v : sa) inter += sb.count(v);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Recovery circuit_recovery(const CircuitCollection& predicted, const CircuitCollection& truth) {
  Recovery out;
  const bool nothing = std::all_of(predicted.begin(), predicted.end(),
                                   [](const Circuit& c) { return c.empty(); });
  if (nothing || truth.empty()) {
    out.empty_prediction = true;
    return out;
  }
  struct Pair {
    double score;
    std::size_t pred;
    std::size_t truth;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    for (std::size_t q = 0; q < truth.size(); ++q) pairs.push_back({jaccard(predicted[p], truth[q]), p, q});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.score > b.score; });
  std::vector<bool> pred_used(predicted.size(), false);
  std::vector<bool> truth_used(truth.size(), false);
  double total = 0.0;
  for (const Pair& pr : pairs) {
    if (pred_used[pr.pred] || truth_used[pr.truth]) continue;
    pred_used[pr.pred] = true;
    truth_used[pr.truth] = true;
    total += pr.score;
  }
  out.score = total / static_cast<double>(predicted.size());
  return out;
}

}  // namespace decgan
