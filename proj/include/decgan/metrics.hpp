#pragma once

#include "decgan/network.hpp"
#include "decgan/tensor.hpp"

#include <vector>

namespace decgan {

struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;
};

struct BinaryMetrics {
  double acc = 0.0;
  double sen = 0.0;
  double spe = 0.0;
  double f1 = 0.0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool undefined = false;
};

ConfusionCounts count_confusion(const std::vector<int>& predictions, const std::vector<int>& labels,
                                int positive_class);
BinaryMetrics metrics_from_counts(const ConfusionCounts& c);

// Throws UsageError on empty or mismatched input.
BinaryMetrics compute_metrics(const std::vector<int>& predictions, const std::vector<int>& labels,
                              int positive_class);

// Binary: positive class 1. More classes: one-vs-rest macro average, with
// ACC the plain fraction of correct predictions.
BinaryMetrics classification_metrics(const std::vector<int>& predictions,
                                     const std::vector<int>& labels, int n_classes);

// n_classes x n_classes, rows = true label, cols = prediction.
std::vector<std::vector<long>> confusion_matrix(const std::vector<int>& predictions,
                                                const std::vector<int>& labels, int n_classes);

// Mann-Whitney estimate of P(score_pos > score_neg), ties counted 1/2.
// Returns 0.5 when one class is absent.
double auc(const std::vector<double>& scores, const std::vector<bool>& positive);

// Throws DimensionError on shape mismatch.
double rmse(const Matrix& a, const Matrix& b);

double jaccard(const Circuit& a, const Circuit& b);

struct Recovery {
  double score = 0.0;
  bool empty_prediction = false;
};

// Mean over predicted circuits of their Jaccard with a greedily matched
// ground-truth circuit (largest Jaccard first, each truth used once).
Recovery circuit_recovery(const CircuitCollection& predicted, const CircuitCollection& truth);

}  // namespace decgan
