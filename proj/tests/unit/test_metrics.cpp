#include "support.hpp"

#include "decgan/errors.hpp"
#include "decgan/metrics.hpp"

#include <doctest.h>

using namespace decgan;

TEST_CASE("confusion arithmetic") {
  ConfusionCounts c{3, 4, 1, 2};
  BinaryMetrics m = metrics_from_counts(c);
  CHECK(m.acc == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(m.sen == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(m.spe == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.f1 == doctest::Approx(2.0 * 0.75 * 0.6 / 1.35).epsilon(1e-14));
  CHECK(!m.undefined);

  // the same counts from label vectors
  std::vector<int> pred = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  std::vector<int> lab = {1, 1, 1, 0, 1, 1, 0, 0, 0, 0};
  BinaryMetrics v = compute_metrics(pred, lab, 1);
  CHECK(v.acc == m.acc);
  CHECK(v.f1 == m.f1);

  BinaryMetrics perfect = compute_metrics(lab, lab, 1);
  CHECK(perfect.acc == 1.0);
  CHECK(perfect.sen == 1.0);
  CHECK(perfect.spe == 1.0);
  CHECK(perfect.f1 == 1.0);

  BinaryMetrics all_pos = compute_metrics(std::vector<int>(10, 1), {1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, 1);
  CHECK(all_pos.spe == 0.0);

  BinaryMetrics no_pos = compute_metrics({0, 0}, {0, 0}, 1);
  CHECK(no_pos.sen == 0.0);
  CHECK(no_pos.undefined);

  CHECK_THROWS_AS(compute_metrics({}, {}, 1), UsageError);
  CHECK_THROWS_AS(compute_metrics({1}, {1, 0}, 1), UsageError);
}

TEST_CASE("multiclass macro averages and confusion matrix") {
  std::vector<int> pred = {0, 1, 2, 2, 1, 0};
  std::vector<int> lab = {0, 1, 2, 1, 1, 2};
  BinaryMetrics m = classification_metrics(pred, lab, 3);
  CHECK(m.acc == doctest::Approx(4.0 / 6.0));
  double sen = 0.0;
  for (int c = 0; c < 3; ++c) sen += compute_metrics(pred, lab, c).sen;
  CHECK(m.sen == doctest::Approx(sen / 3.0));
  auto cm = confusion_matrix(pred, lab, 3);
  CHECK(cm[1][2] == 1);
  CHECK(cm[2][0] == 1);
  CHECK(cm[1][1] == 2);
}

TEST_CASE("rank-based auc") {
  CHECK(auc({0.1, 0.2, 0.8, 0.9}, {false, false, true, true}) == 1.0);
  CHECK(auc({0.9, 0.8, 0.2, 0.1}, {false, false, true, true}) == 0.0);
  CHECK(auc({0.5, 0.5}, {true, false}) == 0.5);
  CHECK(auc({0.3, 0.4}, {true, true}) == 0.5);

  // brute-force pair counting
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<int> score(0, 9);
  std::bernoulli_distribution pos(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    std::vector<bool> p;
    for (int i = 0; i < 30; ++i) {
      s.push_back(score(gen));
      p.push_back(pos(gen));
    }
    double wins = 0.0, pairs = 0.0;
    for (int i = 0; i < 30; ++i)
      for (int j = 0; j < 30; ++j)
        if (p[i] && !p[j]) {
          pairs += 1.0;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    if (pairs == 0.0) continue;
    CHECK(auc(s, p) == doctest::Approx(wins / pairs).epsilon(1e-12));
  }
}

TEST_CASE("rmse") {
  std::mt19937_64 gen(5);
  Matrix a = testing::random_matrix(gen, 4, 6);
  Matrix b = testing::random_matrix(gen, 4, 6);
  CHECK(rmse(a, a) == 0.0);
  CHECK(rmse(Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 1.0)) == 2.0);
  double total = 0.0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 6; ++j) total += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
  CHECK(std::abs(rmse(a, b) - std::sqrt(total / 24.0)) < 1e-12);
  CHECK_THROWS_AS(rmse(a, Matrix::Zero(4, 5)), DimensionError);
}

TEST_CASE("circuit recovery") {
  CHECK(circuit_recovery({{0, 1, 2}, {3, 4}}, {{0, 1, 2}, {3, 4}}).score == 1.0);
  CHECK(circuit_recovery({{3, 4}, {0, 1, 2}}, {{0, 1, 2}, {3, 4}}).score == 1.0);
  CHECK(circuit_recovery({{5, 6}}, {{0, 1}}).score == 0.0);
  CHECK(circuit_recovery({{1, 2, 3, 4, 5}}, {{1, 2, 3, 4, 6}}).score ==
        doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  Recovery empty = circuit_recovery({{}, {}}, {{0, 1}});
  CHECK(empty.score == 0.0);
  CHECK(empty.empty_prediction);
  // greedy: the larger overlap claims the shared truth circuit first
  Recovery greedy = circuit_recovery({{0, 1, 2}, {0, 1}}, {{0, 1, 2}, {7}});
  CHECK(greedy.score == doctest::Approx(0.5));
}
