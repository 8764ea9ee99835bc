#include "support.hpp"

#include "decgan/errors.hpp"
#include "decgan/trainer.hpp"

#include <doctest.h>

#include <set>

using namespace decgan;

namespace {

SyntheticData tiny_data(int per_class = 10) {
  SyntheticSpec s;
  s.n_nodes = 10;
  s.n_features = 12;
  s.samples_per_class = per_class;
  s.planted_circuits = {{0, 1, 2}, {3, 4, 5}};
  return generate_synthetic(s);
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.t = 2;
  c.k = 3;
  c.hidden = 6;
  c.selector_dim = 4;
  c.latent_dim = 4;
  c.generator_hidden = 8;
  c.batch_size = 4;
  c.epochs = 2;
  c.folds = 2;
  return c;
}

std::vector<const BrainNetwork*> first_n(const Dataset& d, std::size_t n) {
  std::vector<const BrainNetwork*> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(&d.subjects()[i * d.size() / n]);
  return out;
}

}  // namespace

TEST_CASE("config validation and json round-trip") {
  TrainConfig c = tiny_config();
  CHECK_NOTHROW(c.validate());
  TrainConfig bad = c;
  bad.lr_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.folds = 1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.gamma_cap = -0.1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  c.ablation = AblationVariant::mse;
  c.seed = 123456789012345ULL;
  nlohmann::json j = c;
  TrainConfig back;
  from_json(j, back);
  CHECK(nlohmann::json(back) == j);
  CHECK(back.ablation == AblationVariant::mse);
  CHECK(back.seed == c.seed);
  CHECK(parse_ablation("none") == AblationVariant::none);
  CHECK_THROWS(parse_ablation("bogus"));
}

TEST_CASE("one training step changes every module and keeps losses finite") {
  SyntheticData data = tiny_data();
  FoldTrainer trainer(tiny_config(), 10, 12, 2, 5);
  const NamedTensors before = trainer.state_tensors();
  auto batch = first_n(data.dataset, 4);
  StepLosses l = trainer.train_step(batch);
  for (double v : {l.analytic, l.capacity, l.decoupler, l.generator, l.discriminator})
    CHECK(std::isfinite(v));
  CHECK(std::abs(l.decoupler - (l.analytic + l.gamma * l.capacity)) < 1e-12);
  const NamedTensors after = trainer.state_tensors();
  std::set<std::string> changed;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (before[i].second != after[i].second) changed.insert(before[i].first.substr(0, 2));
  CHECK(changed.count("A."));
  CHECK(changed.count("G."));
  CHECK(changed.count("D."));
  CHECK(changed.count("M."));
}

TEST_CASE("zero capacity weight makes the decoupler loss equal the analytic loss") {
  SyntheticData data = tiny_data();
  for (AblationVariant v : {AblationVariant::cap, AblationVariant::none}) {
    TrainConfig c = tiny_config();
    if (v == AblationVariant::cap) c.gamma_cap = 0.0;
    c.ablation = v;
    FoldTrainer trainer(c, 10, 12, 2, 9);
    for (int e = 0; e < 2; ++e)
      for (const StepLosses& s : trainer.train_epoch(data.dataset)) CHECK(s.decoupler == s.analytic);
  }
}

TEST_CASE("training is deterministic in the seed") {
  SyntheticData data = tiny_data();
  auto run = [&] {
    FoldTrainer t(tiny_config(), 10, 12, 2, 21);
    std::vector<double> trace;
    for (int e = 0; e < 2; ++e)
      for (const StepLosses& s : t.train_epoch(data.dataset)) {
        trace.push_back(s.decoupler);
        trace.push_back(s.generator);
        trace.push_back(s.discriminator);
      }
    return trace;
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint resume equals uninterrupted training") {
  SyntheticData data = tiny_data();
  testing::TempDir dir("ckpt");
  FoldTrainer straight(tiny_config(), 10, 12, 2, 33);
  for (int e = 0; e < 3; ++e) straight.train_epoch(data.dataset);

  FoldTrainer first(tiny_config(), 10, 12, 2, 33);
  first.train_epoch(data.dataset);
  first.save(dir.path() / "mid");
  FoldTrainer resumed = FoldTrainer::load(dir.path() / "mid");
  CHECK(resumed.epoch() == 1);
  for (int e = 0; e < 2; ++e) resumed.train_epoch(data.dataset);

  const NamedTensors a = straight.state_tensors(), b = resumed.state_tensors();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second == b[i].second);
  }
  CHECK(straight.steps() == resumed.steps());
}

TEST_CASE("stratified folds partition the dataset") {
  std::vector<int> labels(200);
  for (int i = 0; i < 200; ++i) labels[i] = i % 2;
  auto folds = stratified_folds(labels, 5, 7);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    CHECK(f.size() == 40);
    int positives = 0;
    for (std::size_t i : f) {
      CHECK(all.insert(i).second);
      positives += labels[i];
    }
    CHECK(positives == 20);
  }
  CHECK(all.size() == 200);
  CHECK(stratified_folds(labels, 5, 7) == folds);
  CHECK(stratified_folds(labels, 5, 8) != folds);

  std::vector<int> few = {0, 0, 0, 0, 0, 1, 1, 1};
  CHECK_THROWS_AS(stratified_folds(few, 5, 1), ValidationError);
}

TEST_CASE("cross-validation report means are fold averages") {
  SyntheticData data = tiny_data();
  RunOptions opt;
  opt.truth = &data.truth;
  MetricsReport r = run_cv(data.dataset, tiny_config(), opt);
  REQUIRE(r.folds.size() == 2);
  double acc = 0.0, f1 = 0.0, a = 0.0, rec = 0.0;
  for (const FoldResult& f : r.folds) {
    acc += f.metrics.acc;
    f1 += f.metrics.f1;
    a += f.auc;
    REQUIRE(f.recovery.has_value());
    rec += *f.recovery;
    CHECK(f.epochs.size() == 2);
    CHECK(f.max_loss_identity_error < 1e-12);
    CHECK(f.test_indices.size() == 10);
    for (const EpochRecord& e : f.epochs) CHECK(std::isfinite(e.rmse));
  }
  CHECK(r.mean.acc == doctest::Approx(acc / 2));
  CHECK(r.mean.f1 == doctest::Approx(f1 / 2));
  CHECK(r.mean_auc == doctest::Approx(a / 2));
  CHECK(*r.mean_recovery == doctest::Approx(rec / 2));
  CHECK(r.mean.acc >= 0.0);
  CHECK(r.mean.acc <= 1.0);

  // parallel folds aggregate to the same numbers
  TrainConfig par = tiny_config();
  par.parallel_folds = 2;
  MetricsReport p = run_cv(data.dataset, par, opt);
  CHECK(report_to_csv(p) == report_to_csv(r));
  CHECK(rmse_curve_csv(p) == rmse_curve_csv(r));
}

TEST_CASE("sweep and ablation tables") {
  SyntheticData data = tiny_data(6);
  TrainConfig c = tiny_config();
  c.epochs = 1;
  auto rows = sweep_tk(data.dataset, c, {1, 2}, {2, 3});
  REQUIRE(rows.size() == 4);
  CHECK(rows[3].t == 2);
  CHECK(rows[3].k == 3);
  const std::string csv = sweep_to_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  auto ab = ablation(data.dataset, c);
  REQUIRE(ab.size() == 3);
  CHECK(ab[0].variant == AblationVariant::cap);
  CHECK(ab[1].variant == AblationVariant::mse);
  CHECK(ab[2].variant == AblationVariant::none);
  const std::string acsv = ablation_to_csv(ab);
  CHECK(acsv.find("\ncap,") != std::string::npos);
  CHECK(acsv.find("\nmse,") != std::string::npos);
  CHECK(acsv.find("\nnone,") != std::string::npos);

  // gamma 0 under cap matches the none variant exactly
  TrainConfig zero = c;
  zero.gamma_cap = 0.0;
  MetricsReport z = run_cv(data.dataset, zero);
  CHECK(report_to_csv(z) == report_to_csv(ab[2].report));
}
