#include "decgan/trainer.hpp"

#include "decgan/errors.hpp"
#include "decgan/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace decgan {

using nlohmann::json;

std::string to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::cap:
      return "cap";
    case AblationVariant::mse:
      return "mse";
    case AblationVariant::none:
      return "none";
  }
  return "cap";
}

AblationVariant parse_ablation(const std::string& s) {
  if (s == "cap") return AblationVariant::cap;
  if (s == "mse") return AblationVariant::mse;
  if (s == "none") return AblationVariant::none;
  throw ValidationError("unknown ablation variant '" + s + "' (expected cap, mse or none)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& why) { throw ValidationError("train config: " + why); };
  if (!(lr_m > 0 && lr_a > 0 && lr_g > 0 && lr_d > 0)) fail("learning rates must be positive");
  if (!(gamma_cap >= 0)) fail("gamma_cap must be nonnegative");
  if (batch_size < 1) fail("batch_size must be positive");
  if (epochs < 0) fail("epochs must be nonnegative");
  if (t < 1) fail("t must be at least 1");
  if (k < 1) fail("k must be at least 1");
  if (folds < 2) fail("folds must be at least 2");
  if (!(tau > 0)) fail("tau must be positive");
  if (hidden < 1 || selector_dim < 1 || latent_dim < 1 || generator_hidden < 1) {
    fail("layer widths must be positive");
  }
  if (analytic_layers < 1) fail("analytic_layers must be at least 1");
  if (parallel_folds < 1) fail("parallel_folds must be at least 1");
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"gamma_cap", c.gamma_cap},
           {"lr_m", c.lr_m},
           {"lr_a", c.lr_a},
           {"lr_g", c.lr_g},
           {"lr_d", c.lr_d},
           {"beta1", c.beta1},
           {"beta2", c.beta2},
           {"adam_eps", c.adam_eps},
           {"batch_size", c.batch_size},
           {"epochs", c.epochs},
           {"t", c.t},
           {"k", c.k},
           {"folds", c.folds},
           {"seed", c.seed},
           {"ablation", to_string(c.ablation)},
           {"hidden", c.hidden},
           {"selector_dim", c.selector_dim},
           {"gamma_dec", c.gamma_dec},
           {"tau", c.tau},
           {"analytic_layers", c.analytic_layers},
           {"latent_dim", c.latent_dim},
           {"generator_hidden", c.generator_hidden}};
}

void from_json(const json& j, TrainConfig& c) {
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("gamma_cap", c.gamma_cap);
  take("lr_m", c.lr_m);
  take("lr_a", c.lr_a);
  take("lr_g", c.lr_g);
  take("lr_d", c.lr_d);
  take("beta1", c.beta1);
  take("beta2", c.beta2);
  take("adam_eps", c.adam_eps);
  take("batch_size", c.batch_size);
  take("epochs", c.epochs);
  take("t", c.t);
  take("k", c.k);
  take("folds", c.folds);
  take("seed", c.seed);
  if (j.contains("ablation")) c.ablation = parse_ablation(j.at("ablation").get<std::string>());
  take("hidden", c.hidden);
  take("selector_dim", c.selector_dim);
  take("gamma_dec", c.gamma_dec);
  take("tau", c.tau);
  take("analytic_layers", c.analytic_layers);
  take("latent_dim", c.latent_dim);
  take("generator_hidden", c.generator_hidden);
}

// --- FoldTrainer --------------------------------------------------------------

namespace {

DecouplerConfig decoupler_config(const TrainConfig& c) {
  return {c.t, c.k, c.hidden, c.selector_dim, c.gamma_dec, c.tau};
}

AdamConfig adam(const TrainConfig& c, double lr) { return {lr, c.beta1, c.beta2, c.adam_eps}; }

// Builds each module from its own derived stream so their initial values do
// not depend on one another's sizes.
Rng module_rng(std::uint64_t seed, std::uint64_t module) { return Rng(derive_seed(seed, module)); }

template <class Module>
Module make_module(std::uint64_t seed, std::uint64_t id, auto&&... args) {
  Rng rng = module_rng(seed, id);
  return Module(std::forward<decltype(args)>(args)..., rng);
}

Tensor mean_tensor(const std::vector<Tensor>& xs) {
  Tensor acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
  return scale(acc, 1.0 / static_cast<double>(xs.size()));
}

void require_finite_loss(double v, const char* name, long batch_index) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("non-finite ") + name + " in batch " +
                       std::to_string(batch_index));
  }
}

}  // namespace

FoldTrainer::FoldTrainer(const TrainConfig& config, Index n_nodes, Index n_features, int n_classes,
                         std::uint64_t seed)
    : config_(config),
      n_nodes_(n_nodes),
      n_features_(n_features),
      n_classes_(n_classes),
      seed_(seed),
      rng_(derive_seed(seed, 0)),
      decoupler_(make_module<Decoupler>(seed, 1, decoupler_config(config), n_features)),
      analytic_(make_module<AnalyticModule>(
          seed, 2, AnalyticConfig{config.analytic_layers, config.hidden, n_classes},
          static_cast<Index>(config.hidden))),
      generator_(make_module<Generator>(
          seed, 3, GeneratorConfig{config.latent_dim, config.generator_hidden, config.hidden},
          n_nodes, static_cast<Index>(config.hidden), n_features)),
      discriminator_(make_module<Discriminator>(seed, 4, DiscriminatorConfig{config.hidden},
                                                n_features)),
      opt_m_(decoupler_.params(), adam(config, config.lr_m)),
      opt_a_(analytic_.params(), adam(config, config.lr_a)),
      opt_g_(generator_.params(), adam(config, config.lr_g)),
      opt_d_(discriminator_.params(), adam(config, config.lr_d)) {
  config_.validate();
}

StepLosses FoldTrainer::train_step(std::span<const BrainNetwork* const> batch, long batch_index) {
  if (batch.empty()) throw UsageError("train_step: empty batch");
  const char* phase = "analytic loss";
  try {
    StepLosses losses;
    Tape tape;
    const std::vector<Tensor> pm = decoupler_.params().bind(tape, true);
    const std::vector<Tensor> pa = analytic_.params().bind(tape, true);

    // (1)-(2) decouple every network and score it
    std::vector<DecouplingTrace> real;
    std::vector<Tensor> anl_terms;
    real.reserve(batch.size());
    for (const BrainNetwork* net : batch) {
      real.push_back(decoupler_.forward(pm, tape.constant(net->features()), net->adjacency()));
      Tensor probs = analytic_.forward(pa, real.back().sparse_features, real.back().incidence);
      anl_terms.push_back(analytic_loss(probs, net->label()));
    }
    Tensor l_anl = mean_tensor(anl_terms);
    losses.analytic = l_anl.item();
    require_finite_loss(losses.analytic, "analytic loss", batch_index);

    // (3)-(5) adversarial pair on the detached decoupling outputs
    phase = "adversarial loss";
    std::vector<Matrix> latents;
    {
      Tape adv;
      const std::vector<Tensor> pg = generator_.params().bind(adv, true);
      const std::vector<Tensor> pd = discriminator_.params().bind(adv, true);
      std::vector<Tensor> d_real;
      std::vector<Tensor> d_fake;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        latents.push_back(generator_.sample_latent(rng_));
        const DecouplingOutput& dec = real[b].output;
        Tensor base = generator_.generate_base(pg, adv.constant(latents.back()));
        Tensor stitched = stitch_adjacency(base, dec);
        std::vector<Tensor> sparse;
        for (const Matrix& f : dec.sparse_features) sparse.push_back(adv.constant(f));
        Tensor x_bar = mean_reconstruction_input(sparse, adv.constant(dec.supplement_features));
        Tensor x_hat = generator_.reconstruct_features(pg, stitched, x_bar);
        d_fake.push_back(discriminator_.forward(pd, x_hat, stitched));
        d_real.push_back(discriminator_.forward(pd, adv.constant(batch[b]->features()),
                                                adv.constant(batch[b]->adjacency())));
      }
      Tensor l_d = adv_loss_d(d_real, d_fake);
      Tensor l_g = adv_loss_g(d_fake);
      losses.discriminator = l_d.item();
      losses.generator = l_g.item();
      require_finite_loss(losses.discriminator, "discriminator loss", batch_index);
      require_finite_loss(losses.generator, "generator loss", batch_index);
      const std::vector<Matrix> grad_d = adv.gradient(l_d, pd);
      const std::vector<Matrix> grad_g = adv.gradient(l_g, pg);
      opt_d_.step(discriminator_.params(), grad_d);
      opt_g_.step(generator_.params(), grad_g);
    }

    // (6) decouple the reconstruction from the updated generator
    phase = "sparse capacity loss";
    std::vector<Tensor> cap_terms;
    double hard_spatial = 0.0;
    double hard_spectral = 0.0;
    {
      Tape gen_tape;
      const std::vector<Tensor> pg = generator_.params().bind(gen_tape, false);
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const DecouplingOutput& dec = real[b].output;
        Tensor base = generator_.generate_base(pg, gen_tape.constant(latents[b]));
        Tensor stitched = stitch_adjacency(base, dec);
        std::vector<Tensor> sparse;
        for (const Matrix& f : dec.sparse_features) sparse.push_back(gen_tape.constant(f));
        Tensor x_bar =
            mean_reconstruction_input(sparse, gen_tape.constant(dec.supplement_features));
        Tensor x_hat = generator_.reconstruct_features(pg, stitched, x_bar);

        DecouplingTrace fake =
            decoupler_.forward(pm, tape.constant(x_hat.value()), stitched.value());
        SparseCapacity cap = sparse_capacity_loss(dec.circuits, fake.output.circuits,
                                                  real[b].soft_incidence, fake.soft_incidence);
        hard_spatial += cap.hard_spatial_similarity;
        hard_spectral += cap.hard_spectral_similarity;
        if (config_.ablation == AblationVariant::mse) {
          cap_terms.push_back(membership_mse(real[b].soft_incidence, fake.soft_incidence));
        } else {
          cap_terms.push_back(cap.loss);
        }
      }
    }
    Tensor l_cap = mean_tensor(cap_terms);
    losses.capacity = l_cap.item();
    losses.gamma = config_.effective_gamma();
    losses.hard_spatial = hard_spatial / static_cast<double>(batch.size());
    losses.hard_spectral = hard_spectral / static_cast<double>(batch.size());
    require_finite_loss(losses.capacity, "sparse capacity loss", batch_index);

    // (7) analytic module on L_anl, decoupler on L_anl + gamma L_cap
    phase = "decoupler loss";
    Tensor l_m = add(l_anl, scale(l_cap, losses.gamma));
    losses.decoupler = l_m.item();
    require_finite_loss(losses.decoupler, "decoupler loss", batch_index);
    const std::vector<Matrix> grad_a = tape.gradient(l_anl, pa);
    const std::vector<Matrix> grad_m = tape.gradient(l_m, pm);
    opt_a_.step(analytic_.params(), grad_a);
    opt_m_.step(decoupler_.params(), grad_m);
    ++steps_;
    return losses;
  } catch (const DomainError& e) {
    throw NumericError(std::string("non-finite value while computing ") + phase + " in batch " +
                       std::to_string(batch_index) + ": " + e.what());
  }
}

std::vector<StepLosses> FoldTrainer::train_epoch(const Dataset& train) {
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng_.shuffle(order);
  std::vector<StepLosses> out;
  const auto bs = static_cast<std::size_t>(config_.batch_size);
  for (std::size_t start = 0; start < order.size(); start += bs) {
    std::vector<const BrainNetwork*> batch;
    for (std::size_t i = start; i < std::min(order.size(), start + bs); ++i) {
      batch.push_back(&train.subjects()[order[i]]);
    }
    out.push_back(train_step(batch, static_cast<long>(start / bs)));
  }
  ++epoch_;
  return out;
}

Prediction FoldTrainer::predict(const BrainNetwork& network) const {
  Prediction p;
  p.decoupling = decoupler_.decouple(network);
  p.probabilities = analytic_.probabilities(
      p.decoupling.sparse_features,
      incidence_matrix(embed_circuits(p.decoupling.circuits, network.n_nodes())));
  Index best = 0;
  p.probabilities.row(0).maxCoeff(&best);
  p.label = static_cast<int>(best);
  return p;
}

double FoldTrainer::reconstruction_rmse(const BrainNetwork& network, Rng& latent_rng) const {
  const DecouplingOutput dec = decoupler_.decouple(network);
  const Matrix base = generator_.generate_base(generator_.sample_latent(latent_rng));
  return rmse(stitch_adjacency(base, dec), network.adjacency());
}

NamedTensors FoldTrainer::state_tensors() const {
  NamedTensors out;
  auto append = [&](NamedTensors more) {
    for (auto& t : more) out.push_back(std::move(t));
  };
  append(decoupler_.params().to_named("M."));
  append(analytic_.params().to_named("A."));
  append(generator_.params().to_named("G."));
  append(discriminator_.params().to_named("D."));
  append(opt_m_.to_named("adam.M."));
  append(opt_a_.to_named("adam.A."));
  append(opt_g_.to_named("adam.G."));
  append(opt_d_.to_named("adam.D."));
  return out;
}

void FoldTrainer::save(const std::filesystem::path& path) const {
  std::filesystem::path tensors = path;
  tensors += ".ckpt";
  std::filesystem::path meta = path;
  meta += ".json";
  save_tensors(tensors, state_tensors());
  json j = {{"format_version", 1},
            {"config", config_},
            {"epoch", epoch_},
            {"steps", steps_},
            {"seed", seed_},
            {"n_nodes", n_nodes_},
            {"n_features", n_features_},
            {"n_classes", n_classes_},
            {"rng_state", rng_.state()}};
  std::ofstream out(meta, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + meta.string());
  out << j.dump(2) << '\n';
}

FoldTrainer FoldTrainer::load(const std::filesystem::path& path) {
  std::filesystem::path tensors = path;
  tensors += ".ckpt";
  std::filesystem::path meta = path;
  meta += ".json";
  std::ifstream in(meta);
  if (!in) throw FormatError("cannot open checkpoint metadata " + meta.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(meta.string() + ": " + e.what());
  }
  TrainConfig config;
  from_json(j.at("config"), config);
  FoldTrainer trainer(config, j.at("n_nodes").get<Index>(), j.at("n_features").get<Index>(),
                      j.at("n_classes").get<int>(), j.at("seed").get<std::uint64_t>());
  const NamedTensors named = load_tensors(tensors);
  trainer.decoupler_.params().load_named(named, "M.");
  trainer.analytic_.params().load_named(named, "A.");
  trainer.generator_.params().load_named(named, "G.");
  trainer.discriminator_.params().load_named(named, "D.");
  trainer.opt_m_.load_named(named, "adam.M.");
  trainer.opt_a_.load_named(named, "adam.A.");
  trainer.opt_g_.load_named(named, "adam.G.");
  trainer.opt_d_.load_named(named, "adam.D.");
  trainer.epoch_ = j.at("epoch").get<int>();
  trainer.steps_ = j.at("steps").get<long>();
  trainer.rng_.set_state(j.at("rng_state").get<std::string>());
  return trainer;
}

// --- cross-validation -----------------------------------------------------------

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds,
                                                        std::uint64_t seed) {
  if (folds < 2) throw ValidationError("folds must be at least 2");
  int n_classes = 0;
  for (int l : labels) n_classes = std::max(n_classes, l + 1);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(derive_seed(seed, 0xF01D));
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t offset = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw ValidationError("class " + std::to_string(c) + " has " +
                            std::to_string(members.size()) + " samples, fewer than " +
                            std::to_string(folds) + " folds");
    }
    rng.shuffle(members);
    // continue the round-robin across classes so fold sizes stay balanced
    for (std::size_t i = 0; i < members.size(); ++i) {
      out[(offset + i) % static_cast<std::size_t>(folds)].push_back(members[i]);
    }
    offset += members.size();
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

namespace {

FoldResult run_fold(const Dataset& dataset, const TrainConfig& config, int fold,
                    const std::vector<std::size_t>& test_idx, const RunOptions& options) {
  std::vector<bool> is_test(dataset.size(), false);
  for (std::size_t i : test_idx) is_test[i] = true;
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!is_test[i]) train_idx.push_back(i);
  }
  const Dataset train = dataset.subset(train_idx);
  const Dataset test = dataset.subset(test_idx);

  FoldResult result;
  result.fold = fold;
  result.test_indices = test_idx;
  FoldTrainer trainer(config, dataset.n_nodes(), dataset.n_features(), dataset.n_classes(),
                      derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(fold)));
  const std::uint64_t eval_seed = derive_seed(config.seed, 2000 + static_cast<std::uint64_t>(fold));

  for (int e = 0; e < config.epochs; ++e) {
    const std::vector<StepLosses> steps = trainer.train_epoch(train);
    EpochRecord rec;
    for (const StepLosses& s : steps) {
      rec.analytic += s.analytic;
      rec.capacity += s.capacity;
      rec.decoupler += s.decoupler;
      rec.generator += s.generator;
      rec.discriminator += s.discriminator;
      const double identity = std::abs(s.decoupler - (s.analytic + s.gamma * s.capacity));
      result.max_loss_identity_error = std::max(result.max_loss_identity_error, identity);
    }
    const double n = static_cast<double>(steps.size());
    rec.analytic /= n;
    rec.capacity /= n;
    rec.decoupler /= n;
    rec.generator /= n;
    rec.discriminator /= n;
    Rng latent_rng(eval_seed);
    for (const BrainNetwork& s : test.subjects()) {
      rec.rmse += trainer.reconstruction_rmse(s, latent_rng);
    }
    rec.rmse /= static_cast<double>(std::max<std::size_t>(1, test.size()));
    result.epochs.push_back(rec);
    if (options.log) {
      char buf[192];
      std::snprintf(buf, sizeof(buf),
                    "fold %d epoch %d: L_anl %.4f L_cap %.4f L_G %.4f L_D %.4f rmse %.4f", fold,
                    e + 1, rec.analytic, rec.capacity, rec.generator, rec.discriminator, rec.rmse);
      options.log(buf);
    }
  }

  double recovery_sum = 0.0;
  int recovery_count = 0;
  for (const BrainNetwork& s : test.subjects()) {
    const Prediction p = trainer.predict(s);
    result.predictions.push_back(p.label);
    result.labels.push_back(s.label());
    // positive-class score; for more classes, the probability of not being class 0
    const double score = dataset.n_classes() == 2 ? p.probabilities(0, 1)
                                                  : 1.0 - p.probabilities(0, 0);
    result.positive_scores.push_back(score);
    if (options.truth) {
      const auto it = options.truth->find(s.label());
      if (it != options.truth->end()) {
        const Recovery r = circuit_recovery(p.decoupling.circuits, it->second);
        recovery_sum += r.score;
        result.empty_predictions += r.empty_prediction ? 1 : 0;
        ++recovery_count;
      }
    }
  }
  result.metrics = classification_metrics(result.predictions, result.labels, dataset.n_classes());
  std::vector<bool> positive;
  for (int l : result.labels) positive.push_back(l != 0);
  result.auc = auc(result.positive_scores, positive);
  result.confusion = confusion_matrix(result.predictions, result.labels, dataset.n_classes());
  if (options.truth && recovery_count > 0) result.recovery = recovery_sum / recovery_count;

  if (options.checkpoint_dir) {
    std::filesystem::create_directories(*options.checkpoint_dir);
    trainer.save(*options.checkpoint_dir / ("fold_" + std::to_string(fold)));
  }
  return result;
}

}  // namespace

MetricsReport run_cv(const Dataset& dataset, const TrainConfig& config,
                     const RunOptions& options) {
  config.validate();
  if (dataset.size() == 0) throw ValidationError("run_cv: empty dataset");
  const auto folds = stratified_folds(dataset.labels(), config.folds, config.seed);

  MetricsReport report;
  report.config = config;
  report.folds.resize(folds.size());

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallel_folds), folds.size());
  if (workers <= 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      report.folds[f] = run_fold(dataset, config, static_cast<int>(f), folds[f], options);
    }
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    RunOptions locked = options;
    if (options.log) {
      locked.log = [&](const std::string& s) {
        std::lock_guard<std::mutex> lock(mu);
        options.log(s);
      };
    }
    auto worker = [&] {
      for (;;) {
        std::size_t f;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= folds.size() || failure) return;
          f = next++;
        }
        try {
          FoldResult r = run_fold(dataset, config, static_cast<int>(f), folds[f], locked);
          std::lock_guard<std::mutex> lock(mu);
          report.folds[f] = std::move(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  const double nf = static_cast<double>(report.folds.size());
  report.mean_auc = 0.0;
  double recovery = 0.0;
  bool have_recovery = true;
  for (const FoldResult& f : report.folds) {
    report.mean.acc += f.metrics.acc / nf;
    report.mean.sen += f.metrics.sen / nf;
    report.mean.spe += f.metrics.spe / nf;
    report.mean.f1 += f.metrics.f1 / nf;
    report.mean.undefined = report.mean.undefined || f.metrics.undefined;
    report.mean_auc += f.auc / nf;
    if (f.recovery) {
      recovery += *f.recovery / nf;
    } else {
      have_recovery = false;
    }
  }
  if (have_recovery) report.mean_recovery = recovery;
  return report;
}

json report_to_json(const MetricsReport& report) {
  auto metrics_json = [](const BinaryMetrics& m) {
    return json{{"acc", m.acc}, {"sen", m.sen}, {"spe", m.spe}, {"f1", m.f1},
                {"undefined", m.undefined}};
  };
  json folds = json::array();
  for (const FoldResult& f : report.folds) {
    json rmse_curve = json::array();
    for (const EpochRecord& e : f.epochs) rmse_curve.push_back(e.rmse);
    json fj = {{"fold", f.fold},
               {"metrics", metrics_json(f.metrics)},
               {"auc", f.auc},
               {"confusion", f.confusion},
               {"test_indices", f.test_indices},
               {"predictions", f.predictions},
               {"rmse_curve", rmse_curve},
               {"max_loss_identity_error", f.max_loss_identity_error}};
    fj["recovery"] = f.recovery ? json(*f.recovery) : json(nullptr);
    fj["empty_predictions"] = f.empty_predictions;
    folds.push_back(std::move(fj));
  }
  json j = {{"config", report.config},
            {"folds", folds},
            {"mean", metrics_json(report.mean)},
            {"mean_auc", report.mean_auc}};
  j["mean_recovery"] = report.mean_recovery ? json(*report.mean_recovery) : json(nullptr);
  return j;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string metrics_cells(const MetricsReport& r) {
  return num(r.mean.acc) + "," + num(r.mean.sen) + "," + num(r.mean.spe) + "," + num(r.mean.f1) +
         "," + num(r.mean_auc) + "," + opt_num(r.mean_recovery);
}

}  // namespace

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "fold,acc,sen,spe,f1,auc,recovery\n";
  for (const FoldResult& f : report.folds) {
    os << f.fold << ',' << num(f.metrics.acc) << ',' << num(f.metrics.sen) << ','
       << num(f.metrics.spe) << ',' << num(f.metrics.f1) << ',' << num(f.auc) << ','
       << opt_num(f.recovery) << '\n';
  }
  os << "mean," << metrics_cells(report) << '\n';
  return os.str();
}

std::string rmse_curve_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "fold,epoch,rmse,l_anl,l_cap,l_m,l_g,l_d\n";
  for (const FoldResult& f : report.folds) {
    for (std::size_t e = 0; e < f.epochs.size(); ++e) {
      const EpochRecord& r = f.epochs[e];
      os << f.fold << ',' << e + 1 << ',' << num(r.rmse) << ',' << num(r.analytic) << ','
         << num(r.capacity) << ',' << num(r.decoupler) << ',' << num(r.generator) << ','
         << num(r.discriminator) << '\n';
    }
  }
  return os.str();
}

std::vector<SweepRow> sweep_tk(const Dataset& dataset, const TrainConfig& base,
                               const std::vector<int>& t_values, const std::vector<int>& k_values,
                               const RunOptions& options) {
  if (t_values.empty() || k_values.empty()) throw ValidationError("sweep: empty grid");
  std::vector<SweepRow> rows;
  for (int t : t_values) {
    for (int k : k_values) {
      TrainConfig c = base;
      c.t = t;
      c.k = k;
      if (options.log) options.log("sweep cell t=" + std::to_string(t) + " k=" + std::to_string(k));
      rows.push_back({t, k, run_cv(dataset, c, options)});
    }
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "t,k,acc,sen,spe,f1,auc,recovery\n";
  for (const SweepRow& r : rows) os << r.t << ',' << r.k << ',' << metrics_cells(r.report) << '\n';
  return os.str();
}

std::vector<AblationRow> ablation(const Dataset& dataset, const TrainConfig& config,
                                  const RunOptions& options) {
  std::vector<AblationRow> rows;
  for (AblationVariant v : {AblationVariant::cap, AblationVariant::mse, AblationVariant::none}) {
    TrainConfig c = config;
    c.ablation = v;
    if (options.log) options.log("ablation variant " + to_string(v));
    rows.push_back({v, run_cv(dataset, c, options)});
  }
  return rows;
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "variant,acc,sen,spe,f1,auc,recovery\n";
  for (const AblationRow& r : rows) {
    os << to_string(r.variant) << ',' << metrics_cells(r.report) << '\n';
  }
  return os.str();
}

}  // namespace decgan
