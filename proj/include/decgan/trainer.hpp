#pragma once

// Joint optimisation of the decoupler (M), analytic module (A), generator (G)
// and discriminator (D); stratified k-fold evaluation, the t/k sweep and the
// sparse-capacity ablation.

#include "decgan/adversarial.hpp"
#include "decgan/analytic.hpp"
#include "decgan/decoupler.hpp"
#include "decgan/metrics.hpp"
#include "decgan/network.hpp"
#include "decgan/params.hpp"
#include "decgan/random.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decgan {

enum class AblationVariant { cap, mse, none };

std::string to_string(AblationVariant v);
AblationVariant parse_ablation(const std::string& s);

struct TrainConfig {
  double gamma_cap = 0.1;
  double lr_m = 1e-4;
  double lr_a = 1e-3;
  double lr_g = 1e-4;
  double lr_d = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 16;
  int epochs = 50;
  int t = 2;
  int k = 5;
  int folds = 5;
  std::uint64_t seed = 7;
  AblationVariant ablation = AblationVariant::cap;

  // architecture
  int hidden = 16;
  int selector_dim = 16;
  double gamma_dec = 0.05;
  double tau = 0.1;
  int analytic_layers = 2;
  int latent_dim = 32;
  int generator_hidden = 64;

  int parallel_folds = 1;

  // Throws ValidationError on out-of-range values.
  void validate() const;
  // Effective weight of the capacity term (0 for the `none` variant).
  double effective_gamma() const { return ablation == AblationVariant::none ? 0.0 : gamma_cap; }
};

void to_json(nlohmann::json& j, const TrainConfig& c);
// Missing keys keep their current values.
void from_json(const nlohmann::json& j, TrainConfig& c);

struct StepLosses {
  double analytic = 0.0;   // L_anl (= L_A)
  double capacity = 0.0;   // capacity term (L_cap, or the MSE replacement)
  double gamma = 0.0;      // weight applied to `capacity`
  double decoupler = 0.0;  // L_M
  double generator = 0.0;  // L_G
  double discriminator = 0.0;  // L_D
  double hard_spatial = 0.0;   // mean hard spatial similarity over the batch
  double hard_spectral = 0.0;  // mean hard spectral similarity over the batch
};

struct Prediction {
  int label = 0;
  Matrix probabilities;  // 1 x n_classes
  DecouplingOutput decoupling;
};

class FoldTrainer {
 public:
  FoldTrainer(const TrainConfig& config, Index n_nodes, Index n_features, int n_classes,
              std::uint64_t seed);

  // One optimisation step for each module on `batch`. Throws NumericError
  // naming the loss and batch when a loss turns non-finite.
  StepLosses train_step(std::span<const BrainNetwork* const> batch, long batch_index = 0);

  // Shuffles `train`, runs every batch, returns the per-step losses.
  std::vector<StepLosses> train_epoch(const Dataset& train);

  Prediction predict(const BrainNetwork& network) const;
  // RMSE between the stitched reconstruction and the observed adjacency,
  // with a latent drawn from `latent_rng`.
  double reconstruction_rmse(const BrainNetwork& network, Rng& latent_rng) const;

  int epoch() const { return epoch_; }
  long steps() const { return steps_; }
  const TrainConfig& config() const { return config_; }

  const Decoupler& decoupler() const { return decoupler_; }
  const AnalyticModule& analytic() const { return analytic_; }
  const Generator& generator() const { return generator_; }
  const Discriminator& discriminator() const { return discriminator_; }

  // All parameters and optimiser moments, prefixed by module.
  NamedTensors state_tensors() const;

  // Writes <path>.ckpt (tensor container) and <path>.json (config, epoch,
  // RNG state, shapes).
  void save(const std::filesystem::path& path) const;
  static FoldTrainer load(const std::filesystem::path& path);

 private:
  TrainConfig config_;
  Index n_nodes_;
  Index n_features_;
  int n_classes_;
  std::uint64_t seed_;
  Rng rng_;
  Decoupler decoupler_;
  AnalyticModule analytic_;
  Generator generator_;
  Discriminator discriminator_;
  Adam opt_m_;
  Adam opt_a_;
  Adam opt_g_;
  Adam opt_d_;
  int epoch_ = 0;
  long steps_ = 0;
};

// Per-class round-robin assignment after a seeded shuffle. Returns the test
// indices of each fold. Throws ValidationError when a class has fewer
// samples than folds.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds,
                                                        std::uint64_t seed);

struct EpochRecord {
  double analytic = 0.0;
  double capacity = 0.0;
  double decoupler = 0.0;
  double generator = 0.0;
  double discriminator = 0.0;
  double rmse = 0.0;  // mean test-set reconstruction RMSE after the epoch
};

struct FoldResult {
  int fold = 0;
  std::vector<std::size_t> test_indices;
  std::vector<int> predictions;
  std::vector<int> labels;
  std::vector<double> positive_scores;
  BinaryMetrics metrics;
  double auc = 0.5;
  std::vector<std::vector<long>> confusion;
  std::vector<EpochRecord> epochs;
  // Circuit recovery against ground truth over test subjects whose class has
  // planted circuits; nullopt without ground truth.
  std::optional<double> recovery;
  int empty_predictions = 0;
  double max_loss_identity_error = 0.0;
};

struct MetricsReport {
  TrainConfig config;
  std::vector<FoldResult> folds;
  BinaryMetrics mean;
  double mean_auc = 0.5;
  std::optional<double> mean_recovery;
};

struct RunOptions {
  const GroundTruth* truth = nullptr;
  // When set, fold checkpoints are written as <dir>/fold_<i>.{ckpt,json}.
  std::optional<std::filesystem::path> checkpoint_dir;
  std::function<void(const std::string&)> log;
};

MetricsReport run_cv(const Dataset& dataset, const TrainConfig& config,
                     const RunOptions& options = {});

nlohmann::json report_to_json(const MetricsReport& report);
// One row per fold: fold,acc,sen,spe,f1,auc,recovery
std::string report_to_csv(const MetricsReport& report);
// fold,epoch,rmse,l_anl,l_cap,l_m,l_g,l_d
std::string rmse_curve_csv(const MetricsReport& report);

struct SweepRow {
  int t = 0;
  int k = 0;
  MetricsReport report;
};

std::vector<SweepRow> sweep_tk(const Dataset& dataset, const TrainConfig& base,
                               const std::vector<int>& t_values, const std::vector<int>& k_values,
                               const RunOptions& options = {});
// t,k,acc,sen,spe,f1,auc,recovery
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct AblationRow {
  AblationVariant variant;
  MetricsReport report;
};

// Runs the cap, mse and none variants with identical seeds and splits.
std::vector<AblationRow> ablation(const Dataset& dataset, const TrainConfig& config,
                                  const RunOptions& options = {});
// variant,acc,sen,spe,f1,auc,recovery
std::string ablation_to_csv(const std::vector<AblationRow>& rows);

}  // namespace decgan
