#include "decgan/cli.hpp"

#include "decgan/errors.hpp"
#include "decgan/hypergraph.hpp"
#include "decgan/network.hpp"
#include "decgan/serialize.hpp"
#include "decgan/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace decgan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// Refuses to write outputs into (or below) the input dataset directory.
void check_output_dir(const fs::path& out, const std::optional<fs::path>& data) {
  if (data) {
    const fs::path o = fs::weakly_canonical(out);
    const fs::path d = fs::weakly_canonical(*data);
    auto [it, _] = std::mismatch(d.begin(), d.end(), o.begin(), o.end());
    if (it == d.end()) {
      throw UsageError("output directory " + out.string() + " lies inside the dataset directory");
    }
  }
  fs::create_directories(out);
}

class Manifest {
 public:
  Manifest(fs::path out, std::string command) : path_(std::move(out) / "run_manifest.json") {
    j_ = {{"command", std::move(command)},
          {"artifact_version", kArtifactVersion},
          {"output_dir", path_.parent_path().string()},
          {"started_at", utc_now()},
          {"status", "running"}};
  }
  json& operator[](const char* key) { return j_[key]; }
  void dataset(const fs::path& dir) {
    j_["dataset"] = {{"path", dir.string()}, {"sha256", dataset_hash(dir)}};
  }
  void write() const { write_json(path_, j_); }
  void finish() {
    j_["status"] = "completed";
    j_["finished_at"] = utc_now();
    write();
  }

 private:
  fs::path path_;
  json j_;
};

// --- parsing helpers ----------------------------------------------------------

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad integer '") + item + "' in " + what);
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

// "2x5" -> {0..4}, {5..9}; otherwise ';'-separated comma lists, e.g. "0,1,2;3,4".
CircuitCollection parse_circuits(const std::string& s) {
  const auto x = s.find('x');
  if (x != std::string::npos) {
    const std::vector<int> count = parse_int_list(s.substr(0, x), "--circuits");
    const std::vector<int> size = parse_int_list(s.substr(x + 1), "--circuits");
    if (count.size() != 1 || size.size() != 1 || count[0] < 1 || size[0] < 1) {
      throw UsageError("--circuits expects <count>x<size>, got '" + s + "'");
    }
    CircuitCollection out;
    for (int c = 0; c < count[0]; ++c) {
      Circuit circuit;
      for (int i = 0; i < size[0]; ++i) circuit.push_back(c * size[0] + i);
      out.push_back(circuit);
    }
    return out;
  }
  CircuitCollection out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) out.push_back(parse_int_list(part, "--circuits"));
  return out;
}

fs::path checkpoint_prefix(fs::path p) {
  if (p.extension() == ".ckpt" || p.extension() == ".json") p.replace_extension();
  return p;
}

// --- shared training options ----------------------------------------------------

struct TrainFlags {
  std::string data;
  std::string out;
  std::string config_file;
  int classes = 0;
  bool quiet = false;
  TrainConfig values;
  std::string ablation = "cap";
  std::vector<std::pair<CLI::Option*, std::function<void(TrainConfig&)>>> setters;
};

template <class T>
void bind(CLI::App* cmd, TrainFlags& f, const std::string& name, T TrainConfig::*field,
          const std::string& help) {
  CLI::Option* opt = cmd->add_option(name, f.values.*field, help);
  f.setters.emplace_back(opt, [&f, field](TrainConfig& c) { c.*field = f.values.*field; });
}

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool needs_out) {
  cmd->add_option("--data", f.data, "dataset directory")->required();
  auto* out = cmd->add_option("--out", f.out, "output directory");
  if (needs_out) out->required();
  cmd->add_option("--config", f.config_file, "JSON training config (flags take precedence)");
  cmd->add_option("--classes", f.classes, "expected number of classes in the dataset");
  cmd->add_flag("--quiet", f.quiet, "suppress per-epoch progress");
  bind(cmd, f, "--t", &TrainConfig::t, "decoupling iterations");
  bind(cmd, f, "--k", &TrainConfig::k, "maximum nodes per circuit");
  bind(cmd, f, "--gamma-cap", &TrainConfig::gamma_cap, "sparse capacity weight");
  bind(cmd, f, "--epochs", &TrainConfig::epochs, "epochs per fold");
  bind(cmd, f, "--seed", &TrainConfig::seed, "run seed (overrides DECGAN_SEED)");
  bind(cmd, f, "--folds", &TrainConfig::folds, "cross-validation folds");
  bind(cmd, f, "--batch-size", &TrainConfig::batch_size, "batch size");
  bind(cmd, f, "--lr-m", &TrainConfig::lr_m, "decoupler learning rate");
  bind(cmd, f, "--lr-a", &TrainConfig::lr_a, "analytic module learning rate");
  bind(cmd, f, "--lr-g", &TrainConfig::lr_g, "generator learning rate");
  bind(cmd, f, "--lr-d", &TrainConfig::lr_d, "discriminator learning rate");
  bind(cmd, f, "--hidden", &TrainConfig::hidden, "GCN / hyperedge hidden width");
  bind(cmd, f, "--tau", &TrainConfig::tau, "selection temperature");
  bind(cmd, f, "--parallel-folds", &TrainConfig::parallel_folds, "folds trained concurrently");
  CLI::Option* abl = cmd->add_option("--ablation", f.ablation, "cap, mse or none")
                         ->check(CLI::IsMember({"cap", "mse", "none"}));
  f.setters.emplace_back(abl, [&f](TrainConfig& c) { c.ablation = parse_ablation(f.ablation); });
}

// defaults < config file < DECGAN_SEED < flags
TrainConfig resolve_config(const TrainFlags& f) {
  TrainConfig c;
  if (!f.config_file.empty()) from_json(read_json_file(f.config_file), c);
  if (const char* env = std::getenv("DECGAN_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("DECGAN_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  for (const auto& [opt, set] : f.setters) {
    if (opt->count() > 0) set(c);
  }
  c.validate();
  return c;
}

struct LoadedData {
  Dataset dataset;
  std::optional<GroundTruth> truth;
};

LoadedData load_with_truth(const fs::path& dir, int expected_classes) {
  LoadedData d{load_dataset(dir), std::nullopt};
  if (expected_classes > 0 && d.dataset.n_classes() != expected_classes) {
    throw ValidationError("dataset has " + std::to_string(d.dataset.n_classes()) +
                          " classes, --classes asks for " + std::to_string(expected_classes));
  }
  if (fs::exists(dir / "ground_truth.json")) d.truth = load_ground_truth(dir / "ground_truth.json");
  return d;
}

RunOptions run_options(const LoadedData& d, bool quiet) {
  RunOptions o;
  if (d.truth) o.truth = &*d.truth;
  if (!quiet) o.log = [](const std::string& s) { std::cerr << s << '\n'; };
  return o;
}

// --- commands ------------------------------------------------------------------------

struct GenFlags {
  std::string out;
  std::string spec_file;
  std::string circuits;
  bool force = false;
  SyntheticSpec spec;
  std::vector<std::pair<CLI::Option*, std::function<void(SyntheticSpec&)>>> setters;
};

template <class T>
void bind_spec(CLI::App* cmd, GenFlags& g, const std::string& name, T SyntheticSpec::*field,
               const std::string& help) {
  CLI::Option* opt = cmd->add_option(name, g.spec.*field, help);
  g.setters.emplace_back(opt, [&g, field](SyntheticSpec& s) { s.*field = g.spec.*field; });
}

int cmd_gen_data(GenFlags& g) {
  SyntheticSpec spec;
  if (!g.spec_file.empty()) {
    const json j = read_json_file(g.spec_file);
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("n_nodes", spec.n_nodes);
    take("n_features", spec.n_features);
    take("samples_per_class", spec.samples_per_class);
    take("n_classes", spec.n_classes);
    take("planted_circuits", spec.planted_circuits);
    take("sc_boost", spec.sc_boost);
    take("bold_rho", spec.bold_rho);
    take("noise_sigma", spec.noise_sigma);
    take("density", spec.density);
    take("seed", spec.seed);
  }
  if (const char* env = std::getenv("DECGAN_SEED"); env && *env) {
    try {
      spec.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("DECGAN_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  for (const auto& [opt, set] : g.setters) {
    if (opt->count() > 0) set(spec);
  }
  if (!g.circuits.empty()) spec.planted_circuits = parse_circuits(g.circuits);

  const fs::path out(g.out);
  if (fs::exists(out) && !fs::is_empty(out) && !g.force) {
    throw UsageError("output directory " + out.string() + " is not empty (use --force)");
  }
  const SyntheticData data = generate_synthetic(spec);
  fs::create_directories(out);
  Manifest manifest(out, "gen-data");
  manifest["config"] = {{"n_nodes", spec.n_nodes},
                        {"n_features", spec.n_features},
                        {"samples_per_class", spec.samples_per_class},
                        {"n_classes", spec.n_classes},
                        {"planted_circuits", spec.planted_circuits},
                        {"sc_boost", spec.sc_boost},
                        {"bold_rho", spec.bold_rho},
                        {"noise_sigma", spec.noise_sigma},
                        {"density", spec.density},
                        {"seed", spec.seed}};
  manifest.write();
  save_dataset(data.dataset, out, true);
  save_ground_truth(data.truth, out / "ground_truth.json");
  manifest.finish();
  std::cout << "wrote " << data.dataset.size() << " subjects to " << out.string() << '\n';
  return kExitOk;
}

int cmd_train(const TrainFlags& f) {
  const TrainConfig config = resolve_config(f);
  const fs::path out(f.out);
  check_output_dir(out, fs::path(f.data));
  Manifest manifest(out, "train");
  manifest["config"] = config;
  manifest.dataset(f.data);
  manifest.write();

  const LoadedData d = load_with_truth(f.data, f.classes);
  RunOptions options = run_options(d, f.quiet);
  options.checkpoint_dir = out / "checkpoints";
  const MetricsReport report = run_cv(d.dataset, config, options);
  write_json(out / "metrics.json", report_to_json(report));
  write_text(out / "metrics.csv", report_to_csv(report));
  write_text(out / "rmse_curve.csv", rmse_curve_csv(report));
  manifest.finish();
  std::printf("mean ACC %.4f SEN %.4f SPE %.4f F1 %.4f AUC %.4f\n", report.mean.acc,
              report.mean.sen, report.mean.spe, report.mean.f1, report.mean_auc);
  if (report.mean_recovery) std::printf("mean circuit recovery %.4f\n", *report.mean_recovery);
  return kExitOk;
}

void check_compatible(const FoldTrainer& trainer, const Dataset& ds, const fs::path& ckpt) {
  const auto& dec = trainer.decoupler();
  (void)dec;
  if (trainer.generator().n_nodes() != ds.n_nodes()) {
    throw ValidationError("checkpoint " + ckpt.string() + " expects " +
                          std::to_string(trainer.generator().n_nodes()) + " nodes, dataset has " +
                          std::to_string(ds.n_nodes()));
  }
  if (trainer.analytic().config().n_classes != ds.n_classes()) {
    throw ValidationError("checkpoint " + ckpt.string() + " expects " +
                          std::to_string(trainer.analytic().config().n_classes) +
                          " classes, dataset has " + std::to_string(ds.n_classes()));
  }
}

FoldTrainer load_checkpoint(const fs::path& ckpt, const Dataset& ds) {
  FoldTrainer trainer = FoldTrainer::load(checkpoint_prefix(ckpt));
  check_compatible(trainer, ds, ckpt);
  const json meta = read_json_file(checkpoint_prefix(ckpt).string() + ".json");
  if (meta.at("n_features").get<Index>() != ds.n_features()) {
    throw ValidationError("checkpoint " + ckpt.string() + " expects " +
                          std::to_string(meta.at("n_features").get<Index>()) +
                          " features per node, dataset has " + std::to_string(ds.n_features()));
  }
  return trainer;
}

struct InspectFlags {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::optional<int> t;
  std::optional<int> k;
};

int cmd_eval(const InspectFlags& f) {
  const fs::path out(f.out);
  check_output_dir(out, fs::path(f.data));
  Manifest manifest(out, "eval");
  manifest["checkpoint"] = checkpoint_prefix(f.checkpoint).string();
  manifest.dataset(f.data);
  manifest.write();

  const LoadedData d = load_with_truth(f.data, 0);
  const FoldTrainer trainer = load_checkpoint(f.checkpoint, d.dataset);
  manifest["config"] = trainer.config();

  std::vector<int> preds;
  std::vector<int> labels;
  std::vector<double> scores;
  std::vector<bool> positive;
  std::ostringstream csv;
  csv << "id,label,prediction";
  for (const std::string& c : d.dataset.class_names()) csv << ",p_" << c;
  csv << '\n';
  double recovery = 0.0;
  int recovered = 0;
  for (const BrainNetwork& s : d.dataset.subjects()) {
    const Prediction p = trainer.predict(s);
    preds.push_back(p.label);
    labels.push_back(s.label());
    scores.push_back(d.dataset.n_classes() == 2 ? p.probabilities(0, 1)
                                                : 1.0 - p.probabilities(0, 0));
    positive.push_back(s.label() != 0);
    csv << s.id() << ',' << s.label() << ',' << p.label;
    for (Index c = 0; c < p.probabilities.cols(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.17g", p.probabilities(0, c));
      csv << buf;
    }
    csv << '\n';
    if (d.truth) {
      const auto it = d.truth->find(s.label());
      if (it != d.truth->end()) {
        recovery += circuit_recovery(p.decoupling.circuits, it->second).score;
        ++recovered;
      }
    }
  }
  const BinaryMetrics m = classification_metrics(preds, labels, d.dataset.n_classes());
  json j = {{"acc", m.acc},
            {"sen", m.sen},
            {"spe", m.spe},
            {"f1", m.f1},
            {"undefined", m.undefined},
            {"auc", auc(scores, positive)},
            {"confusion", confusion_matrix(preds, labels, d.dataset.n_classes())},
            {"n_subjects", d.dataset.size()}};
  j["recovery"] = recovered > 0 ? json(recovery / recovered) : json(nullptr);
  write_json(out / "eval_metrics.json", j);
  write_text(out / "predictions.csv", csv.str());
  manifest.finish();
  std::printf("ACC %.4f SEN %.4f SPE %.4f F1 %.4f\n", m.acc, m.sen, m.spe, m.f1);
  return kExitOk;
}

int cmd_decouple(const InspectFlags& f) {
  const fs::path out(f.out);
  check_output_dir(out, fs::path(f.data));
  Manifest manifest(out, "decouple");
  manifest["checkpoint"] = checkpoint_prefix(f.checkpoint).string();
  manifest.dataset(f.data);
  manifest.write();

  const LoadedData d = load_with_truth(f.data, 0);
  const FoldTrainer trainer = load_checkpoint(f.checkpoint, d.dataset);
  const DecouplerConfig& dc = trainer.decoupler().config();
  if (f.t && *f.t != dc.t) {
    throw ValidationError("checkpoint was trained with t=" + std::to_string(dc.t) +
                          ", --t asks for " + std::to_string(*f.t));
  }
  if (f.k && *f.k != dc.k) {
    throw ValidationError("checkpoint was trained with k=" + std::to_string(dc.k) +
                          ", --k asks for " + std::to_string(*f.k));
  }
  manifest["config"] = trainer.config();

  const fs::path adj_dir = out / "sparse_adjacency";
  fs::create_directories(adj_dir);
  std::vector<long> frequency(static_cast<std::size_t>(d.dataset.n_nodes()), 0);
  json subjects = json::array();
  double recovery = 0.0;
  int recovered = 0;
  int empty_circuits = 0;
  for (const BrainNetwork& s : d.dataset.subjects()) {
    const DecouplingOutput dec = trainer.decoupler().decouple(s);
    json scores = json::array();
    for (Index p = 0; p < dec.scores.rows(); ++p) {
      std::vector<double> row(dec.scores.row(p).data(), dec.scores.row(p).data() + dec.scores.cols());
      scores.push_back(row);
    }
    json sj = {{"id", s.id()},
               {"label", s.label()},
               {"circuits", dec.circuits},
               {"supplement", dec.supplement},
               {"scores", scores}};
    for (std::size_t p = 0; p < dec.circuits.size(); ++p) {
      for (int v : dec.circuits[p]) ++frequency[static_cast<std::size_t>(v)];
      if (dec.circuits[p].empty()) ++empty_circuits;
      write_csv_matrix(dec.sparse_adjacencies[p],
                       adj_dir / (s.id() + "_p" + std::to_string(p + 1) + ".csv"));
    }
    if (d.truth) {
      const auto it = d.truth->find(s.label());
      if (it != d.truth->end()) {
        const double r = circuit_recovery(dec.circuits, it->second).score;
        sj["recovery"] = r;
        recovery += r;
        ++recovered;
      }
    }
    subjects.push_back(std::move(sj));
  }
  std::vector<int> order(frequency.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frequency[a] > frequency[b]; });
  json ranking = json::array();
  for (int v : order) ranking.push_back({{"node", v}, {"count", frequency[v]}});

  json j = {{"t", dc.t},
            {"k", dc.k},
            {"subjects", subjects},
            {"node_frequency", ranking},
            {"empty_circuits", empty_circuits}};
  j["mean_recovery"] = recovered > 0 ? json(recovery / recovered) : json(nullptr);
  write_json(out / "circuits.json", j);
  std::ostringstream csv;
  csv << "rank,node,count\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    csv << r + 1 << ',' << order[r] << ',' << frequency[order[r]] << '\n';
  }
  write_text(out / "node_frequency.csv", csv.str());
  manifest.finish();
  std::printf("decoupled %zu subjects\n", d.dataset.size());
  if (recovered > 0) std::printf("mean circuit recovery %.4f\n", recovery / recovered);
  return kExitOk;
}

int cmd_sweep(const TrainFlags& f, const std::string& t_values, const std::string& k_values) {
  const TrainConfig config = resolve_config(f);
  const std::vector<int> ts = parse_int_list(t_values, "--t-values");
  const std::vector<int> ks = parse_int_list(k_values, "--k-values");
  const fs::path out(f.out);
  check_output_dir(out, fs::path(f.data));
  Manifest manifest(out, "sweep");
  manifest["config"] = config;
  manifest["t_values"] = ts;
  manifest["k_values"] = ks;
  manifest.dataset(f.data);
  manifest.write();

  const LoadedData d = load_with_truth(f.data, f.classes);
  const std::vector<SweepRow> rows = sweep_tk(d.dataset, config, ts, ks, run_options(d, f.quiet));
  json cells = json::array();
  for (const SweepRow& r : rows) {
    cells.push_back({{"t", r.t}, {"k", r.k}, {"report", report_to_json(r.report)}});
  }
  write_json(out / "sweep.json", cells);
  write_text(out / "sweep.csv", sweep_to_csv(rows));
  manifest.finish();
  std::cout << sweep_to_csv(rows);
  return kExitOk;
}

int cmd_ablate(const TrainFlags& f) {
  const TrainConfig config = resolve_config(f);
  const fs::path out(f.out);
  check_output_dir(out, fs::path(f.data));
  Manifest manifest(out, "ablate");
  manifest["config"] = config;
  manifest.dataset(f.data);
  manifest.write();

  const LoadedData d = load_with_truth(f.data, f.classes);
  const std::vector<AblationRow> rows = ablation(d.dataset, config, run_options(d, f.quiet));
  json variants = json::array();
  for (const AblationRow& r : rows) {
    variants.push_back({{"variant", to_string(r.variant)}, {"report", report_to_json(r.report)}});
  }
  write_json(out / "ablation.json", variants);
  write_text(out / "ablation.csv", ablation_to_csv(rows));
  manifest.finish();
  std::cout << ablation_to_csv(rows);
  return kExitOk;
}

int cmd_inspect(const std::string& checkpoint) {
  const fs::path prefix = checkpoint_prefix(checkpoint);
  const json meta = read_json_file(prefix.string() + ".json");
  const NamedTensors tensors = load_tensors(prefix.string() + ".ckpt");
  json list = json::array();
  for (const auto& [name, m] : tensors) {
    list.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"norm", m.norm()}});
  }
  json j = meta;
  j["tensors"] = list;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

std::string dataset_hash(const fs::path& dir) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  auto feed = [&](const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw FormatError("cannot read " + file.string());
    char buf[1 << 14];
    while (in) {
      in.read(buf, sizeof(buf));
      if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
  };
  const fs::path manifest = dir / "manifest.json";
  feed(manifest);
  const json j = read_json_file(manifest);
  if (j.contains("subjects")) {
    for (const json& s : j.at("subjects")) {
      feed(dir / s.at("adjacency_file").get<std::string>());
      feed(dir / s.at("features_file").get<std::string>());
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof(b), "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app("Circuit decoupling, hypergraph analysis and adversarial reconstruction of brain networks",
               "decgan");
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "write a synthetic planted-circuit dataset");
  gen_cmd->add_option("--out", gen.out, "dataset directory")->required();
  gen_cmd->add_option("--spec", gen.spec_file, "JSON synthetic spec (flags take precedence)");
  gen_cmd->add_option("--circuits", gen.circuits, "<count>x<size> or '0,1,2;3,4,5'");
  gen_cmd->add_flag("--force", gen.force, "overwrite a non-empty output directory");
  bind_spec(gen_cmd, gen, "--nodes", &SyntheticSpec::n_nodes, "nodes per network");
  bind_spec(gen_cmd, gen, "--features", &SyntheticSpec::n_features, "signal length per node");
  bind_spec(gen_cmd, gen, "--samples", &SyntheticSpec::samples_per_class, "subjects per class");
  bind_spec(gen_cmd, gen, "--classes", &SyntheticSpec::n_classes, "number of classes");
  bind_spec(gen_cmd, gen, "--sc-boost", &SyntheticSpec::sc_boost, "intra-circuit SC increase");
  bind_spec(gen_cmd, gen, "--bold-rho", &SyntheticSpec::bold_rho, "intra-circuit signal correlation");
  bind_spec(gen_cmd, gen, "--noise", &SyntheticSpec::noise_sigma, "per-subject SC jitter");
  bind_spec(gen_cmd, gen, "--density", &SyntheticSpec::density, "fraction of background edges kept");
  bind_spec(gen_cmd, gen, "--seed", &SyntheticSpec::seed, "generator seed");

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "five-fold training and evaluation");
  add_train_flags(train_cmd, train, true);

  InspectFlags eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a fold checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint path prefix")->required();
  eval_cmd->add_option("--data", eval.data, "dataset directory")->required();
  eval_cmd->add_option("--out", eval.out, "output directory")->required();

  InspectFlags dec;
  CLI::App* dec_cmd = app.add_subcommand("decouple", "export the circuits found for each subject");
  dec_cmd->add_option("--checkpoint", dec.checkpoint, "checkpoint path prefix")->required();
  dec_cmd->add_option("--data", dec.data, "dataset directory")->required();
  dec_cmd->add_option("--out", dec.out, "output directory")->required();
  dec_cmd->add_option("--t", dec.t, "expected decoupling iterations");
  dec_cmd->add_option("--k", dec.k, "expected circuit size bound");

  TrainFlags sweep;
  std::string t_values = "1,2,3";
  std::string k_values = "4,5,6,7,8";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cross-validate every (t, k) grid cell");
  add_train_flags(sweep_cmd, sweep, true);
  sweep_cmd->add_option("--t-values", t_values, "comma-separated t grid");
  sweep_cmd->add_option("--k-values", k_values, "comma-separated k grid");

  TrainFlags abl;
  CLI::App* abl_cmd = app.add_subcommand("ablate", "compare the cap, mse and none variants");
  add_train_flags(abl_cmd, abl, true);

  std::string inspect_path;
  CLI::App* inspect_cmd = app.add_subcommand("inspect-checkpoint", "print checkpoint contents");
  inspect_cmd->add_option("checkpoint", inspect_path, "checkpoint path prefix")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_eval(eval);
    if (*dec_cmd) return cmd_decouple(dec);
    if (*sweep_cmd) return cmd_sweep(sweep, t_values, k_values);
    if (*abl_cmd) return cmd_ablate(abl);
    if (*inspect_cmd) return cmd_inspect(inspect_path);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    // validation, format, usage and filesystem errors
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace decgan
