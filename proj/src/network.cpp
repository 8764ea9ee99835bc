#include "decgan/network.hpp"

#include "decgan/errors.hpp"
#include "decgan/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace decgan {

using nlohmann::json;
namespace fs = std::filesystem;

BrainNetwork::BrainNetwork(std::string id, Matrix features, Matrix adjacency, int label)
    : id_(std::move(id)),
      features_(std::move(features)),
      adjacency_(std::move(adjacency)),
      label_(label) {
  auto fail = [&](const std::string& why) {
    throw ValidationError("subject '" + id_ + "': " + why);
  };
  if (adjacency_.rows() != adjacency_.cols()) fail("adjacency is not square");
  if (features_.rows() != adjacency_.rows()) fail("feature rows differ from node count");
  if (!adjacency_.allFinite() || !features_.allFinite()) fail("non-finite values");
  if (label_ < 0) fail("negative label");
  for (Index i = 0; i < adjacency_.rows(); ++i) {
    if (adjacency_(i, i) != 0.0) fail("nonzero diagonal at node " + std::to_string(i));
    for (Index j = 0; j < adjacency_.cols(); ++j) {
      if (adjacency_(i, j) < 0.0) {
        fail("negative adjacency at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (adjacency_(i, j) != adjacency_(j, i)) {
        fail("asymmetric adjacency at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

Dataset::Dataset(std::vector<BrainNetwork> subjects, std::vector<std::string> class_names,
                 Provenance provenance)
    : subjects_(std::move(subjects)),
      class_names_(std::move(class_names)),
      provenance_(provenance) {
  for (const BrainNetwork& s : subjects_) {
    if (s.n_nodes() != subjects_.front().n_nodes() ||
        s.n_features() != subjects_.front().n_features()) {
      throw ValidationError("subject '" + s.id() + "': shape differs from first subject");
    }
    if (s.label() >= n_classes()) {
      throw ValidationError("subject '" + s.id() + "': label " + std::to_string(s.label()) +
                            " outside class range");
    }
  }
}

Index Dataset::n_nodes() const { return subjects_.empty() ? 0 : subjects_.front().n_nodes(); }
Index Dataset::n_features() const {
  return subjects_.empty() ? 0 : subjects_.front().n_features();
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(subjects_.size());
  for (const BrainNetwork& s : subjects_) out.push_back(s.label());
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<BrainNetwork> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(subjects_.at(i));
  return Dataset(std::move(picked), class_names_, provenance_);
}

// --- CSV --------------------------------------------------------------------

Matrix read_csv_matrix(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw FormatError(file.string() + ": bad number '" + cell + "' on row " +
                          std::to_string(rows.size() + 1));
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(file.string() + ": ragged row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(row));
  }
  const Index r = static_cast<Index>(rows.size());
  const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_csv_matrix(const Matrix& m, const fs::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

// --- dataset directory ------------------------------------------------------

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw FormatError("missing manifest: " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kDatasetFormatVersion) {
      throw FormatError("unsupported dataset format_version " + std::to_string(version));
    }
    const Index n_nodes = manifest.at("n_nodes").get<Index>();
    const Index f = manifest.at("f").get<Index>();
    auto class_names = manifest.at("class_names").get<std::vector<std::string>>();
    const Provenance provenance = manifest.value("provenance", std::string("real")) == "synthetic"
                                      ? Provenance::synthetic
                                      : Provenance::real;
    std::vector<BrainNetwork> subjects;
    for (const json& s : manifest.at("subjects")) {
      const std::string id = s.at("id").get<std::string>();
      Matrix adjacency = read_csv_matrix(dir / s.at("adjacency_file").get<std::string>());
      Matrix features = read_csv_matrix(dir / s.at("features_file").get<std::string>());
      if (adjacency.rows() != n_nodes || adjacency.cols() != n_nodes) {
        throw FormatError("subject '" + id + "': adjacency shape differs from manifest n_nodes");
      }
      if (features.rows() != n_nodes || features.cols() != f) {
        throw FormatError("subject '" + id + "': features shape differs from manifest");
      }
      subjects.emplace_back(id, std::move(features), std::move(adjacency),
                            s.at("label").get<int>());
    }
    return Dataset(std::move(subjects), std::move(class_names), provenance);
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) {
      throw ValidationError("refusing to overwrite existing directory " + dir.string());
    }
    fs::remove_all(dir);
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  json subjects = json::array();
  for (const BrainNetwork& s : dataset.subjects()) {
    const std::string adj = s.id() + "_adjacency.csv";
    const std::string feat = s.id() + "_features.csv";
    write_csv_matrix(s.adjacency(), dir / adj);
    write_csv_matrix(s.features(), dir / feat);
    subjects.push_back(
        {{"id", s.id()}, {"label", s.label()}, {"adjacency_file", adj}, {"features_file", feat}});
  }
  json manifest = {{"format_version", kDatasetFormatVersion},
                   {"n_nodes", dataset.n_nodes()},
                   {"f", dataset.n_features()},
                   {"class_names", dataset.class_names()},
                   {"provenance",
                    dataset.provenance() == Provenance::synthetic ? "synthetic" : "real"},
                   {"subjects", subjects}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

void save_ground_truth(const GroundTruth& truth, const fs::path& file) {
  json j = json::object();
  for (const auto& [cls, circuits] : truth) j[std::to_string(cls)] = circuits;
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

GroundTruth load_ground_truth(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  try {
    json j;
    in >> j;
    GroundTruth truth;
    for (const auto& [key, value] : j.items()) {
      truth[std::stoi(key)] = value.get<CircuitCollection>();
    }
    return truth;
  } catch (const std::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

// --- synthetic generation ---------------------------------------------------

namespace {

void validate_spec(const SyntheticSpec& spec) {
  auto fail = [](const std::string& why) { throw ValidationError("synthetic spec: " + why); };
  if (spec.n_nodes < 2) fail("n_nodes must be at least 2");
  if (spec.n_features < 2) fail("n_features must be at least 2");
  if (spec.samples_per_class < 1) fail("samples_per_class must be positive");
  if (spec.n_classes < 2) fail("n_classes must be at least 2");
  if (!(spec.sc_boost >= 0.0)) fail("sc_boost must be nonnegative");
  if (!(spec.bold_rho >= 0.0 && spec.bold_rho < 1.0)) fail("bold_rho must lie in [0, 1)");
  if (!(spec.noise_sigma >= 0.0)) fail("noise_sigma must be nonnegative");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) fail("density must lie in (0, 1]");
  std::set<int> seen;
  std::size_t total = 0;
  for (const Circuit& c : spec.planted_circuits) {
    if (c.empty()) fail("empty planted circuit");
    for (int v : c) {
      if (v < 0 || v >= spec.n_nodes) fail("circuit node " + std::to_string(v) + " out of range");
      if (!seen.insert(v).second) {
        fail("planted circuits overlap at node " + std::to_string(v));
      }
    }
    total += c.size();
  }
  if (static_cast<Index>(total) > spec.n_nodes) fail("circuits use more nodes than available");
}

// Population template: uniform(0,1) upper-triangle weights, the strongest
// `density` fraction kept.
Matrix make_template(const SyntheticSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0));
  const Index n = spec.n_nodes;
  std::vector<std::pair<double, std::pair<Index, Index>>> entries;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) entries.push_back({rng.uniform(), {i, j}});
  }
  const auto keep =
      static_cast<std::size_t>(std::lround(spec.density * static_cast<double>(entries.size())));
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  Matrix t = Matrix::Zero(n, n);
  for (std::size_t e = 0; e < keep && e < entries.size(); ++e) {
    const auto [i, j] = entries[e].second;
    t(i, j) = entries[e].first;
    t(j, i) = entries[e].first;
  }
  return t;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  validate_spec(spec);
  const Index n = spec.n_nodes;
  const Index f = spec.n_features;
  const Matrix base = make_template(spec);

  std::vector<BrainNetwork> subjects;
  std::vector<std::string> class_names;
  for (int c = 0; c < spec.n_classes; ++c) {
    class_names.push_back(c == 0 ? "healthy" : "diseased" + std::to_string(c));
  }

  std::uint64_t sample_index = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    // Severity grows with the class index; the last class carries the full effect.
    const double severity = static_cast<double>(c) / static_cast<double>(spec.n_classes - 1);
    const double boost = spec.sc_boost * severity;
    const double rho = spec.bold_rho * severity;
    for (int s = 0; s < spec.samples_per_class; ++s, ++sample_index) {
      Rng rng(derive_seed(spec.seed, sample_index + 1));

      Matrix adjacency = Matrix::Zero(n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if (base(i, j) == 0.0) continue;
          const double w = std::max(0.0, base(i, j) + spec.noise_sigma * rng.normal());
          adjacency(i, j) = w;
          adjacency(j, i) = w;
        }
      }
      Matrix features = rng.normal_matrix(n, f);

      if (c > 0) {
        for (const Circuit& circuit : spec.planted_circuits) {
          for (std::size_t a = 0; a < circuit.size(); ++a) {
            for (std::size_t b = a + 1; b < circuit.size(); ++b) {
              adjacency(circuit[a], circuit[b]) += boost;
              adjacency(circuit[b], circuit[a]) = adjacency(circuit[a], circuit[b]);
            }
          }
          // shared latent factor gives pairwise correlation rho within the circuit
          Eigen::RowVectorXd latent(f);
          for (Index t = 0; t < f; ++t) latent(t) = rng.normal();
          const double shared = std::sqrt(rho);
          const double own = std::sqrt(1.0 - rho);
          for (int v : circuit) {
            features.row(v) = shared * latent + own * features.row(v);
          }
        }
      }
      char id[32];
      std::snprintf(id, sizeof(id), "s%04llu", static_cast<unsigned long long>(sample_index));
      subjects.emplace_back(id, std::move(features), std::move(adjacency), c);
    }
  }

  GroundTruth truth;
  for (int c = 1; c < spec.n_classes; ++c) truth[c] = spec.planted_circuits;
  return {Dataset(std::move(subjects), std::move(class_names), Provenance::synthetic),
          std::move(truth)};
}

// --- functional connectivity ------------------------------------------------

FunctionalConnectivity pearson_fc(const Matrix& x) {
  if (x.cols() < 2) throw DimensionError("pearson_fc: need at least 2 samples per row");
  const Index n = x.rows();
  FunctionalConnectivity out;
  Matrix centered = x.colwise() - x.rowwise().mean();
  Eigen::VectorXd norms = centered.rowwise().norm();
  for (Index i = 0; i < n; ++i) {
    if (norms(i) == 0.0) out.constant_rows.push_back(i);
  }
  out.correlation = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (norms(i) > 0.0 && norms(j) > 0.0) {
        r = centered.row(i).dot(centered.row(j)) / (norms(i) * norms(j));
        r = std::clamp(r, -1.0, 1.0);
      }
      out.correlation(i, j) = r;
      out.correlation(j, i) = r;
    }
  }
  return out;
}

}  // namespace decgan
