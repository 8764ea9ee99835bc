#pragma once

// Brain-network data model: node features (BOLD-like series) plus a
// symmetric, nonnegative, zero-diagonal structural adjacency.

#include "decgan/tensor.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace decgan {

class BrainNetwork {
 public:
  // Throws ValidationError naming `id` if adjacency is not square, symmetric,
  // nonnegative and zero-diagonal, if features rows differ from the node
  // count, or if any value is non-finite.
  BrainNetwork(std::string id, Matrix features, Matrix adjacency, int label);

  const std::string& id() const { return id_; }
  const Matrix& features() const { return features_; }
  const Matrix& adjacency() const { return adjacency_; }
  int label() const { return label_; }
  Index n_nodes() const { return adjacency_.rows(); }
  Index n_features() const { return features_.cols(); }

 private:
  std::string id_;
  Matrix features_;
  Matrix adjacency_;
  int label_;
};

enum class Provenance { real, synthetic };

class Dataset {
 public:
  Dataset(std::vector<BrainNetwork> subjects, std::vector<std::string> class_names,
          Provenance provenance);

  const std::vector<BrainNetwork>& subjects() const { return subjects_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  Provenance provenance() const { return provenance_; }
  std::size_t size() const { return subjects_.size(); }
  int n_classes() const { return static_cast<int>(class_names_.size()); }
  // 0 for an empty dataset.
  Index n_nodes() const;
  Index n_features() const;

  std::vector<int> labels() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<BrainNetwork> subjects_;
  std::vector<std::string> class_names_;
  Provenance provenance_;
};

using Circuit = std::vector<int>;
using CircuitCollection = std::vector<Circuit>;
// class index -> planted circuits
using GroundTruth = std::map<int, CircuitCollection>;

// --- on-disk format ---------------------------------------------------------
//
// <dir>/manifest.json  {format_version, n_nodes, f, class_names, provenance,
//                       subjects: [{id, label, adjacency_file, features_file}]}
// <dir>/*.csv          one matrix per file, no header, full-precision reals
// <dir>/ground_truth.json  {"<class>": [[node, ...], ...]}   (synthetic only)

inline constexpr int kDatasetFormatVersion = 1;

Dataset load_dataset(const std::filesystem::path& dir);
// Refuses to write into an existing non-empty directory unless `force`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir, bool force = false);

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& file);
GroundTruth load_ground_truth(const std::filesystem::path& file);

Matrix read_csv_matrix(const std::filesystem::path& file);
void write_csv_matrix(const Matrix& m, const std::filesystem::path& file);

// --- synthetic planted-circuit data -----------------------------------------

struct SyntheticSpec {
  Index n_nodes = 20;
  Index n_features = 64;
  int samples_per_class = 100;
  int n_classes = 2;
  // Planted node subsets shared by every diseased class (classes 1..n-1).
  CircuitCollection planted_circuits = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
  double sc_boost = 0.5;
  double bold_rho = 0.6;
  double noise_sigma = 0.1;
  double density = 0.3;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  Dataset dataset;
  GroundTruth truth;
};

// Throws ValidationError for overlapping circuits, out-of-range nodes or
// parameters outside their ranges. Deterministic in the spec.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Pearson correlation between feature rows. Constant rows get zero
// off-diagonal correlation and are listed in constant_rows.
struct FunctionalConnectivity {
  Matrix correlation;
  std::vector<Index> constant_rows;
};
FunctionalConnectivity pearson_fc(const Matrix& features);

}  // namespace decgan
