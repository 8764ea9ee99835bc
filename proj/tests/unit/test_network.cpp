#include "support.hpp"

#include "decgan/errors.hpp"
#include "decgan/network.hpp"

#include <doctest.h>

#include <fstream>

using namespace decgan;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.samples_per_class = 5;
  s.n_features = 16;
  return s;
}

double intra_circuit_mean(const BrainNetwork& net, const CircuitCollection& circuits) {
  double total = 0.0;
  int count = 0;
  for (const Circuit& c : circuits)
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b, ++count) total += net.adjacency()(c[a], c[b]);
  return total / count;
}

}  // namespace

TEST_CASE("brain network invariants are enforced at construction") {
  Matrix a = Matrix::Zero(3, 3);
  a(1, 2) = 0.5;
  CHECK_THROWS_AS(BrainNetwork("x", Matrix::Zero(3, 2), a, 0), ValidationError);
  a(2, 1) = 0.5;
  CHECK_NOTHROW(BrainNetwork("x", Matrix::Zero(3, 2), a, 0));
  Matrix neg = a;
  neg(1, 2) = neg(2, 1) = -0.1;
  CHECK_THROWS_AS(BrainNetwork("x", Matrix::Zero(3, 2), neg, 0), ValidationError);
  Matrix diag = a;
  diag(0, 0) = 1.0;
  CHECK_THROWS_AS(BrainNetwork("x", Matrix::Zero(3, 2), diag, 0), ValidationError);
  CHECK_THROWS_AS(BrainNetwork("x", Matrix::Zero(2, 2), a, 0), ValidationError);
  try {
    BrainNetwork("subject-17", Matrix::Zero(3, 2), neg, 0);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("subject-17") != std::string::npos);
  }
}

TEST_CASE("dataset round-trip is bit-exact") {
  testing::TempDir dir("net");
  SyntheticData data = generate_synthetic(small_spec());
  REQUIRE(data.dataset.size() == 10);
  save_dataset(data.dataset, dir.path() / "d");
  Dataset back = load_dataset(dir.path() / "d");
  REQUIRE(back.size() == data.dataset.size());
  CHECK(back.class_names() == data.dataset.class_names());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.subjects()[i].id() == data.dataset.subjects()[i].id());
    CHECK(back.subjects()[i].label() == data.dataset.subjects()[i].label());
    CHECK(back.subjects()[i].adjacency() == data.dataset.subjects()[i].adjacency());
    CHECK(back.subjects()[i].features() == data.dataset.subjects()[i].features());
  }
  save_ground_truth(data.truth, dir.path() / "gt.json");
  CHECK(load_ground_truth(dir.path() / "gt.json") == data.truth);
}

TEST_CASE("save refuses a non-empty directory unless forced") {
  testing::TempDir dir("net");
  Dataset ds = generate_synthetic(small_spec()).dataset;
  save_dataset(ds, dir.path() / "d");
  CHECK_THROWS_AS(save_dataset(ds, dir.path() / "d"), ValidationError);
  CHECK_NOTHROW(save_dataset(ds, dir.path() / "d", true));
}

TEST_CASE("empty dataset writes a manifest with zero subjects") {
  testing::TempDir dir("net");
  Dataset empty({}, {"a", "b"}, Provenance::real);
  save_dataset(empty, dir.path() / "e");
  Dataset back = load_dataset(dir.path() / "e");
  CHECK(back.size() == 0);
  CHECK(back.n_nodes() == 0);
}

TEST_CASE("asymmetric adjacency on disk is rejected naming the subject") {
  testing::TempDir dir("net");
  Dataset ds = generate_synthetic(small_spec()).dataset;
  save_dataset(ds, dir.path() / "d");
  const BrainNetwork& first = ds.subjects()[0];
  Matrix a = first.adjacency();
  a(1, 2) += 1.0;
  write_csv_matrix(a, dir.path() / "d" / (first.id() + "_adjacency.csv"));
  bool named = false;
  try {
    load_dataset(dir.path() / "d");
  } catch (const ValidationError& e) {
    named = std::string(e.what()).find(first.id()) != std::string::npos;
  }
  CHECK(named);
}

TEST_CASE("synthetic generation is deterministic and validated") {
  SyntheticData a = generate_synthetic(small_spec());
  SyntheticData b = generate_synthetic(small_spec());
  for (std::size_t i = 0; i < a.dataset.size(); ++i) {
    CHECK(a.dataset.subjects()[i].adjacency() == b.dataset.subjects()[i].adjacency());
    CHECK(a.dataset.subjects()[i].features() == b.dataset.subjects()[i].features());
  }
  SyntheticSpec overlap = small_spec();
  overlap.planted_circuits = {{0, 1, 2}, {2, 3}};
  CHECK_THROWS_AS(generate_synthetic(overlap), ValidationError);
  SyntheticSpec range = small_spec();
  range.planted_circuits = {{0, 25}};
  CHECK_THROWS_AS(generate_synthetic(range), ValidationError);
  SyntheticSpec rho = small_spec();
  rho.bold_rho = 1.0;
  CHECK_THROWS_AS(generate_synthetic(rho), ValidationError);
}

TEST_CASE("planted boost shifts intra-circuit weights by sc_boost") {
  SyntheticSpec spec;
  spec.samples_per_class = 100;
  SyntheticData data = generate_synthetic(spec);
  double healthy = 0.0, diseased = 0.0;
  int nh = 0, nd = 0;
  for (const BrainNetwork& s : data.dataset.subjects()) {
    const double m = intra_circuit_mean(s, spec.planted_circuits);
    if (s.label() == 0) {
      healthy += m;
      ++nh;
    } else {
      diseased += m;
      ++nd;
    }
  }
  const double shift = diseased / nd - healthy / nh;
  CHECK(std::abs(shift - 0.5) < 0.05);

  // with a small boost the diseased intra-circuit mean still exceeds the background
  SyntheticSpec weak = spec;
  weak.sc_boost = 0.05;
  weak.samples_per_class = 50;
  SyntheticData w = generate_synthetic(weak);
  double intra = 0.0, background = 0.0;
  int ni = 0, nb = 0;
  std::vector<bool> in_circuit(weak.n_nodes, false);
  for (const Circuit& c : weak.planted_circuits)
    for (int v : c) in_circuit[v] = true;
  for (const BrainNetwork& s : w.dataset.subjects()) {
    if (s.label() == 0) continue;
    intra += intra_circuit_mean(s, weak.planted_circuits);
    ++ni;
    for (Index i = 0; i < weak.n_nodes; ++i)
      for (Index j = i + 1; j < weak.n_nodes; ++j)
        if (!in_circuit[i] || !in_circuit[j]) {
          background += s.adjacency()(i, j);
          ++nb;
        }
  }
  CHECK(intra / ni > background / nb);
}

TEST_CASE("pearson correlation") {
  Matrix x(3, 4);
  x << 1, 2, 3, 5, 1, 2, 3, 5, -1, -2, -3, -5;
  FunctionalConnectivity fc = pearson_fc(x);
  CHECK(fc.correlation(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fc.correlation(0, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(fc.constant_rows.empty());

  std::mt19937_64 gen(9);
  Matrix r = testing::random_matrix(gen, 5, 100);
  FunctionalConnectivity got = pearson_fc(r);
  double worst = 0.0;
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      double mi = 0, mj = 0;
      for (Index t = 0; t < 100; ++t) {
        mi += r(i, t);
        mj += r(j, t);
      }
      mi /= 100;
      mj /= 100;
      double sij = 0, sii = 0, sjj = 0;
      for (Index t = 0; t < 100; ++t) {
        sij += (r(i, t) - mi) * (r(j, t) - mj);
        sii += (r(i, t) - mi) * (r(i, t) - mi);
        sjj += (r(j, t) - mj) * (r(j, t) - mj);
      }
      worst = std::max(worst, std::abs(got.correlation(i, j) - sij / std::sqrt(sii * sjj)));
    }
  }
  CHECK(worst < 1e-12);

  Matrix c = x;
  c.row(1).setConstant(4.0);
  FunctionalConnectivity flagged = pearson_fc(c);
  REQUIRE(flagged.constant_rows.size() == 1);
  CHECK(flagged.constant_rows[0] == 1);
  CHECK(flagged.correlation(0, 1) == 0.0);
}
