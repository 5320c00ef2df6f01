#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "ionpred/embed.hpp"
#include "ionpred/rng.hpp"
#include "ionpred/synth.hpp"

using namespace ionpred;
using namespace ionpred::embed;

namespace {

Structure ion_host_structure() {
  Structure st;
  st.positions = {{0, 0, 0}, {1, 0, 0}};
  st.species = {synth::kTargetSpecies, synth::kHostSpecies};
  st.node_features = {{1.0, 1.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 1.0}};
  st.edge_list = {{0, 1}, {1, 0}};
  st.edge_features = {{1.0, 1.0}, {1.0, -1.0}};
  return st;
}

// Relabel atoms by `perm` (new index = perm[old index]) with consistent edge
// rewiring, for the permutation-invariance checks.
Structure permute_structure(const Structure& st, const std::vector<int>& perm) {
  const int n = st.n_atoms();
  Structure out;
  out.positions.resize(static_cast<std::size_t>(n));
  out.species.resize(static_cast<std::size_t>(n));
  out.node_features.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int nk = perm[static_cast<std::size_t>(k)];
    out.positions[static_cast<std::size_t>(nk)] = st.positions[static_cast<std::size_t>(k)];
    out.species[static_cast<std::size_t>(nk)] = st.species[static_cast<std::size_t>(k)];
    out.node_features[static_cast<std::size_t>(nk)] = st.node_features[static_cast<std::size_t>(k)];
  }
  for (std::size_t e = 0; e < st.edge_list.size(); ++e) {
    out.edge_list.emplace_back(perm[static_cast<std::size_t>(st.edge_list[e].first)],
                               perm[static_cast<std::size_t>(st.edge_list[e].second)]);
    out.edge_features.push_back(st.edge_features[e]);
  }
  return out;
}

}  // namespace

TEST_SUITE("embed") {

TEST_CASE("stationary ions embed to the zero vector") {
  const Structure st = ion_host_structure();
  Trajectory tr;
  tr.dt = 0.1;
  for (int t = 0; t < 64; ++t) tr.frames.push_back(st.positions);
  const auto e = trajectory_embedding(tr, st, synth::kTargetSpecies, 8);
  REQUIRE(e.size() == 9);
  for (double v : e) CHECK(v == 0.0);
}

TEST_CASE("pure sinusoid concentrates in exactly one band") {
  const Structure st = ion_host_structure();
  const int frames = 256;
  const int freq = 16;
  const double amplitude = 0.75;
  Trajectory tr;
  tr.dt = 0.1;
  for (int t = 0; t < frames; ++t) {
    const double x = amplitude * std::sin(2.0 * M_PI * freq * t / frames);
    tr.frames.push_back({{x, 0, 0}, {1, 0, 0}});
  }
  const int n_bands = 16;
  const auto e = trajectory_embedding(tr, st, synth::kTargetSpecies, n_bands);
  REQUIRE(e.size() == static_cast<std::size_t>(n_bands) + 1);

  // Closed-form DFT of an integer-frequency sinusoid over a full period: bin
  // `freq` holds amplitude/2 after 1/L normalization (axes y,z contribute 0,
  // and the 3-axis mean divides by 3).
  int nonzero = 0;
  double total = 0.0;
  for (int b = 0; b < n_bands; ++b) {
    if (std::fabs(e[static_cast<std::size_t>(b)]) > 1e-9) ++nonzero;
    total += e[static_cast<std::size_t>(b)];
  }
  CHECK(nonzero == 1);
  // Total band mass times the populated band's bin count equals amplitude/6;
  // checking the sum avoids hard-coding band boundaries.
  const std::size_t kmax = frames / 2;
  (void)kmax;
  // mass must sit in the band whose mean is total
  double band_value = 0.0;
  for (int b = 0; b < n_bands; ++b) band_value = std::max(band_value, e[static_cast<std::size_t>(b)]);
  CHECK(band_value == doctest::Approx(total).epsilon(1e-12));

  // final-frame displacement is known in closed form as well
  const double x_last = amplitude * std::sin(2.0 * M_PI * freq * (frames - 1) / frames);
  CHECK(e.back() == doctest::Approx(std::log10(1.0 + x_last * x_last)).epsilon(1e-12));
}

TEST_CASE("duplicated ions embed like a single ion") {
  Structure st;
  st.positions = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  st.species = {synth::kTargetSpecies, synth::kTargetSpecies, synth::kHostSpecies};
  st.node_features = {{1, 1, 0, 1}, {1, 1, 0, 1}, {0, 0, 1, 2}};
  st.edge_list = {{0, 2}, {2, 0}, {1, 2}, {2, 1}};
  st.edge_features = {{1, 1}, {1, -1}, {1, 1}, {1, -1}};

  Rng rng(5);
  Trajectory both;
  both.dt = 0.1;
  Trajectory solo;
  solo.dt = 0.1;
  Structure st_solo = ion_host_structure();
  for (int t = 0; t < 64; ++t) {
    const double x = rng.normal();
    const double y = rng.normal();
    both.frames.push_back({{x, y, 0}, {x, y, 0}, {2, 0, 0}});
    solo.frames.push_back({{x, y, 0}, {1, 0, 0}});
  }
  const auto e_both = trajectory_embedding(both, st, synth::kTargetSpecies, 8);
  const auto e_solo = trajectory_embedding(solo, st_solo, synth::kTargetSpecies, 8);
  REQUIRE(e_both.size() == e_solo.size());
  for (std::size_t i = 0; i < e_both.size(); ++i) {
    // one-ulp differences from the interleaved axis accumulation are fine
    CHECK(e_both[i] == doctest::Approx(e_solo[i]).epsilon(1e-12));
  }
}

TEST_CASE("trajectory embedding requires the species and enough frames") {
  const Structure st = ion_host_structure();
  Trajectory tr;
  tr.dt = 0.1;
  for (int t = 0; t < 8; ++t) tr.frames.push_back(st.positions);
  CHECK_THROWS(trajectory_embedding(tr, st, 42, 4));
  CHECK_THROWS(trajectory_embedding(tr, st, synth::kTargetSpecies, 5));  // L < 2 n_bands
}

TEST_CASE("atom embedding averages neighbor concatenations") {
  // one atom with a single neighbor: the row is the concatenation itself
  Structure st = ion_host_structure();
  const auto ea = atom_embedding(st);
  REQUIRE(ea.size() == 2);
  const std::vector<double> row0{1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0};
  CHECK(ea[0] == row0);

  // hand case: n_k=[1], edges m=[0] to n_l=[2] and n_l=[4] -> [1, 0, 3]
  Structure tri;
  tri.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.species = {0, 1, 1};
  tri.node_features = {{1.0}, {2.0}, {4.0}};
  tri.edge_list = {{0, 1}, {0, 2}, {1, 0}, {2, 0}};
  tri.edge_features = {{0.0}, {0.0}, {0.0}, {0.0}};
  const auto tri_ea = atom_embedding(tri);
  CHECK(tri_ea[0] == std::vector<double>{1.0, 0.0, 3.0});

  // all-zero features give the zero matrix
  Structure zero = tri;
  zero.node_features = {{0.0}, {0.0}, {0.0}};
  for (const auto& row : atom_embedding(zero)) {
    for (double v : row) CHECK(v == 0.0);
  }

  // isolated atom fails
  Structure bad = tri;
  bad.edge_list = {{0, 1}, {1, 0}};
  bad.edge_features = {{0.0}, {0.0}};
  CHECK_THROWS(atom_embedding(bad));
}

TEST_CASE("species selection keeps order and count") {
  Structure st;
  st.positions = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  st.species = {0, 1, 0, 1};
  const std::vector<std::vector<double>> ea{{0.0}, {1.0}, {2.0}, {3.0}};
  const auto picked = select_species(ea, st, 1);
  CHECK(picked == std::vector<std::vector<double>>{{1.0}, {3.0}});
  const auto all = select_species(ea, st, 0);
  CHECK(all == std::vector<std::vector<double>>{{0.0}, {2.0}});
  CHECK_THROWS(select_species(ea, st, 7));
}

TEST_CASE("polynomial expansion closed forms") {
  CHECK(polynomial_expand({{2.0}}) == std::vector<std::vector<double>>{{2.0, 4.0, 8.0}});
  CHECK(polynomial_expand({{0.0, -1.0}}) ==
        std::vector<std::vector<double>>{{0.0, -1.0, 0.0, 1.0, 0.0, -1.0}});
  CHECK(polynomial_expand({{0.5}}) == std::vector<std::vector<double>>{{0.5, 0.25, 0.125}});
}

TEST_CASE("polynomial expansion commutes with row selection") {
  synth::MaterialSpec spec;
  spec.n_atoms = 12;
  spec.n_target_ions = 4;
  spec.barrier_spread = 0.7;
  spec.seed = 3;
  const Structure st = synth::gen_material(spec);
  const auto ea = atom_embedding(st);
  CHECK(polynomial_expand(select_species(ea, st, synth::kTargetSpecies)) ==
        select_species(polynomial_expand(ea), st, synth::kTargetSpecies));
}

TEST_CASE("temperature embedding closed forms") {
  CHECK(temperature_embedding(700.0, 700.0) == std::vector<double>{1.0, 1.0, 1.0, 1.0});
  CHECK(temperature_embedding(2.0, 1.0) == std::vector<double>{1.0, 2.0, 4.0, 8.0});
  const auto frozen = temperature_embedding(1e-12, 1.0);
  CHECK(frozen[0] == 1.0);
  CHECK(frozen[1] == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(frozen[3] == doctest::Approx(0.0).epsilon(1e-11));
  CHECK_THROWS(temperature_embedding(0.0, 1.0));
}

TEST_CASE("build_x hand case: pooled expansion plus temperature block") {
  // Two ions whose atom-embedding rows are [1,0,1] and [3,0,3]; the host
  // nodes carry the values, edges are zero.
  Structure st;
  st.positions = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  st.species = {0, 0, 1, 1};
  st.node_features = {{1.0}, {3.0}, {1.0}, {3.0}};
  st.edge_list = {{0, 2}, {1, 3}, {2, 0}, {3, 1}};
  st.edge_features = {{0.0}, {0.0}, {0.0}, {0.0}};

  const auto x = build_x(st, 0.9, 0.9, 0);
  // expansions: [1,0,1 ; 1,0,1 ; 1,0,1] and [3,0,3 ; 9,0,9 ; 27,0,27]
  const std::vector<double> expect{2.0, 0.0, 2.0, 5.0, 0.0, 5.0, 14.0, 0.0, 14.0,
                                   1.0, 1.0, 1.0, 1.0};
  CHECK(x == expect);

  // identical ions pool to a single row's expansion
  Structure same = st;
  same.node_features = {{2.0}, {2.0}, {5.0}, {5.0}};
  const auto x_same = build_x(same, 0.9, 0.9, 0);
  CHECK(x_same[0] == 2.0);
  CHECK(x_same[1] == 0.0);
  CHECK(x_same[2] == 5.0);
}

TEST_CASE("dimension contract and configuration") {
  synth::MaterialSpec spec;
  spec.n_atoms = 16;
  spec.n_target_ions = 4;
  spec.seed = 2;
  const Structure st = synth::gen_material(spec);
  const auto x = build_x(st, 1.0, 1.2, synth::kTargetSpecies);
  CHECK(static_cast<int>(x.size()) ==
        x_dimension(synth::kNodeFeatureDim, synth::kEdgeFeatureDim));
  CHECK(x_dimension(4, 2) == 34);

  EmbedConfig plain;
  plain.polynomial_expansion = false;
  const auto x_plain = build_x(st, 1.0, 1.2, synth::kTargetSpecies, plain);
  CHECK(static_cast<int>(x_plain.size()) == x_dimension(4, 2, plain));
  CHECK(x_dimension(4, 2, plain) == 12);
  // constant channel survives without expansion
  CHECK(x_plain[x_plain.size() - 2] == 1.0);
}

TEST_CASE("build_x is invariant to atom permutation") {
  synth::MaterialSpec spec;
  spec.n_atoms = 20;
  spec.n_target_ions = 6;
  spec.barrier_spread = 0.9;
  spec.seed = 8;
  const Structure st = synth::gen_material(spec);

  std::vector<int> perm(20);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(55);
  rng.shuffle(perm);
  const Structure permuted = permute_structure(st, perm);

  const auto a = build_x(st, 0.8, 1.1, synth::kTargetSpecies);
  const auto b = build_x(permuted, 0.8, 1.1, synth::kTargetSpecies);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("trajectory embedding is translation invariant") {
  synth::MaterialSpec spec;
  spec.n_atoms = 8;
  spec.n_target_ions = 3;
  spec.seed = 6;
  const Structure st = synth::gen_material(spec);
  const Trajectory tr = synth::simulate_trajectory(st, spec, 1.0, 128, 0.1, 44);
  Trajectory moved = tr;
  for (auto& frame : moved.frames) {
    for (auto& p : frame) {
      p[0] += 17.0;
      p[1] -= 4.5;
      p[2] += 100.0;
    }
  }
  const auto a = trajectory_embedding(tr, st, synth::kTargetSpecies, 16);
  const auto b = trajectory_embedding(moved, st, synth::kTargetSpecies, 16);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-10));
  }
}

TEST_CASE("embedded dataset cache round trips") {
  synth::MaterialSpec spec;
  spec.n_atoms = 8;
  spec.n_target_ions = 3;
  const Dataset ds = synth::make_dataset(DatasetKind::TrajectoryBased, TargetKind::MsdFinal, 4,
                                         spec, {0.9, 1.1}, 64, 0.1, 77);
  const EmbeddedDataset eds = embed_dataset(ds);
  REQUIRE(eds.samples.size() == ds.size());
  const auto path =
      (std::filesystem::temp_directory_path() / "ionpred_embed_roundtrip.jsonl").string();
  write_embedded_jsonl(eds, path);
  const EmbeddedDataset back = read_embedded_jsonl(path);
  std::filesystem::remove(path);
  REQUIRE(back.samples.size() == eds.samples.size());
  for (std::size_t i = 0; i < eds.samples.size(); ++i) {
    CHECK(back.samples[i].id == eds.samples[i].id);
    CHECK(back.samples[i].split == eds.samples[i].split);
    CHECK(back.samples[i].temperature == eds.samples[i].temperature);
    CHECK(back.samples[i].y_log10 == eds.samples[i].y_log10);
    CHECK(back.samples[i].x_vec == eds.samples[i].x_vec);
    CHECK(back.samples[i].p_vec == eds.samples[i].p_vec);
  }
}

}  // TEST_SUITE
