#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fedgl/errors.hpp"
#include "fedgl/graph.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fedgl;

TEST_CASE("normalize_adjacency handles the degenerate and tiny cases") {
  SUBCASE("single node, no edges: identity from the self-loop") {
    const auto norm = normalize_adjacency(SparseMatrix(1, 1));
    CHECK(norm.matrix.at(0, 0) == 1.0);
  }
  SUBCASE("two nodes, one edge") {
    const auto a = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const auto norm = normalize_adjacency(a);
    CHECK(norm.matrix.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm.matrix.at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm.matrix.at(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm.matrix.at(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("three-node path, checked against hand-evaluated dense arithmetic") {
    const auto a = SparseMatrix::from_triplets(
        3, 3, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}});
    const auto norm = normalize_adjacency(a);
    CHECK(norm.matrix.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm.matrix.at(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
    CHECK(norm.matrix.at(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(norm.matrix.at(1, 2) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
    CHECK(norm.matrix.at(2, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm.matrix.at(0, 2) == 0.0);
  }
  SUBCASE("isolated node keeps a unit self-loop") {
    const auto a = SparseMatrix::from_triplets(3, 3, {{0, 1, 1.0}, {1, 0, 1.0}});
    const auto norm = normalize_adjacency(a);
    CHECK(norm.matrix.at(2, 2) == 1.0);
    CHECK(norm.matrix.at(2, 0) == 0.0);
    CHECK(norm.matrix.at(2, 1) == 0.0);
  }
}

TEST_CASE("normalize_adjacency validates its input") {
  CHECK_THROWS_AS(normalize_adjacency(SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}})),
                  ValidationError);
  CHECK_THROWS_AS(normalize_adjacency(SparseMatrix::from_triplets(
                      2, 2, {{0, 1, -1.0}, {1, 0, -1.0}})),
                  ValidationError);
  CHECK_THROWS_AS(normalize_adjacency(SparseMatrix(0, 0)), ValidationError);
}

TEST_CASE("normalize_adjacency matches the dense oracle and keeps invariants") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    oracle::Dense dense = oracle::zeros(n, n);
    std::vector<SparseMatrix::Triplet> triplets;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.uniform() < 0.4) {
          dense[i][j] = dense[j][i] = 1.0;
          triplets.push_back({i, j, 1.0});
          triplets.push_back({j, i, 1.0});
        }
      }
    }
    const auto norm = normalize_adjacency(SparseMatrix::from_triplets(n, n, triplets));
    const oracle::Dense expected = oracle::normalize_adjacency(dense);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(norm.matrix.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-13));
        CHECK(norm.matrix.at(i, j) >= 0.0);
        CHECK(norm.matrix.at(i, j) <= 1.0);
      }
      CHECK(norm.matrix.at(i, i) > 0.0);
    }
    CHECK(norm.matrix.is_symmetric());
  }
}

TEST_CASE("regular graphs normalize to rows summing to one") {
  // 6-cycle: every node has degree 2.
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t i = 0; i < 6; ++i) {
    const std::size_t j = (i + 1) % 6;
    t.push_back({i, j, 1.0});
    t.push_back({j, i, 1.0});
  }
  const auto norm = normalize_adjacency(SparseMatrix::from_triplets(6, 6, t));
  for (double s : norm.matrix.row_sums()) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize_adjacency is permutation-equivariant") {
  Rng rng(23);
  const std::size_t n = 7;
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < 0.4) {
        t.push_back({i, j, 1.0});
        t.push_back({j, i, 1.0});
      }
    }
  }
  const SparseMatrix a = SparseMatrix::from_triplets(n, n, t);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);

  std::vector<SparseMatrix::Triplet> pt;
  for (const auto& trip : t) pt.push_back({perm[trip.row], perm[trip.col], trip.value});
  const SparseMatrix pa = SparseMatrix::from_triplets(n, n, pt);

  const auto norm = normalize_adjacency(a);
  const auto pnorm = normalize_adjacency(pa);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(pnorm.matrix.at(perm[i], perm[j]) ==
            doctest::Approx(norm.matrix.at(i, j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("project_rows selects rows by id") {
  const DenseMatrix global(3, 2, {1, 0, 0, 1, 1, 1});
  const DenseMatrix picked = project_rows(global, {2, 0});
  CHECK(picked == DenseMatrix(2, 2, {1, 1, 1, 0}));

  const DenseMatrix all = project_rows(global, {0, 1, 2});
  CHECK(all == global);

  const DenseMatrix none = project_rows(global, {});
  CHECK(none.rows() == 0);
  CHECK(none.cols() == 2);

  CHECK_THROWS_AS(project_rows(global, {3}), ValidationError);
}

TEST_CASE("scatter_rows places client rows and zeros the rest") {
  const DenseMatrix client(1, 2, {1, 2});
  const DenseMatrix out = scatter_rows(client, {1}, 3);
  CHECK(out == DenseMatrix(3, 2, {0, 0, 1, 2, 0, 0}));
  CHECK_THROWS_AS(scatter_rows(DenseMatrix(2, 2), {1, 1}, 3), ValidationError);
  CHECK_THROWS_AS(scatter_rows(client, {5}, 3), ValidationError);
}

TEST_CASE("project after scatter is the identity on client rows") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t u = 3 + rng.below(6);
    const std::size_t k = 1 + rng.below(u);
    auto ids = rng.sample_without_replacement(u, k);
    const DenseMatrix x = test::random_dense(k, 1 + rng.below(4), rng);
    CHECK(project_rows(scatter_rows(x, ids, u), ids) == x);
  }
}

TEST_CASE("two clients scattered then summed equal the brute-force union") {
  // 5-row toy registry; overlap on rows 1 and 2.
  const DenseMatrix a(3, 2, {1, 2, 3, 4, 5, 6});     // rows 0,1,2
  const DenseMatrix b(3, 2, {10, 20, 30, 40, 50, 60});  // rows 1,2,4
  DenseMatrix summed = scatter_rows(a, {0, 1, 2}, 5);
  summed.add_scaled(scatter_rows(b, {1, 2, 4}, 5), 1.0);

  oracle::Dense expected = oracle::zeros(5, 2);
  const std::vector<std::vector<std::size_t>> rows{{0, 1, 2}, {1, 2, 4}};
  const std::vector<const DenseMatrix*> mats{&a, &b};
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) expected[rows[c][i]][j] += mats[c]->at(i, j);
    }
  }
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(summed.at(i, j) == expected[i][j]);
  }
}

namespace {

Graph toy_master() {
  // 10-node master: two triangles, a bridge, and isolated tail nodes.
  Graph g = test::build_graph(
      10,
      {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}, {5, 7}, {6, 7}, {8, 9}},
      {{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1}, {1, 1}, {0, 1}, {1, 0}, {0, 1}},
      {0, 0, 0, 1, 1, 1, 0, 1, 0, 1}, 2);
  g.train_mask[0] = 1;
  g.train_mask[3] = 1;
  g.val_mask[1] = 1;
  g.test_mask[5] = 1;
  g.test_mask[7] = 1;
  return g;
}

Graph subgraph_of_master(const Graph& master, const std::vector<std::size_t>& rows) {
  Graph g;
  g.num_nodes = rows.size();
  std::vector<SparseMatrix::Triplet> adj, feats;
  g.labels = DenseMatrix(rows.size(), master.num_classes());
  g.train_mask.assign(rows.size(), 0);
  g.val_mask.assign(rows.size(), 0);
  g.test_mask.assign(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    g.global_ids.push_back(master.global_ids[rows[i]]);
    g.train_mask[i] = master.train_mask[rows[i]];
    g.val_mask[i] = master.val_mask[rows[i]];
    g.test_mask[i] = master.test_mask[rows[i]];
    for (std::size_t c = 0; c < master.num_classes(); ++c) {
      g.labels.at(i, c) = master.labels.at(rows[i], c);
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const double v = master.adjacency.at(rows[i], rows[j]);
      if (v != 0.0) adj.push_back({i, j, v});
    }
    for (std::size_t c = 0; c < master.feature_dim(); ++c) {
      const double v = master.features.at(rows[i], c);
      if (v != 0.0) feats.push_back({i, c, v});
    }
  }
  g.adjacency = SparseMatrix::from_triplets(rows.size(), rows.size(), adj);
  g.features = SparseMatrix::from_triplets(rows.size(), master.feature_dim(), feats);
  return g;
}

}  // namespace

TEST_CASE("merging one graph gives it back") {
  const Graph g = toy_master();
  const Graph merged = merge_graphs({g});
  CHECK(merged.num_nodes == g.num_nodes);
  CHECK(merged.adjacency == g.adjacency);
  CHECK(merged.features == g.features);
  CHECK(merged.labels == g.labels);
  CHECK(merged.train_mask == g.train_mask);
  CHECK(merged.global_ids == g.global_ids);
}

TEST_CASE("merging disjoint graphs block-stacks them") {
  Graph a = test::build_graph(2, {{0, 1}}, {{1}, {1}}, {0, 1}, 2);
  Graph b = test::build_graph(2, {{0, 1}}, {{1}, {1}}, {1, 0}, 2);
  b.global_ids = {2, 3};
  const Graph merged = merge_graphs({a, b});
  CHECK(merged.num_nodes == 4);
  CHECK(merged.adjacency.at(0, 1) == 1.0);
  CHECK(merged.adjacency.at(2, 3) == 1.0);
  CHECK(merged.adjacency.at(1, 2) == 0.0);
  CHECK(merged.adjacency.nnz() == 4);
}

TEST_CASE("merge unions overlapping clients against a brute-force reference") {
  const Graph master = toy_master();
  const Graph a = subgraph_of_master(master, {0, 1, 2, 3, 5});
  const Graph b = subgraph_of_master(master, {3, 4, 5, 7, 8});

  const Graph merged = merge_graphs({a, b});
  CHECK(merged.num_nodes == 8);

  // Node set is the sorted union of ids; every merged edge must exist in the
  // master between sampled nodes, and vice versa.
  const std::vector<std::size_t> expected_ids{0, 1, 2, 3, 4, 5, 7, 8};
  CHECK(merged.global_ids == expected_ids);
  for (std::size_t i = 0; i < merged.num_nodes; ++i) {
    for (std::size_t j = 0; j < merged.num_nodes; ++j) {
      const std::size_t gi = merged.global_ids[i];
      const std::size_t gj = merged.global_ids[j];
      const auto in_graph = [&](const Graph& g) {
        const auto it_i = std::find(g.global_ids.begin(), g.global_ids.end(), gi);
        const auto it_j = std::find(g.global_ids.begin(), g.global_ids.end(), gj);
        if (it_i == g.global_ids.end() || it_j == g.global_ids.end()) return false;
        return g.adjacency.at(static_cast<std::size_t>(it_i - g.global_ids.begin()),
                              static_cast<std::size_t>(it_j - g.global_ids.begin())) != 0.0;
      };
      const bool expected = in_graph(a) || in_graph(b);
      CHECK((merged.adjacency.at(i, j) != 0.0) == expected);
    }
  }

  // Edge (3,5) exists on both clients; it must appear once with weight 1.
  const std::size_t r3 = 3, r5 = 5;
  CHECK(merged.global_ids[r3] == 3);
  CHECK(merged.global_ids[r5] == 5);
  CHECK(merged.adjacency.at(r3, r5) == 1.0);

  // Masks are unions.
  CHECK(merged.train_mask[r3] == 1);
  CHECK(merged.test_mask[r5] == 1);
}

TEST_CASE("merge is commutative on node and edge sets") {
  const Graph master = toy_master();
  const Graph a = subgraph_of_master(master, {0, 2, 3, 6});
  const Graph b = subgraph_of_master(master, {2, 3, 4, 7});
  const Graph ab = merge_graphs({a, b});
  const Graph ba = merge_graphs({b, a});
  CHECK(ab.global_ids == ba.global_ids);
  CHECK(ab.adjacency == ba.adjacency);
  CHECK(merge_graphs({a, a}).adjacency == a.adjacency);
}

TEST_CASE("merge rejects conflicting node data") {
  Graph a = test::build_graph(2, {{0, 1}}, {{1, 0}, {0, 1}}, {0, 1}, 2);
  Graph b = test::build_graph(2, {{0, 1}}, {{1, 0}, {1, 1}}, {0, 1}, 2);  // node 1 differs
  CHECK_THROWS_AS(merge_graphs({a, b}), ValidationError);

  Graph c = test::build_graph(2, {{0, 1}}, {{1, 0}, {0, 1}}, {0, 0}, 2);  // label differs
  CHECK_THROWS_AS(merge_graphs({a, c}), ValidationError);

  Graph d = test::build_graph(2, {{0, 1}}, {{1, 0, 0}, {0, 1, 0}}, {0, 1}, 2);
  CHECK_THROWS_AS(merge_graphs({a, d}), ValidationError);  // feature dim differs
}

TEST_CASE("registry tracks union size and multiplicity") {
  const GlobalRegistry registry({{0, 2, 4}, {1, 2}, {4, 5}});
  CHECK(registry.union_size() == 5);
  CHECK(registry.total_multiplicity() == 7);
  CHECK(registry.per_client_counts() == std::vector<std::size_t>{3, 2, 2});
  CHECK(registry.row_of(0) == 0);
  CHECK(registry.row_of(4) == 3);
  CHECK(registry.row_of(5) == 4);
  CHECK_THROWS_AS(registry.row_of(3), ValidationError);
  CHECK(registry.union_size() <= registry.total_multiplicity());
}

TEST_CASE("graph validation catches broken invariants") {
  Graph g = toy_master();
  g.validate();

  Graph overlapping = g;
  overlapping.val_mask[0] = 1;  // also train
  CHECK_THROWS_AS(overlapping.validate(), ValidationError);

  Graph dup_ids = g;
  dup_ids.global_ids[1] = dup_ids.global_ids[0];
  CHECK_THROWS_AS(dup_ids.validate(), ValidationError);

  Graph bad_label = g;
  bad_label.labels.at(0, 0) = 1.0;
  bad_label.labels.at(0, 1) = 1.0;
  CHECK_THROWS_AS(bad_label.validate(), ValidationError);
}
