#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "orient/builder.hpp"
#include "orient/error.hpp"
#include "orient/eval.hpp"
#include "orient/lca.hpp"
#include "orient/power.hpp"
#include "orient/types.hpp"
#include "support/synthetic.hpp"

using namespace orient;

namespace {

// Chain root <- e0 <- e1 <- ... with unit edges; entity i sits at node i+1.
Arborescence chain_tree(int n_entities) {
  Arborescence tree;
  const int m = n_entities + 1;
  tree.parent.assign(m, -1);
  tree.edge_length.assign(m, 0.0);
  tree.insertion_rank.assign(m, -1);
  tree.node_level.assign(m, 0);
  tree.node_power.assign(m, 1.0);
  tree.root_vector = {0.0};
  for (int node = 1; node < m; ++node) {
    tree.parent[node] = node - 1;
    tree.edge_length[node] = 1.0 + 0.25 * node;
    tree.insertion_rank[node] = node - 1;
    tree.node_level[node] = node;
    tree.node_power[node] = 10.0 - node;
  }
  return tree;
}

std::vector<std::string> chain_labels(int n) {
  return testsupport::index_labels(static_cast<std::size_t>(n), "w");
}

}  // namespace

TEST_CASE("edge accuracy on a hand-checked chain") {
  // Edges scored: w1->w0, w2->w1, w3->w2 (w0->root is excluded).
  const auto tree = chain_tree(4);
  const auto labels = chain_labels(4);

  // w1->w0 is a directed hit, w2's edge is reversed in the truth, w3's edge
  // is absent.
  const RelationSet truth({{"w1", "w0"}, {"w1", "w2"}}, "hypernym");
  const auto report = edge_accuracy(tree, labels, truth);

  CHECK(report.n_edges_scored == 3);
  CHECK(report.directed_hits == 1);
  CHECK(report.reversed_hits == 1);
  CHECK(report.undirected_hits == 2);
  CHECK(report.directed_acc == doctest::Approx(1.0 / 3.0));
  CHECK(report.reversed_acc == doctest::Approx(1.0 / 3.0));
  CHECK(report.undirected_acc == doctest::Approx(2.0 / 3.0));

  // Flipping every truth pair swaps directed and reversed exactly.
  const RelationSet flipped({{"w0", "w1"}, {"w2", "w1"}}, "hypernym");
  const auto mirror = edge_accuracy(tree, labels, flipped);
  CHECK(mirror.directed_acc == report.reversed_acc);
  CHECK(mirror.reversed_acc == report.directed_acc);
  CHECK(mirror.undirected_acc == report.undirected_acc);

  // Perfect truth scores 1 everywhere.
  const RelationSet perfect({{"w1", "w0"}, {"w2", "w1"}, {"w3", "w2"}}, "h");
  const auto full = edge_accuracy(tree, labels, perfect);
  CHECK(full.directed_acc == 1.0);
  CHECK(full.reversed_acc == 0.0);
  CHECK(full.undirected_acc == 1.0);
}

TEST_CASE("edge accuracy error paths") {
  const auto tree = chain_tree(3);
  const RelationSet truth({{"w1", "w0"}}, "h");

  CHECK_THROWS_AS(edge_accuracy(tree, chain_labels(2), truth), Error);

  // Every entity hanging off the root leaves nothing to score.
  Arborescence star;
  star.parent = {-1, 0, 0};
  star.edge_length = {0.0, 1.0, 1.0};
  star.insertion_rank = {-1, 0, 1};
  star.node_level = {0, 1, 1};
  star.node_power = {1.0, 1.0, 1.0};
  star.root_vector = {0.0};
  CHECK_THROWS_AS(edge_accuracy(star, chain_labels(2), truth), Error);
}

TEST_CASE("synonym accuracy is direction-blind") {
  const auto tree = chain_tree(3);
  const auto labels = chain_labels(3);
  const RelationSet syn({{"w0", "w1"}}, "synonym");
  const RelationSet nys({{"w1", "w0"}}, "synonym");
  CHECK(synonym_accuracy(tree, labels, syn) == doctest::Approx(0.5));
  CHECK(synonym_accuracy(tree, labels, nys) == doctest::Approx(0.5));
}

TEST_CASE("curves re-aggregate to the global report exactly") {
  const auto planted = testsupport::make_planted(9, 400, 3, 8);
  const auto labels = planted.embedding.labels();
  const auto truth = testsupport::planted_truth(planted);
  BuildConfig cfg;
  const auto tree = build_arborescence(planted.embedding, planted.power, cfg);
  const auto report = edge_accuracy(tree, labels, truth);

  for (const int n_buckets : {1, 7, 100}) {
    for (const auto& curve :
         {accuracy_by_edge_length(tree, labels, truth, n_buckets),
          accuracy_by_node_power(tree, labels, truth, n_buckets),
          accuracy_by_tree_level(tree, labels, truth)}) {
      long long count = 0, directed = 0, reversed = 0, undirected = 0;
      for (const auto& b : curve.buckets) {
        count += b.count;
        directed += b.directed_hits;
        reversed += b.reversed_hits;
        undirected += b.undirected_hits;
        CHECK(b.directed_acc ==
              static_cast<double>(b.directed_hits) / static_cast<double>(b.count));
      }
      CHECK(count == report.n_edges_scored);
      CHECK(directed == report.directed_hits);
      CHECK(reversed == report.reversed_hits);
      CHECK(undirected == report.undirected_hits);
    }
  }
}

TEST_CASE("two buckets split a two-edge chain") {
  const auto tree = chain_tree(3);  // scorable edges: w1->w0 (1.5), w2->w1 (1.75)
  const auto labels = chain_labels(3);
  const RelationSet truth({{"w1", "w0"}}, "h");

  const auto curve = accuracy_by_edge_length(tree, labels, truth, 2);
  REQUIRE(curve.buckets.size() == 2);
  CHECK(curve.buckets[0].center == doctest::Approx(25.0));
  CHECK(curve.buckets[1].center == doctest::Approx(75.0));
  CHECK(curve.buckets[0].key_mean == doctest::Approx(1.5));
  CHECK(curve.buckets[1].key_mean == doctest::Approx(1.75));
  CHECK(curve.buckets[0].count == 1);
  CHECK(curve.buckets[1].count == 1);
  CHECK(curve.buckets[0].directed_acc == 1.0);
  CHECK(curve.buckets[1].directed_acc == 0.0);
}

TEST_CASE("smoothing averages accuracies but leaves hits raw") {
  const auto planted = testsupport::make_planted(21, 300, 3, 8);
  const auto labels = planted.embedding.labels();
  const auto truth = testsupport::planted_truth(planted);
  const auto tree =
      build_arborescence(planted.embedding, planted.power, BuildConfig{});

  const int n_buckets = 10;
  const int window = 3;
  const auto raw = accuracy_by_edge_length(tree, labels, truth, n_buckets, 0);
  const auto smooth =
      accuracy_by_edge_length(tree, labels, truth, n_buckets, window);
  REQUIRE(raw.buckets.size() == smooth.buckets.size());

  std::vector<double> directed, reversed, undirected;
  for (const auto& b : raw.buckets) {
    directed.push_back(b.directed_acc);
    reversed.push_back(b.reversed_acc);
    undirected.push_back(b.undirected_acc);
  }
  const auto sm_d = moving_average(directed, window);
  const auto sm_r = moving_average(reversed, window);
  const auto sm_u = moving_average(undirected, window);
  for (std::size_t i = 0; i < raw.buckets.size(); ++i) {
    CHECK(smooth.buckets[i].directed_acc == sm_d[i]);
    CHECK(smooth.buckets[i].reversed_acc == sm_r[i]);
    CHECK(smooth.buckets[i].undirected_acc == sm_u[i]);
    CHECK(smooth.buckets[i].directed_hits == raw.buckets[i].directed_hits);
    CHECK(smooth.buckets[i].count == raw.buckets[i].count);
    CHECK(smooth.buckets[i].key_mean == raw.buckets[i].key_mean);
  }
}

TEST_CASE("tree level curve has one bucket per level") {
  const auto tree = chain_tree(4);
  const auto labels = chain_labels(4);
  const RelationSet truth({{"w1", "w0"}}, "h");
  const auto curve = accuracy_by_tree_level(tree, labels, truth);
  // Scorable children sit at levels 2, 3, 4.
  REQUIRE(curve.buckets.size() == 3);
  CHECK(curve.buckets[0].center == 2.0);
  CHECK(curve.buckets[1].center == 3.0);
  CHECK(curve.buckets[2].center == 4.0);
  CHECK(curve.buckets[0].directed_acc == 1.0);
  CHECK(curve.buckets[1].directed_acc == 0.0);
}

TEST_CASE("sweep cells reproduce standalone builds") {
  const auto planted = testsupport::make_planted(2, 250, 3, 8);
  const auto truth = testsupport::planted_truth(planted);
  BuildConfig cfg;
  cfg.seed = 17;

  const std::vector<double> ps{0.2, 0.6};
  const std::vector<InsertionOrder> orders{InsertionOrder::descending,
                                           InsertionOrder::ascending};
  const auto sweep =
      sweep_p(planted.embedding, planted.power, cfg, ps, orders, truth);

  REQUIRE(sweep.cells.size() == 4);
  // Grid order: orders outer, p inner.
  CHECK(sweep.cells[0].order == InsertionOrder::descending);
  CHECK(sweep.cells[0].p == 0.2);
  CHECK(sweep.cells[1].order == InsertionOrder::descending);
  CHECK(sweep.cells[1].p == 0.6);
  CHECK(sweep.cells[2].order == InsertionOrder::ascending);

  for (const auto& cell : sweep.cells) {
    BuildConfig one = cfg;
    one.p = cell.p;
    one.order = cell.order;
    const auto tree = build_arborescence(planted.embedding, planted.power, one);
    const auto report =
        edge_accuracy(tree, planted.embedding.labels(), truth);
    CHECK(cell.report.directed_acc == report.directed_acc);
    CHECK(cell.report.reversed_acc == report.reversed_acc);
    CHECK(cell.report.undirected_acc == report.undirected_acc);
    CHECK(cell.report.n_edges_scored == report.n_edges_scored);
    CHECK_FALSE(cell.hit_rate.has_value());
  }

  REQUIRE(sweep.best_per_order.size() == 2);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const auto& best = sweep.best_per_order[i];
    CHECK(best.order == orders[i]);
    for (const auto& cell : sweep.cells) {
      if (cell.order == best.order) {
        CHECK(best.report.directed_acc >= cell.report.directed_acc);
      }
    }
  }
}

TEST_CASE("sweep best ties resolve to the smaller p") {
  // Three collinear points whose tree is the same shape at p = 0.5 and
  // p = 0.7 (b joins a, the outlier c joins the root), so both cells score
  // identically and the tie must go to the smaller p.
  const auto e = validate_embedding({"a", "b", "c"},
                                    {{0.0, 0.0}, {1.0, 0.0}, {10.0, 0.0}});
  const auto power =
      PowerAssignment::from_raw({3.0, 1.5, 1.0}, PowerProvider::external);
  const RelationSet truth({{"b", "a"}}, "h");
  BuildConfig cfg;

  const auto sweep = sweep_p(e, power, cfg, {0.5, 0.7},
                             {InsertionOrder::descending}, truth);
  REQUIRE(sweep.best_per_order.size() == 1);
  REQUIRE(sweep.cells[0].report.directed_acc ==
          sweep.cells[1].report.directed_acc);
  CHECK(sweep.best_per_order[0].p == 0.5);
}

TEST_CASE("sweep computes hit rates when given lch truth") {
  const auto planted = testsupport::make_planted(4, 200, 3, 8);
  const auto truth = testsupport::planted_truth(planted);
  BuildConfig cfg;
  cfg.seed = 3;

  LchMap lch;
  BallTree index(planted.embedding, planted.power);
  const auto pairs = sample_pairs(planted.embedding, index, 150, 10, 77,
                                  DistanceKind::euclidean);
  for (const auto& [w1, w2] : pairs) {
    lch.insert(planted.embedding.label(w1), planted.embedding.label(w2),
               lch_closure(truth,
                           {planted.embedding.label(w1),
                            planted.embedding.label(w2)},
                           2));
  }

  SweepLcaInputs inputs;
  inputs.lch = &lch;
  inputs.n_pairs = 150;
  inputs.k = 10;
  inputs.closure = 2;
  inputs.seed = 77;

  const auto sweep = sweep_p(planted.embedding, planted.power, cfg, {0.6},
                             {InsertionOrder::descending}, truth, inputs);
  REQUIRE(sweep.cells.size() == 1);
  REQUIRE(sweep.cells[0].hit_rate.has_value());

  // Recompose the same number by hand from the same seed.
  const auto tree =
      build_arborescence(planted.embedding, planted.power, [&] {
        BuildConfig c = cfg;
        c.p = 0.6;
        c.order = InsertionOrder::descending;
        return c;
      }());
  const LcaIndex lca_index(tree);
  std::vector<std::vector<std::string>> lca_sets, lch_sets;
  for (const auto& [w1, w2] : pairs) {
    std::vector<std::string> labels;
    for (const int node :
         lca_closure(lca_index, tree, Arborescence::node_of_entity(w1),
                     Arborescence::node_of_entity(w2), inputs.closure)) {
      labels.push_back(
          planted.embedding.label(Arborescence::entity_of_node(node)));
    }
    lca_sets.push_back(std::move(labels));
    const auto* found =
        lch.find(planted.embedding.label(w1), planted.embedding.label(w2));
    lch_sets.push_back(found ? *found : std::vector<std::string>{});
  }
  CHECK(*sweep.cells[0].hit_rate ==
        doctest::Approx(hit_rate(lca_sets, lch_sets)).epsilon(1e-15));
}

TEST_CASE("sweep is oblivious to the thread count") {
  const auto planted = testsupport::make_planted(8, 150, 3, 6);
  const auto truth = testsupport::planted_truth(planted);
  BuildConfig cfg;
  const std::vector<double> ps{0.0, 0.5, 1.0};
  const std::vector<InsertionOrder> orders{InsertionOrder::descending,
                                           InsertionOrder::ascending};

  setenv("ORIENT_THREADS", "1", 1);
  const auto serial =
      sweep_p(planted.embedding, planted.power, cfg, ps, orders, truth);
  setenv("ORIENT_THREADS", "4", 1);
  const auto parallel =
      sweep_p(planted.embedding, planted.power, cfg, ps, orders, truth);
  unsetenv("ORIENT_THREADS");

  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].report.directed_acc ==
          parallel.cells[i].report.directed_acc);
    CHECK(serial.cells[i].report.undirected_acc ==
          parallel.cells[i].report.undirected_acc);
  }
}

TEST_CASE("sweep validates its grids") {
  const auto planted = testsupport::make_planted(1, 50, 3, 4);
  const auto truth = testsupport::planted_truth(planted);
  BuildConfig cfg;
  CHECK_THROWS_AS(sweep_p(planted.embedding, planted.power, cfg, {},
                          {InsertionOrder::descending}, truth),
                  Error);
  CHECK_THROWS_AS(
      sweep_p(planted.embedding, planted.power, cfg, {0.5}, {}, truth), Error);
  CHECK_THROWS_AS(sweep_p(planted.embedding, planted.power, cfg, {1.5},
                          {InsertionOrder::descending}, truth),
                  Error);
}
