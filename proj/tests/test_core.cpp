#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "orient/csv.hpp"
#include "orient/distance.hpp"
#include "orient/error.hpp"
#include "orient/rng.hpp"
#include "orient/score.hpp"
#include "orient/types.hpp"
#include "support/synthetic.hpp"

using namespace orient;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io_error;
}

}  // namespace

TEST_CASE("embedding validation accepts a well-formed matrix") {
  const auto e = validate_embedding({"a", "b"}, {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
  CHECK(e.size() == 2);
  CHECK(e.dim() == 3);
  CHECK(e.row(1)[2] == 6.0);
  CHECK(e.label(0) == "a");
  CHECK(e.index_of("b") == 1);
  CHECK_FALSE(e.index_of("c").has_value());
}

TEST_CASE("embedding validation rejects malformed input") {
  CHECK(code_of([] {
    validate_embedding({"a", "b"}, {{1.0}, {1.0, 2.0}});
  }) == ErrorCode::ragged_matrix);
  CHECK(code_of([] {
    validate_embedding({"a", "a"}, {{1.0}, {2.0}});
  }) == ErrorCode::duplicate_label);
  CHECK(code_of([] { validate_embedding({}, {}); }) == ErrorCode::empty_input);
  CHECK(code_of([] {
    validate_embedding({"a"}, {{std::nan("")}});
  }) == ErrorCode::non_finite_value);
  CHECK(code_of([] {
    validate_embedding_flat({"a", "b"}, {1.0, 2.0, 3.0}, 2);
  }) == ErrorCode::size_mismatch);
  CHECK(code_of([] {
    validate_embedding({"a"}, {{}});
  }) == ErrorCode::empty_input);
}

TEST_CASE("centroid is the exact arithmetic mean") {
  const auto e = validate_embedding({"a", "b"}, {{0.0, 0.0}, {2.0, 4.0}});
  const auto c = e.centroid();
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 2.0);
}

TEST_CASE("distance fixed values") {
  const std::vector<double> o{0.0, 0.0}, p{3.0, 4.0};
  CHECK(euclidean_distance(o, p) == 5.0);
  CHECK(euclidean_distance(p, p) == 0.0);

  const std::vector<double> x{1.0, 0.0}, y{0.0, 2.0}, nx{-3.0, 0.0};
  CHECK(cosine_distance(x, x) == 0.0);
  CHECK(cosine_distance(x, y) == 1.0);
  CHECK(cosine_distance(x, nx) == 2.0);

  CHECK(code_of([&] { cosine_distance(x, o); }) == ErrorCode::zero_vector);
  const std::vector<double> short_v{1.0};
  CHECK(code_of([&] { euclidean_distance(x, short_v); }) ==
        ErrorCode::dimension_mismatch);
}

TEST_CASE("distance properties on random vectors") {
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(5), b(5), c(5);
    for (int j = 0; j < 5; ++j) {
      a[j] = rng.gaussian();
      b[j] = rng.gaussian();
      c[j] = rng.gaussian();
    }
    CHECK(euclidean_distance(a, b) == euclidean_distance(b, a));
    CHECK(cosine_distance(a, b) == cosine_distance(b, a));
    CHECK(euclidean_distance(a, c) <=
          euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12);
    const double cd = cosine_distance(a, b);
    CHECK(cd >= 0.0);
    CHECK(cd <= 2.0);
  }
}

TEST_CASE("score combines guarded inverse-square distance and relative power") {
  const double eps = 1e-12;
  // Distances at or below eps collapse to the eps floor.
  CHECK(score_from_distance(0.0, 0.5, 0.7, 1.0, 1.0, eps) ==
        score_from_distance(eps, 0.5, 0.7, 1.0, 1.0, eps));
  // p = 1 ignores power entirely.
  CHECK(score_from_distance(2.0, 123.0, 1.0, 4.0, 5.0, eps) ==
        score_from_distance(2.0, -9.0, 1.0, 4.0, 5.0, eps));
  // p = 0 ignores distance entirely.
  CHECK(score_from_distance(2.0, 3.0, 0.0, 4.0, 6.0, eps) ==
        score_from_distance(99.0, 3.0, 0.0, 4.0, 6.0, eps));
  CHECK(score_from_distance(2.0, 3.0, 0.0, 4.0, 6.0, eps) == 0.5);
  // Zero power normalizer removes the power term.
  CHECK(score_from_distance(2.0, 0.0, 0.25, 1.0, 0.0, eps) ==
        0.25 * (1.0 / 4.0));
  // Hand value: p, inv-square ratio and power ratio mixed linearly.
  const double s = score_from_distance(2.0, 1.0, 0.6, 1.0, 2.0, eps);
  CHECK(s == doctest::Approx(0.6 * 0.25 + 0.4 * 0.5).epsilon(1e-15));
}

TEST_CASE("rng is deterministic and produces valid draws") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng r(11);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.bounded(13) < 13);
    const double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(r.bounded(1) == 0);

  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  Rng s(3);
  s.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});

  CHECK(derive_stream(5, 0) != derive_stream(5, 1));
  CHECK(derive_stream(5, 0) == derive_stream(5, 0));
}

TEST_CASE("arborescence validation") {
  auto tree = testsupport::random_tree(1, 40);
  CHECK_NOTHROW(validate_arborescence(tree));

  SUBCASE("self parent breaks rank ordering") {
    tree.parent[3] = 3;
    CHECK_THROWS_AS(validate_arborescence(tree), Error);
  }
  SUBCASE("root slot must stay fixed") {
    tree.parent[0] = 1;
    CHECK_THROWS_AS(validate_arborescence(tree), Error);
  }
  SUBCASE("levels must match parent levels") {
    tree.node_level[5] += 1;
    CHECK_THROWS_AS(validate_arborescence(tree), Error);
  }
  SUBCASE("parent inserted later than child is rejected") {
    // node 1 has rank 0; make it point at the last node.
    tree.parent[1] = static_cast<int>(tree.n_nodes()) - 1;
    CHECK_THROWS_AS(validate_arborescence(tree), Error);
  }
}

TEST_CASE("relation sets collapse duplicates and drop self pairs") {
  RelationSet r({{"a", "b"}, {"a", "b"}, {"c", "c"}, {"b", "a"}}, "truth");
  CHECK(r.size() == 2);  // (a,b) deduped, (c,c) dropped, (b,a) distinct
  CHECK(r.self_pairs_dropped() == 1);
  CHECK(r.kind() == "truth");

  const auto e = validate_embedding({"a", "b"}, {{0.0}, {1.0}});
  RelationSet with_missing({{"a", "b"}, {"a", "z"}}, "truth");
  ResolvedRelations resolved(with_missing, e);
  CHECK(resolved.pairs().size() == 1);
  CHECK(resolved.dropped() == 1);
  CHECK(resolved.contains(0, 1));
  CHECK_FALSE(resolved.contains(1, 0));
}

TEST_CASE("double formatting is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(3.0 / 10.0) == "0.3");
  CHECK(format_double(-2.25) == "-2.25");
  CHECK(format_double(0.0) == "0");
  // Round trip: parsing the text recovers the exact double.
  const double v = 1.0 / 3.0;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("csv writer quotes exactly the fields that need it") {
  const std::string path = "/tmp/orient_test_core_csv.csv";
  write_csv(path, {"a", "b"},
            {{"plain", "with,comma"}, {"with\"quote", "line\nbreak"}});
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() ==
        "a,b\nplain,\"with,comma\"\n\"with\"\"quote\",\"line\nbreak\"\n");
}

TEST_CASE("enum names round-trip and aliases resolve") {
  CHECK(insertion_order_from_string("desc") == InsertionOrder::descending);
  CHECK(insertion_order_from_string("descending") == InsertionOrder::descending);
  CHECK(insertion_order_from_string("rand") == InsertionOrder::random);
  CHECK(insertion_order_from_string("asc") == InsertionOrder::ascending);
  CHECK(parent_rule_from_string("score") == ParentRule::score_argmax);
  CHECK(parent_rule_from_string("random") == ParentRule::random_selection);
  CHECK(power_provider_from_string("pagerank") == PowerProvider::pagerank);
  CHECK(distance_kind_from_string("l2") == DistanceKind::euclidean);
  CHECK(distance_kind_from_string("cosine") == DistanceKind::cosine);
  CHECK(code_of([] { insertion_order_from_string("sideways"); }) ==
        ErrorCode::bad_argument);

  CHECK(std::string(to_string(InsertionOrder::descending)) == "descending");
  CHECK(std::string(to_string(ParentRule::random_selection)) ==
        "random_selection");
  CHECK(std::string(to_string(PowerProvider::zipf)) == "zipf");
}
