#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "orient/builder.hpp"
#include "orient/csv.hpp"
#include "orient/error.hpp"
#include "orient/eval.hpp"
#include "orient/io.hpp"
#include "orient/types.hpp"
#include "support/synthetic.hpp"

using namespace orient;

namespace {

// Scratch file that cleans up after itself.
class TempFile {
public:
  explicit TempFile(const std::string& contents = "") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("orient_io_test_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++)))
                .string();
    if (!contents.empty()) {
      write(contents);
    }
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

  void write(const std::string& contents) const {
    std::ofstream out(path_, std::ios::binary);
    out << contents;
  }

  std::string read() const {
    std::ifstream in(path_, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

private:
  std::string path_;
};

template <typename F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io_error;
}

}  // namespace

TEST_CASE("glove loading") {
  SUBCASE("basic file with blank lines and CRLF endings") {
    const TempFile f("alpha 1.0 2.0 3.0\r\n\nbeta -1 0.5 2e-1\r\n");
    const auto e = load_embedding(f.path(), EmbeddingFormat::glove_text);
    REQUIRE(e.size() == 2);
    REQUIRE(e.dim() == 3);
    CHECK(e.label(0) == "alpha");
    CHECK(e.label(1) == "beta");
    CHECK(e.row(1)[0] == -1.0);
    CHECK(e.row(1)[2] == 0.2);
  }

  SUBCASE("numeric labels are labels, not values") {
    const TempFile f("42 1.0 2.0\n");
    const auto e = load_embedding(f.path(), EmbeddingFormat::glove_text);
    CHECK(e.label(0) == "42");
    CHECK(e.dim() == 2);
  }

  SUBCASE("rejections") {
    const TempFile inconsistent("a 1 2 3\nb 1 2\n");
    CHECK(code_of([&] {
            load_embedding(inconsistent.path(), EmbeddingFormat::glove_text);
          }) == ErrorCode::dimension_mismatch);

    const TempFile bad_number("a 1 x 3\n");
    CHECK(code_of([&] {
            load_embedding(bad_number.path(), EmbeddingFormat::glove_text);
          }) == ErrorCode::malformed_input);

    const TempFile reserved("__ROOT__ 1 2\n");
    CHECK(code_of([&] {
            load_embedding(reserved.path(), EmbeddingFormat::glove_text);
          }) == ErrorCode::reserved_label);

    const TempFile duplicate("a 1 2\na 3 4\n");
    CHECK(code_of([&] {
            load_embedding(duplicate.path(), EmbeddingFormat::glove_text);
          }) == ErrorCode::duplicate_label);

    const TempFile empty("\n\n");
    CHECK(code_of([&] {
            load_embedding(empty.path(), EmbeddingFormat::glove_text);
          }) == ErrorCode::empty_input);

    CHECK(code_of([&] {
            load_embedding("/nonexistent/path", EmbeddingFormat::glove_text);
          }) == ErrorCode::io_error);
  }
}

TEST_CASE("word2vec loading") {
  SUBCASE("header then rows") {
    const TempFile f("2 3\nalpha 1 2 3\nbeta 4 5 6\n");
    const auto e = load_embedding(f.path(), EmbeddingFormat::word2vec_text);
    REQUIRE(e.size() == 2);
    REQUIRE(e.dim() == 3);
    CHECK(e.row(0)[2] == 3.0);
  }

  SUBCASE("row count must match the header") {
    const TempFile f("3 3\nalpha 1 2 3\nbeta 4 5 6\n");
    CHECK(code_of([&] {
            load_embedding(f.path(), EmbeddingFormat::word2vec_text);
          }) == ErrorCode::size_mismatch);
  }

  SUBCASE("malformed headers") {
    const TempFile extra("2 3 4\na 1 2 3\n");
    CHECK(code_of([&] {
            load_embedding(extra.path(), EmbeddingFormat::word2vec_text);
          }) == ErrorCode::malformed_input);
    const TempFile word("two 3\na 1 2 3\n");
    CHECK(code_of([&] {
            load_embedding(word.path(), EmbeddingFormat::word2vec_text);
          }) == ErrorCode::malformed_input);
    const TempFile zero("0 3\n");
    CHECK(code_of([&] {
            load_embedding(zero.path(), EmbeddingFormat::word2vec_text);
          }) == ErrorCode::malformed_input);
  }
}

TEST_CASE("relation loading") {
  const TempFile f(
      "# hypernym pairs\n"
      "dog\tanimal\n"
      "dog\tanimal\n"
      "cat\tcat\n"
      "cat\tanimal\n"
      "\n");
  const auto rels = load_relations(f.path(), "hypernym");
  CHECK(rels.kind() == "hypernym");
  CHECK(rels.size() == 2);
  CHECK(rels.self_pairs_dropped() == 1);
  CHECK(rels.pairs()[0] == std::pair<std::string, std::string>("dog", "animal"));

  const TempFile missing_field("dog\n");
  CHECK(code_of([&] { load_relations(missing_field.path()); }) ==
        ErrorCode::malformed_input);
  const TempFile extra_field("a\tb\tc\n");
  CHECK(code_of([&] { load_relations(extra_field.path()); }) ==
        ErrorCode::malformed_input);

  const TempFile only_comments("# nothing\n");
  CHECK(load_relations(only_comments.path()).size() == 0);
}

TEST_CASE("lch loading") {
  const TempFile f(
      "dog\tcat\tanimal,mammal\n"
      "dog\twolf\tcanine\n"
      "fish\trock\t\n");
  const auto map = load_lch(f.path());
  CHECK(map.size() == 3);

  const auto* set = map.find("cat", "dog");
  REQUIRE(set != nullptr);
  CHECK(*set == std::vector<std::string>{"animal", "mammal"});

  // Present with an empty set is different from absent.
  const auto* empty = map.find("rock", "fish");
  REQUIRE(empty != nullptr);
  CHECK(empty->empty());
  CHECK(map.find("dog", "rock") == nullptr);

  const TempFile two_fields("a\tb\n");
  CHECK(code_of([&] { load_lch(two_fields.path()); }) ==
        ErrorCode::malformed_input);
}

TEST_CASE("power file loading") {
  const auto e = validate_embedding({"a", "b"}, {{0.0}, {1.0}});

  const TempFile f("b\t4\na\t2\nzz\t9\n");
  const auto p = load_power_file(f.path(), e);
  // Raw {2, 4} rescaled so the minimum is 1.
  CHECK(p.power(0) == 1.0);
  CHECK(p.power(1) == 2.0);
  CHECK(p.provider() == PowerProvider::external);

  const TempFile missing("a\t2\n");
  CHECK(code_of([&] { load_power_file(missing.path(), e); }) ==
        ErrorCode::malformed_input);

  const TempFile dup("a\t2\nb\t3\na\t4\n");
  CHECK(code_of([&] { load_power_file(dup.path(), e); }) ==
        ErrorCode::malformed_input);

  const TempFile bad("a\ttwo\nb\t3\n");
  CHECK(code_of([&] { load_power_file(bad.path(), e); }) ==
        ErrorCode::malformed_input);
}

TEST_CASE("json export carries the full build description") {
  const auto inst = testsupport::random_instance(3, 40, 3);
  BuildConfig cfg;
  cfg.p = 0.25;
  cfg.seed = 5;
  const auto tree = build_arborescence(inst.embedding, inst.power, cfg);

  const TempFile f;
  export_tree(tree, inst.embedding.labels(), TreeFormat::json, f.path());
  const auto doc = nlohmann::json::parse(f.read());

  CHECK(doc.at("format") == "orient-tree");
  CHECK(doc.at("version") == 1);
  CHECK(doc.at("distance") == "euclidean");
  CHECK(doc.at("build").at("p") == 0.25);
  CHECK(doc.at("build").at("order") == "descending");
  CHECK(doc.at("build").at("seed") == 5);
  CHECK(doc.at("build").at("accelerated") == true);
  CHECK(doc.at("root_vector").size() == 3);
  REQUIRE(doc.at("nodes").size() == inst.embedding.size());

  const auto& first = doc.at("nodes").at(0);
  CHECK(first.at("label") == inst.embedding.label(0));
  CHECK(first.at("insertion_rank").is_number_integer());
  // Root parents serialize as null, real parents as their label.
  bool saw_null = false, saw_label = false;
  for (const auto& node : doc.at("nodes")) {
    if (node.at("parent").is_null()) {
      saw_null = true;
    } else {
      saw_label = true;
    }
  }
  CHECK(saw_null);
  CHECK(saw_label);
}

TEST_CASE("json round trip preserves the tree exactly") {
  const auto inst = testsupport::random_instance(7, 60, 4);
  BuildConfig cfg;
  cfg.p = 0.7;
  cfg.distance = DistanceKind::cosine;
  cfg.order = InsertionOrder::random;
  cfg.seed = 123;
  const auto tree = build_arborescence(inst.embedding, inst.power, cfg);

  const TempFile f;
  export_tree(tree, inst.embedding.labels(), TreeFormat::json, f.path());
  const auto loaded = load_tree_json(f.path());

  CHECK(loaded.labels == inst.embedding.labels());
  CHECK(loaded.tree.parent == tree.parent);
  CHECK(loaded.tree.edge_length == tree.edge_length);
  CHECK(loaded.tree.insertion_rank == tree.insertion_rank);
  CHECK(loaded.tree.node_level == tree.node_level);
  CHECK(loaded.tree.node_power == tree.node_power);
  CHECK(loaded.tree.root_vector == tree.root_vector);
  CHECK(loaded.tree.distance == tree.distance);
  CHECK(loaded.tree.config.p == tree.config.p);
  CHECK(loaded.tree.config.seed == tree.config.seed);
  CHECK(loaded.tree.config.order == tree.config.order);

  // Re-exporting the loaded tree reproduces the file byte for byte.
  const TempFile g;
  export_tree(loaded.tree, loaded.labels, TreeFormat::json, g.path());
  CHECK(f.read() == g.read());
}

TEST_CASE("tsv export round trips through a plain parser") {
  const auto inst = testsupport::random_instance(13, 30, 2);
  const auto tree = build_arborescence(inst.embedding, inst.power, BuildConfig{});

  const TempFile f;
  export_tree(tree, inst.embedding.labels(), TreeFormat::tsv, f.path());

  std::istringstream in(f.read());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    REQUIRE(t1 != std::string::npos);
    REQUIRE(t2 != std::string::npos);
    const std::string child = line.substr(0, t1);
    const std::string parent = line.substr(t1 + 1, t2 - t1 - 1);
    const double length = std::stod(line.substr(t2 + 1));

    const auto idx = inst.embedding.index_of(child);
    REQUIRE(idx.has_value());
    const int node = Arborescence::node_of_entity(static_cast<int>(*idx));
    if (tree.parent[node] == Arborescence::root_node) {
      CHECK(parent == kRootLabel);
    } else {
      CHECK(parent ==
            inst.embedding.label(Arborescence::entity_of_node(tree.parent[node])));
    }
    CHECK(length == doctest::Approx(tree.edge_length[node]).epsilon(1e-15));
    ++rows;
  }
  CHECK(rows == inst.embedding.size());
}

TEST_CASE("dot export quotes and escapes labels") {
  Arborescence tree;
  tree.parent = {-1, 0, 1};
  tree.edge_length = {0.0, 0.5, 1.5};
  tree.insertion_rank = {-1, 0, 1};
  tree.node_level = {0, 1, 2};
  tree.node_power = {1.0, 2.0, 1.0};
  tree.root_vector = {0.0};
  const std::vector<std::string> labels{"plain", "has\"quote\\slash"};

  const TempFile f;
  export_tree(tree, labels, TreeFormat::dot, f.path());
  const auto text = f.read();
  CHECK(text.find("digraph") != std::string::npos);
  CHECK(text.find("\"plain\" -> \"__ROOT__\"") != std::string::npos);
  CHECK(text.find("\"has\\\"quote\\\\slash\" -> \"plain\"") != std::string::npos);
  CHECK(text.find("[length=1.5]") != std::string::npos);
}

TEST_CASE("tree json loading rejects damaged files") {
  CHECK(code_of([&] { load_tree_json("/nonexistent/tree.json"); }) ==
        ErrorCode::io_error);

  const TempFile not_json("this is not json");
  CHECK(code_of([&] { load_tree_json(not_json.path()); }) ==
        ErrorCode::malformed_input);

  const TempFile wrong_format(R"({"format": "something-else", "version": 1})");
  CHECK(code_of([&] { load_tree_json(wrong_format.path()); }) ==
        ErrorCode::malformed_input);

  // Valid export, then surgical damage.
  const auto e = validate_embedding({"a", "b"}, {{-1.0, 0.0}, {1.0, 0.0}});
  const auto p = PowerAssignment::from_raw({2.0, 1.0}, PowerProvider::external);
  const auto tree = build_arborescence(e, p, BuildConfig{});
  const TempFile good;
  export_tree(tree, {"a", "b"}, TreeFormat::json, good.path());
  auto doc = nlohmann::json::parse(good.read());

  {
    auto damaged = doc;
    damaged["nodes"][1]["label"] = "a";  // duplicate
    const TempFile f(damaged.dump());
    CHECK(code_of([&] { load_tree_json(f.path()); }) ==
          ErrorCode::duplicate_label);
  }
  {
    auto damaged = doc;
    damaged["nodes"][0]["label"] = "__ROOT__";
    const TempFile f(damaged.dump());
    CHECK(code_of([&] { load_tree_json(f.path()); }) ==
          ErrorCode::reserved_label);
  }
  {
    auto damaged = doc;
    damaged["nodes"][0]["parent"] = "ghost";
    const TempFile f(damaged.dump());
    CHECK(code_of([&] { load_tree_json(f.path()); }) ==
          ErrorCode::malformed_input);
  }
  {
    // Two nodes pointing at each other cannot satisfy rank ordering.
    auto damaged = doc;
    damaged["nodes"][0]["parent"] = "b";
    damaged["nodes"][1]["parent"] = "a";
    const TempFile f(damaged.dump());
    CHECK_THROWS_AS(load_tree_json(f.path()), Error);
  }
  {
    auto damaged = doc;
    damaged["nodes"][0].erase("power");
    const TempFile f(damaged.dump());
    CHECK(code_of([&] { load_tree_json(f.path()); }) ==
          ErrorCode::malformed_input);
  }
}

TEST_CASE("double formatting is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.25) == "-2.25");
  CHECK(format_double(0.0) == "0");
  for (const double v : {1.0 / 3.0, 2e-7, 123456.789, -0.875}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("curve csv layout") {
  AccuracyCurve curve;
  AccuracyBucket b;
  b.center = 25.0;
  b.key_mean = 1.5;
  b.count = 2;
  b.directed_hits = 1;
  b.reversed_hits = 0;
  b.undirected_hits = 1;
  b.directed_acc = 0.5;
  b.reversed_acc = 0.0;
  b.undirected_acc = 0.5;
  curve.buckets.push_back(b);

  const TempFile f;
  write_curve_csv(f.path(), curve);
  CHECK(f.read() ==
        "center,key_mean,count,directed_hits,reversed_hits,undirected_hits,"
        "directed_acc,reversed_acc,undirected_acc\n"
        "25,1.5,2,1,0,1,0.5,0,0.5\n");
}

TEST_CASE("sweep csv layout") {
  SweepResult result;
  SweepCell cell;
  cell.p = 0.5;
  cell.order = InsertionOrder::descending;
  cell.report.n_edges_scored = 10;
  cell.report.directed_acc = 0.8;
  cell.report.reversed_acc = 0.1;
  cell.report.undirected_acc = 0.9;
  result.cells.push_back(cell);

  SweepCell other = cell;
  other.p = 0.25;
  other.report.directed_acc = 0.4;
  other.hit_rate = 0.75;
  result.cells.push_back(other);
  result.best_per_order.push_back(cell);

  const TempFile f;
  write_sweep_csv(f.path(), result);
  CHECK(f.read() ==
        "order,p,n_edges_scored,directed_acc,reversed_acc,undirected_acc,"
        "hit_rate,best\n"
        "descending,0.5,10,0.8,0.1,0.9,,1\n"
        "descending,0.25,10,0.4,0.1,0.9,0.75,0\n");
}

TEST_CASE("csv quoting") {
  const TempFile f;
  write_csv(f.path(), {"a", "b"},
            {{"plain", "with,comma"}, {"with\"quote", "line\nbreak"}});
  CHECK(f.read() ==
        "a,b\nplain,\"with,comma\"\n\"with\"\"quote\",\"line\nbreak\"\n");
}
