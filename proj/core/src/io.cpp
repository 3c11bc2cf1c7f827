#include "orient/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "orient/csv.hpp"
#include "orient/error.hpp"

namespace orient {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
      ++i;
    }
    if (i > start) {
      tokens.push_back(line.substr(start, i - start));
    }
  }
  return tokens;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

double parse_double(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    raise(ErrorCode::malformed_input,
          "line " + std::to_string(line_no) + ": bad number '" +
              std::string(token) + "'");
  }
  return value;
}

long long parse_int(std::string_view token, std::size_t line_no) {
  long long value = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    raise(ErrorCode::malformed_input,
          "line " + std::to_string(line_no) + ": bad integer '" +
              std::string(token) + "'");
  }
  return value;
}

void check_label(std::string_view label, std::size_t line_no) {
  if (label == kRootLabel) {
    raise(ErrorCode::reserved_label,
          "line " + std::to_string(line_no) + ": label '" +
              std::string(kRootLabel) + "' is reserved for the root");
  }
}

}  // namespace

const char* to_string(EmbeddingFormat format) {
  return format == EmbeddingFormat::glove_text ? "glove_text" : "word2vec_text";
}

EmbeddingFormat embedding_format_from_string(std::string_view name) {
  if (name == "glove_text" || name == "glove") {
    return EmbeddingFormat::glove_text;
  }
  if (name == "word2vec_text" || name == "word2vec") {
    return EmbeddingFormat::word2vec_text;
  }
  raise(ErrorCode::bad_argument,
        "unknown embedding format: " + std::string(name));
}

EmbeddingSet load_embedding(const std::string& path, EmbeddingFormat format) {
  const auto lines = read_lines(path);
  std::vector<std::string> labels;
  std::vector<double> data;
  std::size_t dim = 0;
  long long expected_rows = -1;
  bool header_seen = false;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto tokens = split_ws(lines[li]);
    if (tokens.empty()) {
      continue;
    }
    if (format == EmbeddingFormat::word2vec_text && !header_seen) {
      if (tokens.size() != 2) {
        raise(ErrorCode::malformed_input,
              "line " + std::to_string(line_no) +
                  ": word2vec header must be 'n d'");
      }
      expected_rows = parse_int(tokens[0], line_no);
      const long long header_dim = parse_int(tokens[1], line_no);
      if (expected_rows < 1 || header_dim < 1) {
        raise(ErrorCode::malformed_input,
              "line " + std::to_string(line_no) + ": header values must be >= 1");
      }
      dim = static_cast<std::size_t>(header_dim);
      header_seen = true;
      continue;
    }
    if (tokens.size() < 2) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(line_no) + ": expected label and values");
    }
    check_label(tokens[0], line_no);
    if (dim == 0) {
      dim = tokens.size() - 1;
    } else if (tokens.size() - 1 != dim) {
      raise(ErrorCode::dimension_mismatch,
            "line " + std::to_string(line_no) + ": expected " +
                std::to_string(dim) + " values, got " +
                std::to_string(tokens.size() - 1));
    }
    labels.emplace_back(tokens[0]);
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      data.push_back(parse_double(tokens[t], line_no));
    }
  }

  if (format == EmbeddingFormat::word2vec_text) {
    if (!header_seen) {
      raise(ErrorCode::malformed_input, "missing word2vec header line");
    }
    if (static_cast<long long>(labels.size()) != expected_rows) {
      raise(ErrorCode::size_mismatch,
            "header announced " + std::to_string(expected_rows) +
                " rows, file has " + std::to_string(labels.size()));
    }
  }
  if (labels.empty()) {
    raise(ErrorCode::empty_input, "no embedding rows in " + path);
  }
  return validate_embedding_flat(std::move(labels), std::move(data), dim);
}

RelationSet load_relations(const std::string& path, std::string kind) {
  const auto lines = read_lines(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& line = lines[li];
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(li + 1) + ": expected 'child<TAB>parent'");
    }
    pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return RelationSet(std::move(pairs), std::move(kind));
}

LchMap load_lch(const std::string& path) {
  const auto lines = read_lines(path);
  LchMap map;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& line = lines[li];
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(li + 1) +
                ": expected 'w1<TAB>w2<TAB>l1,l2,...'");
    }
    std::vector<std::string> labels;
    std::size_t start = 0;
    const std::string_view third = fields[2];
    for (std::size_t i = 0; i <= third.size(); ++i) {
      if (i == third.size() || third[i] == ',') {
        if (i > start) {
          labels.emplace_back(third.substr(start, i - start));
        }
        start = i + 1;
      }
    }
    map.insert(std::string(fields[0]), std::string(fields[1]),
               std::move(labels));
  }
  return map;
}

PowerAssignment load_power_file(const std::string& path,
                                const EmbeddingSet& embedding) {
  const auto lines = read_lines(path);
  std::unordered_map<std::string, double> by_label;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& line = lines[li];
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty()) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(li + 1) + ": expected 'label<TAB>power'");
    }
    const double value = parse_double(fields[1], li + 1);
    if (!by_label.emplace(std::string(fields[0]), value).second) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(li + 1) + ": duplicate power for '" +
                std::string(fields[0]) + "'");
    }
  }
  std::vector<double> raw(embedding.size());
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    const auto it = by_label.find(embedding.label(i));
    if (it == by_label.end()) {
      raise(ErrorCode::malformed_input,
            "no power value for label '" + embedding.label(i) + "'");
    }
    raw[i] = it->second;
  }
  return PowerAssignment::from_raw(std::move(raw), PowerProvider::external);
}

const char* to_string(TreeFormat format) {
  switch (format) {
    case TreeFormat::json: return "json";
    case TreeFormat::dot: return "dot";
    case TreeFormat::tsv: return "tsv";
  }
  return "unknown";
}

TreeFormat tree_format_from_string(std::string_view name) {
  if (name == "json") return TreeFormat::json;
  if (name == "dot") return TreeFormat::dot;
  if (name == "tsv") return TreeFormat::tsv;
  raise(ErrorCode::bad_argument, "unknown tree format: " + std::string(name));
}

namespace {

std::string dot_escape(const std::string& label) {
  std::string out;
  out.reserve(label.size());
  for (char c : label) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path);
  }
  out << content;
  out.flush();
  if (!out.good()) {
    raise(ErrorCode::io_error, "failed writing: " + path);
  }
}

}  // namespace

void export_tree(const Arborescence& tree,
                 const std::vector<std::string>& labels, TreeFormat format,
                 const std::string& path) {
  const std::size_t n = tree.n_entities();
  if (labels.size() != n) {
    raise(ErrorCode::size_mismatch, "label count differs from tree size");
  }

  if (format == TreeFormat::json) {
    nlohmann::ordered_json j;
    j["format"] = "orient-tree";
    j["version"] = 1;
    j["distance"] = to_string(tree.distance);
    j["power_provider"] = to_string(tree.provider);
    j["build"] = {
        {"p", tree.config.p},
        {"order", to_string(tree.config.order)},
        {"parent_rule", to_string(tree.config.parent_rule)},
        {"seed", tree.config.seed},
        {"accelerated", tree.config.accelerated},
        {"epsilon_dist", tree.config.epsilon_dist},
    };
    j["root_power"] = tree.node_power[Arborescence::root_node];
    j["root_vector"] = tree.root_vector;
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t e = 0; e < n; ++e) {
      const int node = Arborescence::node_of_entity(static_cast<int>(e));
      const int parent = tree.parent[node];
      nlohmann::ordered_json entry;
      entry["label"] = labels[e];
      if (parent == Arborescence::root_node) {
        entry["parent"] = nullptr;
      } else {
        entry["parent"] = labels[Arborescence::entity_of_node(parent)];
      }
      entry["edge_length"] = tree.edge_length[node];
      entry["insertion_rank"] = tree.insertion_rank[node];
      entry["level"] = tree.node_level[node];
      entry["power"] = tree.node_power[node];
      nodes.push_back(std::move(entry));
    }
    write_text_file(path, j.dump(2) + "\n");
    return;
  }

  std::string out;
  if (format == TreeFormat::dot) {
    out += "digraph arborescence {\n";
    for (std::size_t e = 0; e < n; ++e) {
      const int node = Arborescence::node_of_entity(static_cast<int>(e));
      const int parent = tree.parent[node];
      const std::string parent_label =
          parent == Arborescence::root_node
              ? kRootLabel
              : labels[Arborescence::entity_of_node(parent)];
      out += "  \"" + dot_escape(labels[e]) + "\" -> \"" +
             dot_escape(parent_label) + "\" [length=" +
             format_double(tree.edge_length[node]) + "];\n";
    }
    out += "}\n";
  } else {
    for (std::size_t e = 0; e < n; ++e) {
      const int node = Arborescence::node_of_entity(static_cast<int>(e));
      const int parent = tree.parent[node];
      const std::string parent_label =
          parent == Arborescence::root_node
              ? kRootLabel
              : labels[Arborescence::entity_of_node(parent)];
      out += labels[e] + "\t" + parent_label + "\t" +
             format_double(tree.edge_length[node]) + "\n";
    }
  }
  write_text_file(path, out);
}

LoadedTree load_tree_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open: " + path);
  }
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.value("format", "") != "orient-tree") {
      raise(ErrorCode::malformed_input, "not a tree file: " + path);
    }
    const auto& nodes = j.at("nodes");
    const std::size_t n = nodes.size();
    if (n == 0) {
      raise(ErrorCode::empty_input, "tree file has no nodes");
    }

    LoadedTree loaded;
    loaded.labels.reserve(n);
    std::unordered_map<std::string, int> index;
    index.reserve(n);
    for (const auto& entry : nodes) {
      std::string label = entry.at("label").get<std::string>();
      if (label == kRootLabel) {
        raise(ErrorCode::reserved_label,
              "tree file uses the reserved root label");
      }
      if (!index.emplace(label, static_cast<int>(loaded.labels.size())).second) {
        raise(ErrorCode::duplicate_label, "duplicate label: " + label);
      }
      loaded.labels.push_back(std::move(label));
    }

    Arborescence& tree = loaded.tree;
    tree.parent.assign(n + 1, -1);
    tree.edge_length.assign(n + 1, 0.0);
    tree.insertion_rank.assign(n + 1, -1);
    tree.node_level.assign(n + 1, 0);
    tree.node_power.assign(n + 1, 0.0);
    tree.distance = distance_kind_from_string(j.at("distance").get<std::string>());
    tree.provider =
        power_provider_from_string(j.at("power_provider").get<std::string>());
    const auto& build = j.at("build");
    tree.config.p = build.at("p").get<double>();
    tree.config.order =
        insertion_order_from_string(build.at("order").get<std::string>());
    tree.config.parent_rule =
        parent_rule_from_string(build.at("parent_rule").get<std::string>());
    tree.config.seed = build.at("seed").get<std::uint64_t>();
    tree.config.accelerated = build.at("accelerated").get<bool>();
    tree.config.epsilon_dist = build.at("epsilon_dist").get<double>();
    tree.config.distance = tree.distance;
    tree.node_power[Arborescence::root_node] = j.at("root_power").get<double>();
    tree.root_vector = j.at("root_vector").get<std::vector<double>>();

    for (std::size_t e = 0; e < n; ++e) {
      const auto& entry = nodes[e];
      const int node = Arborescence::node_of_entity(static_cast<int>(e));
      if (entry.at("parent").is_null()) {
        tree.parent[node] = Arborescence::root_node;
      } else {
        const std::string parent_label = entry.at("parent").get<std::string>();
        const auto it = index.find(parent_label);
        if (it == index.end()) {
          raise(ErrorCode::malformed_input,
                "unknown parent label: " + parent_label);
        }
        tree.parent[node] = Arborescence::node_of_entity(it->second);
      }
      tree.edge_length[node] = entry.at("edge_length").get<double>();
      tree.insertion_rank[node] = entry.at("insertion_rank").get<int>();
      tree.node_level[node] = entry.at("level").get<int>();
      tree.node_power[node] = entry.at("power").get<double>();
    }
    validate_arborescence(tree);
    return loaded;
  } catch (const nlohmann::json::exception& err) {
    raise(ErrorCode::malformed_input,
          "tree file " + path + ": " + std::string(err.what()));
  }
}

void write_curve_csv(const std::string& path, const AccuracyCurve& curve) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.buckets.size());
  for (const auto& b : curve.buckets) {
    rows.push_back({format_double(b.center), format_double(b.key_mean),
                    std::to_string(b.count), std::to_string(b.directed_hits),
                    std::to_string(b.reversed_hits),
                    std::to_string(b.undirected_hits),
                    format_double(b.directed_acc), format_double(b.reversed_acc),
                    format_double(b.undirected_acc)});
  }
  write_csv(path,
            {"center", "key_mean", "count", "directed_hits", "reversed_hits",
             "undirected_hits", "directed_acc", "reversed_acc",
             "undirected_acc"},
            rows);
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  auto is_best = [&](const SweepCell& cell) {
    for (const auto& best : result.best_per_order) {
      if (best.order == cell.order && best.p == cell.p) {
        return true;
      }
    }
    return false;
  };
  std::vector<std::vector<std::string>> rows;
  rows.reserve(result.cells.size());
  for (const auto& cell : result.cells) {
    rows.push_back({to_string(cell.order), format_double(cell.p),
                    std::to_string(cell.report.n_edges_scored),
                    format_double(cell.report.directed_acc),
                    format_double(cell.report.reversed_acc),
                    format_double(cell.report.undirected_acc),
                    cell.hit_rate ? format_double(*cell.hit_rate) : "",
                    is_best(cell) ? "1" : "0"});
  }
  write_csv(path,
            {"order", "p", "n_edges_scored", "directed_acc", "reversed_acc",
             "undirected_acc", "hit_rate", "best"},
            rows);
}

}  // namespace orient
