// Command line front end: build trees, evaluate them against ground truth,
// sweep the balance parameter, export power diagnostics, cut subtrees.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "orient/builder.hpp"
#include "orient/csv.hpp"
#include "orient/error.hpp"
#include "orient/eval.hpp"
#include "orient/io.hpp"
#include "orient/lca.hpp"
#include "orient/power.hpp"

namespace {

using orient::ErrorCode;
using orient::raise;

orient::EmbeddingSet load_embedding_arg(const std::string& path,
                                        const std::string& format) {
  return orient::load_embedding(path,
                                orient::embedding_format_from_string(format));
}

orient::EmbeddingSet restrict_to_truth(const orient::EmbeddingSet& embedding,
                                       const orient::RelationSet& truth) {
  std::unordered_set<std::string> keep;
  for (const auto& [child, parent] : truth.pairs()) {
    keep.insert(child);
    keep.insert(parent);
  }
  std::vector<std::string> labels;
  std::vector<double> data;
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    if (keep.count(embedding.label(i)) == 0) {
      continue;
    }
    labels.push_back(embedding.label(i));
    const auto row = embedding.row(i);
    data.insert(data.end(), row.begin(), row.end());
  }
  return orient::validate_embedding_flat(std::move(labels), std::move(data),
                                         embedding.dim());
}

std::unordered_map<std::string, long long> load_rank_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::io_error, "cannot open: " + path);
  }
  std::unordered_map<std::string, long long> rank_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(line_no) + ": expected 'label<TAB>rank'");
    }
    long long rank = 0;
    try {
      rank = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(line_no) + ": bad rank");
    }
    if (rank < 0 ||
        !rank_of.emplace(line.substr(0, tab), rank).second) {
      raise(ErrorCode::malformed_input,
            "line " + std::to_string(line_no) + ": duplicate or negative rank");
    }
  }
  return rank_of;
}

// Rank of each entity for zipf power: file order unless a rank file
// overrides it.
std::vector<long long> entity_ranks(const orient::EmbeddingSet& embedding,
                                    const std::string& rank_file) {
  std::vector<long long> ranks(embedding.size());
  if (rank_file.empty()) {
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      ranks[i] = static_cast<long long>(i);
    }
    return ranks;
  }
  const auto rank_of = load_rank_file(rank_file);
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    const auto it = rank_of.find(embedding.label(i));
    if (it == rank_of.end()) {
      raise(ErrorCode::malformed_input,
            "no rank for label '" + embedding.label(i) + "'");
    }
    ranks[i] = it->second;
  }
  return ranks;
}

struct PowerOpts {
  std::string spec = "zipf";  // zipf|pca|degree|pagerank|file:PATH
  int pca_k = 3;
  double zipf_s = 1.0;
  std::string rank_file;
  std::string truth_path;  // needed by degree / pagerank
};

void add_power_options(CLI::App* cmd, PowerOpts& opts, bool power_required) {
  auto* p = cmd->add_option("--power", opts.spec,
                            "power provider: zipf|pca|degree|pagerank|file:PATH");
  if (power_required) {
    p->required();
  }
  cmd->add_option("--pca-k", opts.pca_k, "principal components for --power pca");
  cmd->add_option("--zipf-s", opts.zipf_s, "zipf exponent for --power zipf");
  cmd->add_option("--rank-file", opts.rank_file,
                  "label<TAB>rank overriding file-order frequency ranks");
}

orient::PowerAssignment make_power(const orient::EmbeddingSet& embedding,
                                   const PowerOpts& opts,
                                   const orient::RelationSet* truth) {
  if (opts.spec.rfind("file:", 0) == 0) {
    return orient::load_power_file(opts.spec.substr(5), embedding);
  }
  if (opts.spec == "zipf") {
    if (opts.rank_file.empty()) {
      return orient::zipf_power(embedding.size(), opts.zipf_s);
    }
    const auto ranks = entity_ranks(embedding, opts.rank_file);
    std::vector<double> raw(ranks.size());
    const double n = static_cast<double>(embedding.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      raw[i] = n / std::pow(static_cast<double>(ranks[i]) + 1.0, opts.zipf_s);
    }
    return orient::PowerAssignment::from_raw(std::move(raw),
                                             orient::PowerProvider::zipf);
  }
  if (opts.spec == "pca") {
    const auto model = orient::fit_pca(embedding, opts.pca_k);
    return orient::pca_power(embedding, model);
  }
  if (opts.spec == "degree" || opts.spec == "pagerank") {
    if (truth == nullptr) {
      raise(ErrorCode::bad_argument,
            "--power " + opts.spec + " needs --truth to supply the graph");
    }
    return opts.spec == "degree" ? orient::degree_power(*truth, embedding)
                                 : orient::pagerank_power(*truth, embedding);
  }
  raise(ErrorCode::bad_argument, "unknown power provider: " + opts.spec);
}

// Decimal p-grid "lo:hi:step" enumerated over scaled integers so the emitted
// values are the round decimals the user asked for.
std::vector<double> parse_p_grid(const std::string& grid) {
  auto parse_decimal = [&](const std::string& tok) -> std::pair<long long, long long> {
    if (tok.empty()) {
      raise(ErrorCode::bad_argument, "bad p grid: " + grid);
    }
    long long num = 0;
    long long den = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (char c : tok) {
      if (c == '.') {
        if (seen_dot) {
          raise(ErrorCode::bad_argument, "bad p grid: " + grid);
        }
        seen_dot = true;
        continue;
      }
      if (c < '0' || c > '9' || num > 100000000) {
        raise(ErrorCode::bad_argument, "bad p grid: " + grid);
      }
      num = num * 10 + (c - '0');
      if (seen_dot) {
        den *= 10;
      }
      seen_digit = true;
    }
    if (!seen_digit) {
      raise(ErrorCode::bad_argument, "bad p grid: " + grid);
    }
    return {num, den};
  };

  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= grid.size(); ++i) {
    if (i == grid.size() || grid[i] == ':') {
      parts.push_back(grid.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() == 1) {
    const auto [num, den] = parse_decimal(parts[0]);
    return {static_cast<double>(num) / static_cast<double>(den)};
  }
  if (parts.size() != 3) {
    raise(ErrorCode::bad_argument, "p grid must be 'lo:hi:step' or a value");
  }
  const auto lo = parse_decimal(parts[0]);
  const auto hi = parse_decimal(parts[1]);
  const auto step = parse_decimal(parts[2]);
  long long den = std::max({lo.second, hi.second, step.second});
  const long long a = lo.first * (den / lo.second);
  const long long b = hi.first * (den / hi.second);
  const long long s = step.first * (den / step.second);
  if (s <= 0 || a > b) {
    raise(ErrorCode::bad_argument, "bad p grid: " + grid);
  }
  std::vector<double> values;
  for (long long v = a; v <= b; v += s) {
    values.push_back(static_cast<double>(v) / static_cast<double>(den));
  }
  return values;
}

std::vector<orient::InsertionOrder> parse_orders(const std::string& orders) {
  std::vector<orient::InsertionOrder> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= orders.size(); ++i) {
    if (i == orders.size() || orders[i] == ',') {
      const std::string tok = orders.substr(start, i - start);
      if (!tok.empty()) {
        out.push_back(orient::insertion_order_from_string(tok));
      }
      start = i + 1;
    }
  }
  if (out.empty()) {
    raise(ErrorCode::bad_argument, "no insertion orders given");
  }
  return out;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path);
  }
  out << j.dump(2) << "\n";
  out.flush();
  if (!out.good()) {
    raise(ErrorCode::io_error, "failed writing: " + path);
  }
}

std::filesystem::path sibling_dir(const std::string& out_path) {
  const auto parent = std::filesystem::path(out_path).parent_path();
  return parent.empty() ? std::filesystem::path(".") : parent;
}

void print_report(const orient::EvalReport& report) {
  std::cout << "n_edges_scored: " << report.n_edges_scored << "\n"
            << "directed_acc: " << orient::format_double(report.directed_acc)
            << "\n"
            << "reversed_acc: " << orient::format_double(report.reversed_acc)
            << "\n"
            << "undirected_acc: "
            << orient::format_double(report.undirected_acc) << "\n";
  if (report.synonym_acc) {
    std::cout << "synonym_acc: " << orient::format_double(*report.synonym_acc)
              << "\n";
  }
}

// Embedding rows reordered to tree-entity order, so sampled pair indices are
// tree entities directly.
orient::EmbeddingSet embedding_in_tree_order(
    const orient::EmbeddingSet& embedding,
    const std::vector<std::string>& tree_labels) {
  std::vector<std::string> labels;
  std::vector<double> data;
  labels.reserve(tree_labels.size());
  for (const auto& label : tree_labels) {
    const auto idx = embedding.index_of(label);
    if (!idx) {
      raise(ErrorCode::malformed_input,
            "embedding is missing tree label '" + label + "'");
    }
    labels.push_back(label);
    const auto row = embedding.row(*idx);
    data.insert(data.end(), row.begin(), row.end());
  }
  return orient::validate_embedding_flat(std::move(labels), std::move(data),
                                         embedding.dim());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greedy arborescence induction over embeddings"};
  app.require_subcommand(1);

  // build
  auto* build_cmd = app.add_subcommand("build", "build a tree and export it");
  std::string b_embedding, b_format = "glove", b_distance = "l2";
  std::string b_order = "desc", b_rule = "score", b_out, b_tree_format = "json";
  double b_p = 0.6;
  std::uint64_t b_seed = 0;
  bool b_no_accel = false, b_restrict = false;
  PowerOpts b_power;
  build_cmd->add_option("--embedding", b_embedding)->required();
  build_cmd->add_option("--format", b_format, "glove|word2vec");
  add_power_options(build_cmd, b_power, true);
  build_cmd->add_option("--distance", b_distance, "l2|cosine");
  build_cmd->add_option("--p", b_p, "balance between proximity and power");
  build_cmd->add_option("--order", b_order, "desc|rand|asc");
  build_cmd->add_option("--parent-rule", b_rule, "score|random");
  build_cmd->add_option("--seed", b_seed);
  build_cmd->add_flag("--no-accel", b_no_accel, "disable the ball tree index");
  build_cmd->add_option("--truth", b_power.truth_path,
                        "relation TSV (graph for degree/pagerank power)");
  build_cmd->add_flag("--restrict-to-truth", b_restrict,
                      "keep only entities mentioned in --truth");
  build_cmd->add_option("--tree-format", b_tree_format, "json|dot|tsv");
  build_cmd->add_option("--out", b_out)->required();

  // eval-edges
  auto* edges_cmd =
      app.add_subcommand("eval-edges", "score tree edges against truth");
  std::string e_tree, e_truth, e_curves, e_synonyms;
  int e_buckets = 100, e_smooth = 0;
  edges_cmd->add_option("--tree", e_tree)->required();
  edges_cmd->add_option("--truth", e_truth)->required();
  edges_cmd->add_option("--buckets", e_buckets, "buckets per accuracy curve");
  edges_cmd->add_option("--smooth", e_smooth, "moving-average window");
  edges_cmd->add_option("--curves", e_curves, "directory for curve CSVs");
  edges_cmd->add_option("--synonyms", e_synonyms,
                        "symmetric pair TSV for synonym accuracy");

  // eval-lca
  auto* lca_cmd =
      app.add_subcommand("eval-lca", "hit rate of tree LCAs against LCH sets");
  std::string l_tree, l_embedding, l_format = "glove", l_lch;
  std::size_t l_pairs = 10000;
  int l_knn = 20, l_closure = 2;
  std::uint64_t l_seed = 0;
  lca_cmd->add_option("--tree", l_tree)->required();
  lca_cmd->add_option("--embedding", l_embedding)->required();
  lca_cmd->add_option("--format", l_format, "glove|word2vec");
  lca_cmd->add_option("--lch", l_lch)->required();
  lca_cmd->add_option("--pairs", l_pairs);
  lca_cmd->add_option("--knn", l_knn);
  lca_cmd->add_option("--closure", l_closure);
  lca_cmd->add_option("--seed", l_seed);

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "evaluate a grid of p values and orders");
  std::string s_embedding, s_format = "glove", s_truth, s_distance = "l2";
  std::string s_grid = "0:1:0.1", s_orders = "desc,rand,asc", s_out, s_lch;
  std::uint64_t s_seed = 0;
  bool s_no_accel = false, s_restrict = false;
  std::size_t s_pairs = 10000;
  int s_knn = 20, s_closure = 2;
  PowerOpts s_power;
  sweep_cmd->add_option("--embedding", s_embedding)->required();
  sweep_cmd->add_option("--format", s_format, "glove|word2vec");
  sweep_cmd->add_option("--truth", s_truth)->required();
  add_power_options(sweep_cmd, s_power, false);
  sweep_cmd->add_option("--distance", s_distance, "l2|cosine");
  sweep_cmd->add_option("--p-grid", s_grid, "lo:hi:step over p");
  sweep_cmd->add_option("--orders", s_orders, "comma list of desc|rand|asc");
  sweep_cmd->add_option("--seed", s_seed);
  sweep_cmd->add_flag("--no-accel", s_no_accel);
  sweep_cmd->add_flag("--restrict-to-truth", s_restrict);
  sweep_cmd->add_option("--lch", s_lch, "LCH TSV; adds a hit_rate column");
  sweep_cmd->add_option("--pairs", s_pairs);
  sweep_cmd->add_option("--knn", s_knn);
  sweep_cmd->add_option("--closure", s_closure);
  sweep_cmd->add_option("--out", s_out, "CSV path")->required();

  // power
  auto* power_cmd =
      app.add_subcommand("power", "compute per-entity power and diagnostics");
  std::string p_embedding, p_format = "glove", p_out;
  bool p_diagnostics = false;
  int p_window = 50;
  PowerOpts p_power;
  power_cmd->add_option("--embedding", p_embedding)->required();
  power_cmd->add_option("--format", p_format, "glove|word2vec");
  add_power_options(power_cmd, p_power, true);
  power_cmd->add_option("--truth", p_power.truth_path,
                        "relation TSV (graph and rank scatter)");
  power_cmd->add_flag("--diagnostics", p_diagnostics,
                      "also write rank-curve CSVs next to --out");
  power_cmd->add_option("--window", p_window, "rank-curve smoothing window");
  power_cmd->add_option("--out", p_out, "CSV path")->required();

  // cut
  auto* cut_cmd =
      app.add_subcommand("cut", "cut long edges and emit subtree clusters");
  std::string c_tree, c_out;
  double c_percentile = 90.0;
  cut_cmd->add_option("--tree", c_tree)->required();
  cut_cmd->add_option("--percentile", c_percentile,
                      "edge-length percentile kept intact");
  cut_cmd->add_option("--out", c_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (build_cmd->parsed()) {
      auto embedding = load_embedding_arg(b_embedding, b_format);
      std::optional<orient::RelationSet> truth;
      if (!b_power.truth_path.empty()) {
        truth = orient::load_relations(b_power.truth_path, "truth");
      }
      if (b_restrict) {
        if (!truth) {
          raise(ErrorCode::bad_argument, "--restrict-to-truth needs --truth");
        }
        embedding = restrict_to_truth(embedding, *truth);
      }
      const auto power =
          make_power(embedding, b_power, truth ? &*truth : nullptr);
      orient::BuildConfig cfg;
      cfg.p = b_p;
      cfg.distance = orient::distance_kind_from_string(b_distance);
      cfg.order = orient::insertion_order_from_string(b_order);
      cfg.parent_rule = orient::parent_rule_from_string(b_rule);
      cfg.seed = b_seed;
      cfg.accelerated = !b_no_accel;
      const auto tree = orient::build_arborescence(embedding, power, cfg);
      orient::export_tree(tree, embedding.labels(),
                          orient::tree_format_from_string(b_tree_format), b_out);
      std::cout << "entities: " << tree.n_entities() << "\n"
                << "tree: " << b_out << "\n";
      return 0;
    }

    if (edges_cmd->parsed()) {
      const auto loaded = orient::load_tree_json(e_tree);
      const auto truth = orient::load_relations(e_truth, "truth");
      auto report = orient::edge_accuracy(loaded.tree, loaded.labels, truth);
      if (!e_synonyms.empty()) {
        const auto synonyms = orient::load_relations(e_synonyms, "synonyms");
        report.synonym_acc =
            orient::synonym_accuracy(loaded.tree, loaded.labels, synonyms);
      }
      print_report(report);
      if (!e_curves.empty()) {
        std::filesystem::create_directories(e_curves);
        const auto dir = std::filesystem::path(e_curves);
        orient::write_curve_csv(
            (dir / "by_edge_length.csv").string(),
            orient::accuracy_by_edge_length(loaded.tree, loaded.labels, truth,
                                            e_buckets, e_smooth));
        orient::write_curve_csv(
            (dir / "by_node_power.csv").string(),
            orient::accuracy_by_node_power(loaded.tree, loaded.labels, truth,
                                           e_buckets, e_smooth));
        orient::write_curve_csv(
            (dir / "by_tree_level.csv").string(),
            orient::accuracy_by_tree_level(loaded.tree, loaded.labels, truth));
      }
      return 0;
    }

    if (lca_cmd->parsed()) {
      const auto loaded = orient::load_tree_json(l_tree);
      const auto full_embedding = load_embedding_arg(l_embedding, l_format);
      const auto embedding =
          embedding_in_tree_order(full_embedding, loaded.labels);
      const auto lch = orient::load_lch(l_lch);

      const auto uniform = orient::PowerAssignment::from_raw(
          std::vector<double>(embedding.size(), 1.0),
          orient::PowerProvider::external);
      orient::BallTree nn(embedding, uniform);
      for (std::size_t i = 0; i < embedding.size(); ++i) {
        nn.activate(static_cast<int>(i));
      }
      const auto pairs = orient::sample_pairs(embedding, nn, l_pairs, l_knn,
                                              l_seed, loaded.tree.distance);
      const orient::LcaIndex index(loaded.tree);
      std::vector<std::vector<std::string>> lca_sets, lch_sets;
      lca_sets.reserve(pairs.size());
      lch_sets.reserve(pairs.size());
      long long scorable = 0;
      for (const auto& [a, b] : pairs) {
        const auto nodes = orient::lca_closure(
            index, loaded.tree, orient::Arborescence::node_of_entity(a),
            orient::Arborescence::node_of_entity(b), l_closure);
        std::vector<std::string> labels;
        labels.reserve(nodes.size());
        for (int node : nodes) {
          labels.push_back(
              loaded.labels[orient::Arborescence::entity_of_node(node)]);
        }
        lca_sets.push_back(std::move(labels));
        const auto* truth_set = lch.find(loaded.labels[a], loaded.labels[b]);
        if (truth_set != nullptr && !truth_set->empty()) {
          ++scorable;
          lch_sets.push_back(*truth_set);
        } else {
          lch_sets.emplace_back();
        }
      }
      const double rate = orient::hit_rate(lca_sets, lch_sets);
      std::cout << "pairs: " << pairs.size() << "\n"
                << "scorable_pairs: " << scorable << "\n"
                << "hit_rate: " << orient::format_double(rate) << "\n";
      return 0;
    }

    if (sweep_cmd->parsed()) {
      auto embedding = load_embedding_arg(s_embedding, s_format);
      const auto truth = orient::load_relations(s_truth, "truth");
      if (s_restrict) {
        embedding = restrict_to_truth(embedding, truth);
      }
      s_power.truth_path = s_truth;
      const auto power = make_power(embedding, s_power, &truth);
      orient::BuildConfig cfg;
      cfg.distance = orient::distance_kind_from_string(s_distance);
      cfg.seed = s_seed;
      cfg.accelerated = !s_no_accel;
      std::optional<orient::LchMap> lch;
      std::optional<orient::SweepLcaInputs> lca_inputs;
      if (!s_lch.empty()) {
        lch = orient::load_lch(s_lch);
        lca_inputs = orient::SweepLcaInputs{&*lch, s_pairs, s_knn, s_closure,
                                            s_seed};
      }
      const auto result =
          orient::sweep_p(embedding, power, cfg, parse_p_grid(s_grid),
                          parse_orders(s_orders), truth, lca_inputs);
      orient::write_sweep_csv(s_out, result);
      for (const auto& best : result.best_per_order) {
        std::cout << "best[" << to_string(best.order)
                  << "]: p=" << orient::format_double(best.p)
                  << " directed_acc="
                  << orient::format_double(best.report.directed_acc) << "\n";
      }
      std::cout << "table: " << s_out << "\n";
      return 0;
    }

    if (power_cmd->parsed()) {
      const auto embedding = load_embedding_arg(p_embedding, p_format);
      std::optional<orient::RelationSet> truth;
      if (!p_power.truth_path.empty()) {
        truth = orient::load_relations(p_power.truth_path, "truth");
      }
      const auto power =
          make_power(embedding, p_power, truth ? &*truth : nullptr);
      std::vector<std::vector<std::string>> rows;
      rows.reserve(embedding.size());
      for (std::size_t i = 0; i < embedding.size(); ++i) {
        rows.push_back({std::to_string(i), embedding.label(i),
                        orient::format_double(power.power(i))});
      }
      orient::write_csv(p_out, {"rank", "label", "power"}, rows);
      std::cout << "powers: " << p_out << "\n";

      if (p_diagnostics) {
        const auto dir = sibling_dir(p_out);
        const auto norm_curve = orient::norm_rank_curve(embedding, p_window);
        std::vector<std::vector<std::string>> norm_rows;
        for (std::size_t i = 0; i < embedding.size(); ++i) {
          norm_rows.push_back(
              {std::to_string(i), embedding.label(i),
               orient::format_double(orient::l2_norm(embedding.row(i))),
               orient::format_double(norm_curve.values[i])});
        }
        orient::write_csv((dir / "norm_rank.csv").string(),
                          {"rank", "label", "norm", "norm_smoothed"}, norm_rows);

        const auto power_curve = orient::power_rank_curve(power, p_window);
        std::vector<std::vector<std::string>> power_rows;
        for (std::size_t i = 0; i < embedding.size(); ++i) {
          power_rows.push_back(
              {std::to_string(i), embedding.label(i),
               orient::format_double(power.power(i)),
               orient::format_double(power_curve.values[i])});
        }
        orient::write_csv((dir / "power_rank.csv").string(),
                          {"rank", "label", "power", "power_smoothed"},
                          power_rows);
        std::cout << "power_rank_spearman: "
                  << orient::format_double(power_curve.spearman) << "\n";

        if (truth) {
          std::unordered_map<std::string, long long> rank_of;
          if (p_power.rank_file.empty()) {
            for (std::size_t i = 0; i < embedding.size(); ++i) {
              rank_of.emplace(embedding.label(i), static_cast<long long>(i));
            }
          } else {
            rank_of = load_rank_file(p_power.rank_file);
          }
          const auto scatter = orient::hypernym_rank_scatter(*truth, rank_of);
          std::vector<std::vector<std::string>> scatter_rows;
          scatter_rows.reserve(scatter.points.size());
          for (const auto& [hypo, hyper] : scatter.points) {
            scatter_rows.push_back(
                {std::to_string(hypo), std::to_string(hyper)});
          }
          orient::write_csv((dir / "hypernym_rank_scatter.csv").string(),
                            {"hyponym_rank", "hypernym_min_rank"},
                            scatter_rows);
          std::cout << "fraction_below_diagonal: "
                    << orient::format_double(scatter.fraction_below_diagonal)
                    << "\n";
        }
      }
      return 0;
    }

    if (cut_cmd->parsed()) {
      const auto loaded = orient::load_tree_json(c_tree);
      const auto forest = orient::extract_subtrees(loaded.tree, c_percentile);
      nlohmann::ordered_json j;
      if (forest.threshold) {
        j["threshold"] = *forest.threshold;
      } else {
        j["threshold"] = nullptr;
      }
      auto& clusters = j["clusters"] = nlohmann::ordered_json::array();
      for (const auto& cluster : forest.clusters) {
        nlohmann::ordered_json entry;
        entry["root"] = loaded.labels[cluster.local_root];
        auto& members = entry["members"] = nlohmann::ordered_json::array();
        for (int member : cluster.members) {
          members.push_back(loaded.labels[member]);
        }
        clusters.push_back(std::move(entry));
      }
      write_json_file(c_out, j);
      std::cout << "clusters: " << forest.clusters.size() << "\n";
      return 0;
    }
  } catch (const orient::Error& e) {
    std::cerr << "error [" << orient::to_string(e.code()) << "]: " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
