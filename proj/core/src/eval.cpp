#include "orient/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "orient/builder.hpp"
#include "orient/error.hpp"
#include "orient/parallel.hpp"
#include "orient/power.hpp"

namespace orient {

namespace {

// Ground-truth pairs as entity-index keys for O(1) edge lookups.
class TruthIndex {
public:
  TruthIndex(const std::vector<std::string>& labels, const RelationSet& truth) {
    std::unordered_map<std::string, int> index;
    index.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      index.emplace(labels[i], static_cast<int>(i));
    }
    keys_.reserve(truth.size());
    for (const auto& [child, parent] : truth.pairs()) {
      const auto c = index.find(child);
      const auto p = index.find(parent);
      if (c != index.end() && p != index.end()) {
        keys_.insert(key(c->second, p->second));
      }
    }
  }

  bool contains(int child, int parent) const {
    return keys_.count(key(child, parent)) != 0;
  }

private:
  static std::uint64_t key(int child, int parent) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(child)) << 32) |
           static_cast<std::uint32_t>(parent);
  }
  std::unordered_set<std::uint64_t> keys_;
};

struct EdgeRecord {
  double key = 0.0;
  int child_node = 0;
  bool directed = false;
  bool reversed = false;
};

void check_labels(const Arborescence& tree,
                  const std::vector<std::string>& labels) {
  if (labels.size() != tree.n_entities()) {
    raise(ErrorCode::size_mismatch, "label count differs from tree size");
  }
}

template <typename KeyFn>
std::vector<EdgeRecord> scored_edges(const Arborescence& tree,
                                     const TruthIndex& truth, KeyFn&& key_fn) {
  std::vector<EdgeRecord> records;
  records.reserve(tree.n_entities());
  for (std::size_t node = 1; node < tree.n_nodes(); ++node) {
    const int parent_node = tree.parent[node];
    if (parent_node == Arborescence::root_node) {
      continue;
    }
    const int child = Arborescence::entity_of_node(static_cast<int>(node));
    const int parent = Arborescence::entity_of_node(parent_node);
    records.push_back({key_fn(static_cast<int>(node)), static_cast<int>(node),
                       truth.contains(child, parent),
                       truth.contains(parent, child)});
  }
  if (records.empty()) {
    raise(ErrorCode::no_scorable_edges,
          "every edge attaches to the artificial root");
  }
  return records;
}

EvalReport report_from_records(const std::vector<EdgeRecord>& records) {
  EvalReport report;
  report.n_edges_scored = static_cast<long long>(records.size());
  for (const auto& r : records) {
    report.directed_hits += r.directed;
    report.reversed_hits += r.reversed;
    report.undirected_hits += r.directed || r.reversed;
  }
  const auto m = static_cast<double>(records.size());
  report.directed_acc = static_cast<double>(report.directed_hits) / m;
  report.reversed_acc = static_cast<double>(report.reversed_hits) / m;
  report.undirected_acc = static_cast<double>(report.undirected_hits) / m;
  return report;
}

AccuracyCurve bucketize(std::vector<EdgeRecord> records, int n_buckets,
                        int smooth_window) {
  if (n_buckets < 1) {
    raise(ErrorCode::bad_argument, "bucket count must be >= 1");
  }
  std::sort(records.begin(), records.end(),
            [](const EdgeRecord& a, const EdgeRecord& b) {
              return a.key < b.key ||
                     (a.key == b.key && a.child_node < b.child_node);
            });
  const std::size_t m = records.size();
  const std::size_t buckets =
      std::min<std::size_t>(static_cast<std::size_t>(n_buckets), m);

  AccuracyCurve curve;
  curve.buckets.reserve(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t start = b * m / buckets;
    const std::size_t end = (b + 1) * m / buckets;
    AccuracyBucket bucket;
    bucket.center = 100.0 * (static_cast<double>(start) +
                             static_cast<double>(end)) /
                    (2.0 * static_cast<double>(m));
    for (std::size_t i = start; i < end; ++i) {
      bucket.key_mean += records[i].key;
      bucket.directed_hits += records[i].directed;
      bucket.reversed_hits += records[i].reversed;
      bucket.undirected_hits += records[i].directed || records[i].reversed;
    }
    bucket.count = static_cast<long long>(end - start);
    bucket.key_mean /= static_cast<double>(bucket.count);
    bucket.directed_acc =
        static_cast<double>(bucket.directed_hits) / static_cast<double>(bucket.count);
    bucket.reversed_acc =
        static_cast<double>(bucket.reversed_hits) / static_cast<double>(bucket.count);
    bucket.undirected_acc = static_cast<double>(bucket.undirected_hits) /
                            static_cast<double>(bucket.count);
    curve.buckets.push_back(bucket);
  }

  if (smooth_window > 1) {
    std::vector<double> directed, reversed, undirected;
    for (const auto& b : curve.buckets) {
      directed.push_back(b.directed_acc);
      reversed.push_back(b.reversed_acc);
      undirected.push_back(b.undirected_acc);
    }
    directed = moving_average(directed, smooth_window);
    reversed = moving_average(reversed, smooth_window);
    undirected = moving_average(undirected, smooth_window);
    for (std::size_t i = 0; i < curve.buckets.size(); ++i) {
      curve.buckets[i].directed_acc = directed[i];
      curve.buckets[i].reversed_acc = reversed[i];
      curve.buckets[i].undirected_acc = undirected[i];
    }
  }
  return curve;
}

}  // namespace

EvalReport edge_accuracy(const Arborescence& tree,
                         const std::vector<std::string>& labels,
                         const RelationSet& truth) {
  check_labels(tree, labels);
  const TruthIndex index(labels, truth);
  return report_from_records(
      scored_edges(tree, index, [](int) { return 0.0; }));
}

double synonym_accuracy(const Arborescence& tree,
                        const std::vector<std::string>& labels,
                        const RelationSet& synonyms) {
  return edge_accuracy(tree, labels, synonyms).undirected_acc;
}

AccuracyCurve accuracy_by_edge_length(const Arborescence& tree,
                                      const std::vector<std::string>& labels,
                                      const RelationSet& truth, int n_buckets,
                                      int smooth_window) {
  check_labels(tree, labels);
  const TruthIndex index(labels, truth);
  return bucketize(scored_edges(tree, index,
                                [&](int node) { return tree.edge_length[node]; }),
                   n_buckets, smooth_window);
}

AccuracyCurve accuracy_by_node_power(const Arborescence& tree,
                                     const std::vector<std::string>& labels,
                                     const RelationSet& truth, int n_buckets,
                                     int smooth_window) {
  check_labels(tree, labels);
  const TruthIndex index(labels, truth);
  return bucketize(scored_edges(tree, index,
                                [&](int node) { return tree.node_power[node]; }),
                   n_buckets, smooth_window);
}

AccuracyCurve accuracy_by_tree_level(const Arborescence& tree,
                                     const std::vector<std::string>& labels,
                                     const RelationSet& truth) {
  check_labels(tree, labels);
  const TruthIndex index(labels, truth);
  auto records = scored_edges(tree, index, [&](int node) {
    return static_cast<double>(tree.node_level[node]);
  });
  std::sort(records.begin(), records.end(),
            [](const EdgeRecord& a, const EdgeRecord& b) {
              return a.key < b.key ||
                     (a.key == b.key && a.child_node < b.child_node);
            });
  AccuracyCurve curve;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && records[j].key == records[i].key) {
      ++j;
    }
    AccuracyBucket bucket;
    bucket.center = records[i].key;
    bucket.key_mean = records[i].key;
    bucket.count = static_cast<long long>(j - i);
    for (std::size_t t = i; t < j; ++t) {
      bucket.directed_hits += records[t].directed;
      bucket.reversed_hits += records[t].reversed;
      bucket.undirected_hits += records[t].directed || records[t].reversed;
    }
    const auto c = static_cast<double>(bucket.count);
    bucket.directed_acc = static_cast<double>(bucket.directed_hits) / c;
    bucket.reversed_acc = static_cast<double>(bucket.reversed_hits) / c;
    bucket.undirected_acc = static_cast<double>(bucket.undirected_hits) / c;
    curve.buckets.push_back(bucket);
    i = j;
  }
  return curve;
}

SweepResult sweep_p(const EmbeddingSet& embedding, const PowerAssignment& power,
                    const BuildConfig& cfg_template,
                    const std::vector<double>& p_values,
                    const std::vector<InsertionOrder>& orders,
                    const RelationSet& truth,
                    const std::optional<SweepLcaInputs>& lca_inputs) {
  if (p_values.empty() || orders.empty()) {
    raise(ErrorCode::bad_argument, "sweep needs at least one p and one order");
  }

  SweepResult result;
  result.cells.resize(p_values.size() * orders.size());

  // Shared read-only inputs for all cells.
  const TruthIndex truth_index(embedding.labels(), truth);
  std::optional<BallTree> knn_index;
  std::vector<std::pair<int, int>> pairs;
  if (lca_inputs && lca_inputs->lch) {
    knn_index.emplace(embedding, power);
    pairs = sample_pairs(embedding, *knn_index, lca_inputs->n_pairs,
                         lca_inputs->k, lca_inputs->seed, cfg_template.distance);
  }

  parallel_for(result.cells.size(), [&](std::size_t cell_idx) {
    const std::size_t oi = cell_idx / p_values.size();
    const std::size_t pi = cell_idx % p_values.size();
    BuildConfig cfg = cfg_template;
    cfg.order = orders[oi];
    cfg.p = p_values[pi];
    const Arborescence tree = build_arborescence(embedding, power, cfg);

    SweepCell cell;
    cell.p = cfg.p;
    cell.order = cfg.order;
    cell.report = report_from_records(
        scored_edges(tree, truth_index, [](int) { return 0.0; }));

    if (lca_inputs && lca_inputs->lch) {
      const LcaIndex index(tree);
      std::vector<std::vector<std::string>> lca_sets;
      std::vector<std::vector<std::string>> lch_sets;
      lca_sets.reserve(pairs.size());
      lch_sets.reserve(pairs.size());
      for (const auto& [w1, w2] : pairs) {
        std::vector<std::string> lca_labels;
        for (int node :
             lca_closure(index, tree, Arborescence::node_of_entity(w1),
                         Arborescence::node_of_entity(w2), lca_inputs->closure)) {
          lca_labels.push_back(
              embedding.label(Arborescence::entity_of_node(node)));
        }
        lca_sets.push_back(std::move(lca_labels));
        const auto* lch =
            lca_inputs->lch->find(embedding.label(w1), embedding.label(w2));
        lch_sets.push_back(lch ? *lch : std::vector<std::string>{});
      }
      cell.hit_rate = hit_rate(lca_sets, lch_sets);
    }
    result.cells[cell_idx] = std::move(cell);
  });

  for (std::size_t oi = 0; oi < orders.size(); ++oi) {
    std::size_t best = oi * p_values.size();
    for (std::size_t pi = 1; pi < p_values.size(); ++pi) {
      const std::size_t idx = oi * p_values.size() + pi;
      if (result.cells[idx].report.directed_acc >
          result.cells[best].report.directed_acc) {
        best = idx;
      }
    }
    result.best_per_order.push_back(result.cells[best]);
  }
  return result;
}

}  // namespace orient
