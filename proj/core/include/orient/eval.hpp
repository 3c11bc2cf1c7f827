#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orient/lca.hpp"
#include "orient/types.hpp"

namespace orient {

// Directed / reversed / undirected accuracy over real-node edges; edges that
// attach to the artificial root are never scored. `labels` maps entity index
// to label (the order the tree was built over).
EvalReport edge_accuracy(const Arborescence& tree,
                         const std::vector<std::string>& labels,
                         const RelationSet& truth);

// Undirected edge accuracy against a symmetric synonym pair set.
double synonym_accuracy(const Arborescence& tree,
                        const std::vector<std::string>& labels,
                        const RelationSet& synonyms);

// Equal-count buckets over edges sorted by edge length. smooth_window > 1
// applies a centered moving average to the accuracy fields only; hits and
// counts stay raw so buckets always re-aggregate to the global numbers.
AccuracyCurve accuracy_by_edge_length(const Arborescence& tree,
                                      const std::vector<std::string>& labels,
                                      const RelationSet& truth,
                                      int n_buckets = 100,
                                      int smooth_window = 0);

// Same bucketing keyed by the child node's power.
AccuracyCurve accuracy_by_node_power(const Arborescence& tree,
                                     const std::vector<std::string>& labels,
                                     const RelationSet& truth,
                                     int n_buckets = 100,
                                     int smooth_window = 0);

// One bucket per distinct child depth.
AccuracyCurve accuracy_by_tree_level(const Arborescence& tree,
                                     const std::vector<std::string>& labels,
                                     const RelationSet& truth);

struct SweepLcaInputs {
  const LchMap* lch = nullptr;
  std::size_t n_pairs = 10000;
  int k = 20;
  int closure = 2;
  std::uint64_t seed = 0;
};

struct SweepCell {
  double p = 0.0;
  InsertionOrder order = InsertionOrder::descending;
  EvalReport report;
  std::optional<double> hit_rate;
};

struct SweepResult {
  std::vector<SweepCell> cells;           // grid order: orders outer, p inner
  std::vector<SweepCell> best_per_order;  // best directed accuracy per order
};

// Builds one tree per (order, p) cell and evaluates it. Cells run in
// parallel (bounded by ORIENT_THREADS); every cell derives its randomness
// from cfg_template.seed, so results are independent of scheduling.
SweepResult sweep_p(const EmbeddingSet& embedding, const PowerAssignment& power,
                    const BuildConfig& cfg_template,
                    const std::vector<double>& p_values,
                    const std::vector<InsertionOrder>& orders,
                    const RelationSet& truth,
                    const std::optional<SweepLcaInputs>& lca_inputs = std::nullopt);

}  // namespace orient
