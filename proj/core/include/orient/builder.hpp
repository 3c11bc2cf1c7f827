#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orient/score.hpp"
#include "orient/types.hpp"

namespace orient {

struct InsertionPlan {
  std::vector<int> sequence;  // permutation of 0..n-1
  InsertionOrder order_kind = InsertionOrder::descending;
  std::uint64_t seed = 0;
};

// descending: by power, ties by entity index ascending; ascending is the
// exact reverse; random is a seeded shuffle.
InsertionPlan make_plan(const PowerAssignment& power, InsertionOrder order,
                        std::uint64_t seed);

// Dynamic root power: mean of the powers inserted so far, or the global
// maximum before the first insertion.
double root_power_at_step(std::span<const double> inserted_powers,
                          double max_power_over_all);
// O(1) form used inside the build loop.
double root_power_running(double inserted_sum, std::size_t inserted_count,
                          double max_power_over_all);

Arborescence build_arborescence(const EmbeddingSet& embedding,
                                const PowerAssignment& power,
                                const BuildConfig& cfg);

struct SubtreeCluster {
  int local_root = -1;       // entity whose parent edge was cut
  std::vector<int> members;  // entity indices, ascending, includes local_root
};

struct Forest {
  // Length threshold actually applied; unset when every edge attaches to
  // the root (no real edge lengths to take a percentile of).
  std::optional<double> threshold;
  std::vector<SubtreeCluster> clusters;  // ordered by local_root
};

// Cuts root edges plus all real edges strictly longer than the given
// percentile (nearest-rank) of real edge lengths, and returns the remaining
// connected components.
Forest extract_subtrees(const Arborescence& tree, double percentile);

}  // namespace orient
