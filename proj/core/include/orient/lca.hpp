#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "orient/ball_tree.hpp"
#include "orient/types.hpp"

namespace orient {

// Constant-time LCA queries over an arborescence: Euler tour plus a sparse
// table for range-minimum over tour depths.
class LcaIndex {
public:
  explicit LcaIndex(const Arborescence& tree);

  // u, v are tree node ids (0 = artificial root).
  int lca(int u, int v) const;

  std::size_t n_nodes() const { return first_.size(); }
  const std::vector<int>& tour() const { return tour_; }
  int depth_of(int node) const { return depth_[node]; }
  int first_occurrence(int node) const { return first_[node]; }

private:
  int argmin_position(int lo, int hi) const;  // inclusive range of positions

  std::vector<int> depth_;  // per node
  std::vector<int> tour_;   // node per tour position
  std::vector<int> first_;  // node -> first tour position
  std::vector<int> log2_;
  std::vector<std::vector<int>> table_;  // table_[j][i]: argmin in [i, i+2^j)
};

inline LcaIndex preprocess(const Arborescence& tree) { return LcaIndex(tree); }

// {lca} plus up to `radius` ancestors of it, walking toward the root but
// never including the artificial root itself. May be empty when the lca is
// the artificial root.
std::vector<int> lca_closure(const LcaIndex& index, const Arborescence& tree,
                             int u, int v, int radius);

// Word pairs for the hit-rate evaluation: w1 uniform, w2 uniform over the
// k nearest neighbors of w1 (w1 itself excluded). Sampled with replacement.
std::vector<std::pair<int, int>> sample_pairs(const EmbeddingSet& embedding,
                                              const BallTree& index,
                                              std::size_t n_pairs, int k,
                                              std::uint64_t seed,
                                              DistanceKind kind);

// Ground-truth lowest-common-hypernym sets keyed by unordered word pair.
class LchMap {
public:
  void insert(const std::string& w1, const std::string& w2,
              std::vector<std::string> labels);
  // Null when the pair is absent; an empty vector means "present but empty"
  // (the pair is unscorable either way).
  const std::vector<std::string>* find(const std::string& a,
                                       const std::string& b) const;
  std::size_t size() const { return map_.size(); }

private:
  static std::string key(const std::string& a, const std::string& b) {
    return a <= b ? a + '\t' + b : b + '\t' + a;
  }
  std::unordered_map<std::string, std::vector<std::string>> map_;
};

// base plus everything reachable by following at most `radius` child->parent
// edges of the relation set.
std::vector<std::string> lch_closure(const RelationSet& relations,
                                     const std::vector<std::string>& base,
                                     int radius);

// Share of pairs whose lca set intersects their lch set, among pairs with a
// nonempty lch set.
double hit_rate(const std::vector<std::vector<std::string>>& lca_sets,
                const std::vector<std::vector<std::string>>& lch_sets);

}  // namespace orient
