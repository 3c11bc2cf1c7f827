#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "orient/distance.hpp"
#include "orient/types.hpp"

namespace orient {

// Static ball tree over all embedding points with per-entity activation.
// Structure is fixed at construction; activate() flips one entity at a time
// and maintains subtree active counts and max active log-power, which the
// scored search uses as its pruning bound.
//
// Exactness contract: all three queries return exactly the entity a linear
// scan with the same tie-break would return. Final distances and scores are
// computed by the shared distance/score functions on the raw vectors;
// ball geometry is used only for (slack-inflated) pruning bounds.
//
// Queries memoize point and ball-center distances keyed by the query vector,
// so back-to-back queries with the same q (the insertion pattern: nearest,
// then best-scoring) share their distance work. The memo makes queries
// non-reentrant: concurrent queries on one instance need one tree per thread.
class BallTree {
public:
  BallTree(const EmbeddingSet& embedding, const PowerAssignment& power,
           int leaf_size = 32);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  void activate(int entity);
  bool is_active(int entity) const { return active_[entity] != 0; }
  int active_rank(int entity) const { return active_rank_[entity]; }
  int active_count() const { return nodes_.empty() ? 0 : active_count_[0]; }
  double max_active_log_power() const {
    return nodes_.empty() ? -std::numeric_limits<double>::infinity()
                          : max_active_lp_[0];
  }

  struct Hit {
    int entity = -1;
    double distance = 0.0;
  };

  // Exact nearest active entity; ties go to the lowest entity index.
  // Distances above cutoff need not be resolved: subtrees proven farther than
  // cutoff are skipped, so the returned distance may exceed the true minimum
  // when (and only when) both exceed cutoff. min(result, cutoff) is always
  // exact. The default keeps the search unconditionally exact.
  Hit nearest_active(std::span<const double> q, DistanceKind kind,
                     double cutoff =
                         std::numeric_limits<double>::infinity()) const;

  struct ScoredHit {
    int entity = -1;
    double score = 0.0;
    double distance = 0.0;  // distance to the winning entity
  };

  // Exact argmax of the parent-selection score over active entities; ties go
  // to the lowest activation rank, then the lowest entity index. Candidates
  // scoring at or below prune_below are irrelevant to the caller: subtrees
  // that cannot beat it are skipped. Whenever the true maximum exceeds
  // prune_below the exact argmax and score are returned; otherwise the hit
  // is only guaranteed to score at most prune_below (entity may be -1 when
  // everything was skipped). The default keeps the search unconditionally
  // exact.
  ScoredHit best_scoring_active(std::span<const double> q, double p, double m_d,
                                double m_p, DistanceKind kind, double eps,
                                double prune_below =
                                    -std::numeric_limits<double>::infinity())
      const;

  // Exact k nearest entities over ALL points (activation ignored), sorted by
  // (distance, entity index).
  std::vector<Hit> knn(std::span<const double> q, int k, DistanceKind kind,
                       std::optional<int> exclude = std::nullopt) const;

  // Introspection for invariant checks.
  struct NodeView {
    std::span<const double> center;
    double radius = 0.0;
    int begin = 0;
    int end = 0;
    bool leaf = false;
    int active_count = 0;
    double max_active_log_power = 0.0;
    std::vector<int> entities;  // entity indices in this ball
  };
  std::size_t node_count() const { return nodes_.size(); }
  NodeView node_view(std::size_t node) const;

private:
  struct Node {
    int begin = 0;
    int end = 0;
    int left = -1;   // -1 for leaves
    int right = -1;
    int parent = -1;
  };

  int build_range(int begin, int end, int parent, const EmbeddingSet& embedding);
  void fill_geometry(const EmbeddingSet& embedding);

  std::span<const double> point(int pos) const {
    return {pts_.data() + static_cast<std::size_t>(pos) * d_, d_};
  }
  std::span<const double> unit_point(int pos) const {
    return {unit_.data() + static_cast<std::size_t>(pos) * d_, d_};
  }
  std::span<const double> center(int node) const {
    return {centers_.data() + static_cast<std::size_t>(node) * d_, d_};
  }
  std::span<const double> unit_center(int node) const {
    return {ucenters_.data() + static_cast<std::size_t>(node) * d_, d_};
  }

  // Opens the memo for q: reuses it when q matches the previous query,
  // otherwise invalidates all stamped distances.
  void touch_query(std::span<const double> q, DistanceKind kind) const;
  double point_distance(std::span<const double> q, double norm_q, int pos,
                        DistanceKind kind) const;
  double center_distance(std::span<const double> v, int node, bool unit) const;
  // Lower bound on the distance from q to any point in the node's ball.
  double node_lower_bound(std::span<const double> q,
                          std::span<const double> q_unit, int node,
                          DistanceKind kind) const;
  void require_cosine_ok() const;

  void nearest_rec(int node, std::span<const double> q,
                   std::span<const double> q_unit, double norm_q,
                   DistanceKind kind, double cutoff, Hit& best) const;
  void best_score_rec(int node, std::span<const double> q,
                      std::span<const double> q_unit, double norm_q, double p,
                      double m_d, double m_p, DistanceKind kind, double eps,
                      double prune_below, ScoredHit& best,
                      int& best_rank) const;
  void knn_rec(int node, std::span<const double> q,
               std::span<const double> q_unit, double norm_q, DistanceKind kind,
               std::size_t k, std::optional<int> exclude,
               std::vector<std::pair<double, int>>& heap) const;

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  int leaf_size_ = 32;
  bool cosine_ok_ = false;

  std::vector<Node> nodes_;
  std::vector<int> perm_;         // position -> entity
  std::vector<int> pos_of_;       // entity -> position
  std::vector<int> leaf_of_pos_;  // position -> leaf node id
  std::vector<double> pts_;       // permuted raw points
  std::vector<double> unit_;      // permuted unit points (cosine geometry)
  std::vector<double> norms_;     // per position
  std::vector<double> log_power_; // per position
  std::vector<double> centers_;
  std::vector<double> radii_;
  std::vector<double> ucenters_;
  std::vector<double> uradii_;

  std::vector<char> active_;      // per entity
  std::vector<char> active_pos_;  // per position (leaf-scan order)
  std::vector<int> active_rank_;  // per entity, -1 when inactive
  std::vector<int> active_count_; // per node
  std::vector<double> max_active_lp_;
  int next_rank_ = 0;

  // Per-query distance memo; serial 0 means no query has run yet.
  mutable std::vector<double> last_q_;
  mutable DistanceKind last_kind_ = DistanceKind::euclidean;
  mutable std::uint64_t serial_ = 0;
  mutable std::vector<std::uint64_t> point_stamp_;  // per position
  mutable std::vector<double> point_dist_;
  mutable std::vector<std::uint64_t> node_stamp_;   // per node
  mutable std::vector<double> node_dist_;
};

inline BallTree build_index(const EmbeddingSet& embedding,
                            const PowerAssignment& power, int leaf_size = 32) {
  return BallTree(embedding, power, leaf_size);
}

}  // namespace orient
