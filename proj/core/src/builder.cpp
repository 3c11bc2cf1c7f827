#include "orient/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "orient/ball_tree.hpp"
#include "orient/error.hpp"
#include "orient/rng.hpp"

namespace orient {

InsertionPlan make_plan(const PowerAssignment& power, InsertionOrder order,
                        std::uint64_t seed) {
  const std::size_t n = power.size();
  InsertionPlan plan;
  plan.order_kind = order;
  plan.seed = seed;
  plan.sequence.resize(n);
  std::iota(plan.sequence.begin(), plan.sequence.end(), 0);
  switch (order) {
    case InsertionOrder::descending:
    case InsertionOrder::ascending:
      std::sort(plan.sequence.begin(), plan.sequence.end(), [&](int a, int b) {
        const double pa = power.power(a);
        const double pb = power.power(b);
        return pa > pb || (pa == pb && a < b);
      });
      if (order == InsertionOrder::ascending) {
        std::reverse(plan.sequence.begin(), plan.sequence.end());
      }
      break;
    case InsertionOrder::random: {
      Rng rng(derive_stream(seed, 0));
      rng.shuffle(plan.sequence);
      break;
    }
  }
  return plan;
}

double root_power_at_step(std::span<const double> inserted_powers,
                          double max_power_over_all) {
  double sum = 0.0;
  for (double x : inserted_powers) {
    sum += x;
  }
  return root_power_running(sum, inserted_powers.size(), max_power_over_all);
}

double root_power_running(double inserted_sum, std::size_t inserted_count,
                          double max_power_over_all) {
  if (inserted_count == 0) {
    return max_power_over_all;
  }
  return inserted_sum / static_cast<double>(inserted_count);
}

namespace {

struct CandidateChoice {
  int entity = -1;  // -1 means the artificial root
  double distance = 0.0;
};

// Brute-force parent pick: scan every inserted entity, root included as the
// rank -1 candidate. Distances and scores go through the same shared
// functions the ball tree uses, so both paths agree bit for bit.
class BruteSearcher {
public:
  BruteSearcher(const EmbeddingSet& embedding, const PowerAssignment& power,
                DistanceKind kind)
      : embedding_(embedding), power_(power), kind_(kind) {
    if (kind_ == DistanceKind::cosine) {
      norms_.resize(embedding.size());
      for (std::size_t i = 0; i < embedding.size(); ++i) {
        norms_[i] = l2_norm(embedding.row(i));
      }
    }
  }

  void insert(int entity) { inserted_.push_back(entity); }

  double entity_distance(std::span<const double> q, double norm_q,
                         int entity) const {
    if (kind_ == DistanceKind::euclidean) {
      return euclidean_distance(q, embedding_.row(entity));
    }
    return cosine_from_parts(dot(q, embedding_.row(entity)), norm_q,
                             norms_[entity]);
  }

  // Minimum distance over inserted entities.
  double min_distance(std::span<const double> q, double norm_q) const {
    double best = std::numeric_limits<double>::infinity();
    for (int entity : inserted_) {
      best = std::min(best, entity_distance(q, norm_q, entity));
    }
    return best;
  }

  // Argmax score over inserted entities; ties by insertion rank (= scan
  // order here), which subsumes the entity-index tie-break.
  CandidateChoice best_scoring(std::span<const double> q, double norm_q,
                               double p, double m_d, double m_p,
                               double eps) const {
    CandidateChoice best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int entity : inserted_) {
      const double dist = entity_distance(q, norm_q, entity);
      const double score = score_from_distance(
          dist, std::log(power_.power(entity)), p, m_d, m_p, eps);
      if (score > best_score) {
        best_score = score;
        best = {entity, dist};
      }
    }
    return best;
  }

private:
  const EmbeddingSet& embedding_;
  const PowerAssignment& power_;
  DistanceKind kind_;
  std::vector<double> norms_;
  std::vector<int> inserted_;
};

}  // namespace

Arborescence build_arborescence(const EmbeddingSet& embedding,
                                const PowerAssignment& power,
                                const BuildConfig& cfg) {
  const std::size_t n = embedding.size();
  if (power.size() != n) {
    raise(ErrorCode::size_mismatch, "power count differs from embedding size");
  }
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) {
    raise(ErrorCode::bad_argument, "p must lie in [0, 1]");
  }
  if (!(cfg.epsilon_dist > 0.0)) {
    raise(ErrorCode::bad_argument, "epsilon_dist must be positive");
  }

  Arborescence tree;
  tree.parent.assign(n + 1, -1);
  tree.edge_length.assign(n + 1, 0.0);
  tree.insertion_rank.assign(n + 1, -1);
  tree.node_level.assign(n + 1, 0);
  tree.node_power.assign(n + 1, 0.0);
  tree.root_vector = embedding.centroid();
  tree.distance = cfg.distance;
  tree.config = cfg;
  tree.provider = power.provider();

  const InsertionPlan plan = make_plan(power, cfg.order, cfg.seed);
  Rng selection(derive_stream(cfg.seed, 1));

  const double max_power =
      *std::max_element(power.powers().begin(), power.powers().end());
  const double root_norm = l2_norm(tree.root_vector);

  const bool scored = cfg.parent_rule == ParentRule::score_argmax;
  std::optional<BallTree> index;
  std::optional<BruteSearcher> brute;
  if (scored) {
    if (cfg.accelerated) {
      // Leaf size tuned for the insertion workload (two pruned queries per
      // step); exactness does not depend on it.
      index.emplace(embedding, power, 24);
    } else {
      brute.emplace(embedding, power, cfg.distance);
    }
  }

  double inserted_sum = 0.0;
  double max_inserted_lp = -std::numeric_limits<double>::infinity();
  const double eps = cfg.epsilon_dist;

  for (std::size_t step = 0; step < n; ++step) {
    const int entity = plan.sequence[step];
    const auto q = embedding.row(entity);
    const double norm_q =
        cfg.distance == DistanceKind::cosine ? l2_norm(q) : 0.0;
    const double root_power =
        root_power_running(inserted_sum, step, max_power);

    auto root_distance = [&] {
      if (cfg.distance == DistanceKind::euclidean) {
        return euclidean_distance(q, tree.root_vector);
      }
      return cosine_from_parts(dot(q, tree.root_vector), norm_q, root_norm);
    };

    int parent_entity = -1;  // -1 = artificial root
    double parent_distance = 0.0;

    if (step == 0) {
      parent_distance = root_distance();
    } else if (!scored) {
      const std::uint64_t pick = selection.bounded(step + 1);
      if (pick == 0) {
        parent_distance = root_distance();
      } else {
        parent_entity = plan.sequence[pick - 1];
        parent_distance = cfg.distance == DistanceKind::euclidean
                              ? euclidean_distance(q, embedding.row(parent_entity))
                              : cosine_from_parts(dot(q, embedding.row(parent_entity)),
                                                  norm_q,
                                                  l2_norm(embedding.row(parent_entity)));
      }
    } else {
      const double d_root = root_distance();
      // Normalizers over the full candidate set (root included): M_d from the
      // smallest guarded distance, M_p from the largest log power. Distances
      // beyond d_root cannot shrink the min, so the index may stop resolving
      // there.
      double d_min_entities;
      if (index) {
        d_min_entities =
            index->nearest_active(q, cfg.distance, d_root).distance;
      } else {
        d_min_entities = brute->min_distance(q, norm_q);
      }
      const double d_min = std::min(d_min_entities, d_root);
      const double guarded = std::max(d_min, eps);
      const double m_d = 1.0 / (guarded * guarded);
      const double root_lp = std::log(root_power);
      const double m_p = std::max(max_inserted_lp, root_lp);

      const double root_score =
          score_from_distance(d_root, root_lp, cfg.p, m_d, m_p, eps);
      // Root wins exact ties: its insertion rank (-1) precedes every entity,
      // so only a strictly higher score elects an entity parent. The index
      // exploits that: subtrees that cannot beat root_score are skipped.
      CandidateChoice best;
      double best_score;
      if (index) {
        const auto hit = index->best_scoring_active(q, cfg.p, m_d, m_p,
                                                    cfg.distance, eps,
                                                    root_score);
        best.entity = hit.entity;
        best_score = hit.score;
        best.distance = hit.distance;
      } else {
        best = brute->best_scoring(q, norm_q, cfg.p, m_d, m_p, eps);
        best_score = score_from_distance(
            best.distance, std::log(power.power(best.entity)), cfg.p, m_d, m_p,
            eps);
      }
      if (best.entity >= 0 && best_score > root_score) {
        parent_entity = best.entity;
        parent_distance = best.distance;
      } else {
        parent_entity = -1;
        parent_distance = d_root;
      }
    }

    const int node = Arborescence::node_of_entity(entity);
    const int parent_node = parent_entity < 0
                                ? Arborescence::root_node
                                : Arborescence::node_of_entity(parent_entity);
    tree.parent[node] = parent_node;
    tree.edge_length[node] = parent_distance;
    tree.insertion_rank[node] = static_cast<int>(step);
    tree.node_level[node] = tree.node_level[parent_node] + 1;
    tree.node_power[node] = power.power(entity);

    inserted_sum += power.power(entity);
    max_inserted_lp = std::max(max_inserted_lp, std::log(power.power(entity)));
    if (scored) {
      if (index) {
        index->activate(entity);
      } else {
        brute->insert(entity);
      }
    }
  }
  // Record the root's final dynamic power (mean over all entities).
  tree.node_power[Arborescence::root_node] =
      root_power_running(inserted_sum, n, max_power);
  return tree;
}

Forest extract_subtrees(const Arborescence& tree, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    raise(ErrorCode::bad_argument, "percentile must lie in (0, 100]");
  }
  const std::size_t n = tree.n_entities();

  std::vector<double> real_lengths;
  real_lengths.reserve(n);
  for (std::size_t node = 1; node <= n; ++node) {
    if (tree.parent[node] != Arborescence::root_node) {
      real_lengths.push_back(tree.edge_length[node]);
    }
  }

  Forest forest;
  if (!real_lengths.empty()) {
    std::sort(real_lengths.begin(), real_lengths.end());
    const auto m = static_cast<double>(real_lengths.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile * m / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, real_lengths.size());
    forest.threshold = real_lengths[rank - 1];
  }

  // cut[node]: the edge from node to its parent is removed.
  std::vector<char> cut(n + 1, 0);
  for (std::size_t node = 1; node <= n; ++node) {
    if (tree.parent[node] == Arborescence::root_node) {
      cut[node] = 1;
    } else if (forest.threshold && tree.edge_length[node] > *forest.threshold) {
      cut[node] = 1;
    }
  }

  // Local root of each entity: walk up until a cut edge, memoized.
  std::vector<int> local_root(n + 1, -1);
  for (std::size_t start = 1; start <= n; ++start) {
    if (local_root[start] >= 0) {
      continue;
    }
    std::vector<int> path;
    int v = static_cast<int>(start);
    while (local_root[v] < 0 && !cut[v]) {
      path.push_back(v);
      v = tree.parent[v];
    }
    const int root = cut[v] ? v : local_root[v];
    local_root[v] = root;
    for (int u : path) {
      local_root[u] = root;
    }
  }

  std::vector<std::vector<int>> members(n + 1);
  for (std::size_t node = 1; node <= n; ++node) {
    members[local_root[node]].push_back(
        Arborescence::entity_of_node(static_cast<int>(node)));
  }
  for (std::size_t node = 1; node <= n; ++node) {
    if (!members[node].empty()) {
      SubtreeCluster cluster;
      cluster.local_root = Arborescence::entity_of_node(static_cast<int>(node));
      cluster.members = std::move(members[node]);
      forest.clusters.push_back(std::move(cluster));
    }
  }
  return forest;
}

}  // namespace orient
