#include "orient/ball_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "orient/error.hpp"
#include "orient/score.hpp"

namespace orient {

namespace {

// Relative slack applied to pruning bounds. The geometric bounds are
// admissible in exact arithmetic; the slack absorbs floating-point rounding
// so a subtree holding the true argmax is never pruned. Over-descending only
// costs time, never correctness.
constexpr double kBoundSlack = 1e-11;

}  // namespace

BallTree::BallTree(const EmbeddingSet& embedding, const PowerAssignment& power,
                   int leaf_size) {
  if (power.size() != embedding.size()) {
    raise(ErrorCode::size_mismatch, "power count differs from embedding size");
  }
  if (leaf_size < 1) {
    raise(ErrorCode::bad_argument, "leaf_size must be >= 1");
  }
  n_ = embedding.size();
  d_ = embedding.dim();
  leaf_size_ = leaf_size;
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0);
  nodes_.reserve(2 * (n_ / static_cast<std::size_t>(leaf_size_) + 2));
  build_range(0, static_cast<int>(n_), -1, embedding);

  pos_of_.resize(n_);
  for (std::size_t pos = 0; pos < n_; ++pos) {
    pos_of_[perm_[pos]] = static_cast<int>(pos);
  }
  pts_.resize(n_ * d_);
  norms_.resize(n_);
  log_power_.resize(n_);
  for (std::size_t pos = 0; pos < n_; ++pos) {
    const auto row = embedding.row(perm_[pos]);
    std::copy(row.begin(), row.end(), pts_.begin() + pos * d_);
    norms_[pos] = l2_norm(row);
    log_power_[pos] = std::log(power.power(perm_[pos]));
  }
  cosine_ok_ = std::all_of(norms_.begin(), norms_.end(),
                           [](double x) { return x > 0.0; });
  if (cosine_ok_) {
    unit_.resize(n_ * d_);
    for (std::size_t pos = 0; pos < n_; ++pos) {
      for (std::size_t j = 0; j < d_; ++j) {
        unit_[pos * d_ + j] = pts_[pos * d_ + j] / norms_[pos];
      }
    }
  }
  fill_geometry(embedding);

  leaf_of_pos_.resize(n_);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].left < 0) {
      for (int pos = nodes_[id].begin; pos < nodes_[id].end; ++pos) {
        leaf_of_pos_[pos] = static_cast<int>(id);
      }
    }
  }
  active_.assign(n_, 0);
  active_pos_.assign(n_, 0);
  active_rank_.assign(n_, -1);
  active_count_.assign(nodes_.size(), 0);
  max_active_lp_.assign(nodes_.size(),
                        -std::numeric_limits<double>::infinity());

  point_stamp_.assign(n_, 0);
  point_dist_.resize(n_);
  node_stamp_.assign(nodes_.size(), 0);
  node_dist_.resize(nodes_.size());
}

int BallTree::build_range(int begin, int end, int parent,
                          const EmbeddingSet& embedding) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, parent});
  if (end - begin <= leaf_size_) {
    return id;
  }
  // Split dimension: widest spread over this range, lowest index on ties.
  int split_dim = 0;
  double best_spread = -1.0;
  for (std::size_t j = 0; j < d_; ++j) {
    double lo = embedding.row(perm_[begin])[j];
    double hi = lo;
    for (int t = begin + 1; t < end; ++t) {
      const double x = embedding.row(perm_[t])[j];
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      split_dim = static_cast<int>(j);
    }
  }
  // Total order (coordinate, entity index) keeps the layout deterministic
  // even when many coordinates coincide.
  std::sort(perm_.begin() + begin, perm_.begin() + end, [&](int a, int b) {
    const double xa = embedding.row(a)[split_dim];
    const double xb = embedding.row(b)[split_dim];
    return xa < xb || (xa == xb && a < b);
  });
  const int mid = begin + (end - begin) / 2;
  const int left = build_range(begin, mid, id, embedding);
  const int right = build_range(mid, end, id, embedding);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void BallTree::fill_geometry(const EmbeddingSet&) {
  centers_.assign(nodes_.size() * d_, 0.0);
  radii_.assign(nodes_.size(), 0.0);
  if (cosine_ok_) {
    ucenters_.assign(nodes_.size() * d_, 0.0);
    uradii_.assign(nodes_.size(), 0.0);
  }
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& nd = nodes_[id];
    const double inv = 1.0 / static_cast<double>(nd.end - nd.begin);
    double* c = centers_.data() + id * d_;
    for (int pos = nd.begin; pos < nd.end; ++pos) {
      const double* pt = pts_.data() + static_cast<std::size_t>(pos) * d_;
      for (std::size_t j = 0; j < d_; ++j) {
        c[j] += pt[j];
      }
    }
    for (std::size_t j = 0; j < d_; ++j) {
      c[j] *= inv;
    }
    double r = 0.0;
    for (int pos = nd.begin; pos < nd.end; ++pos) {
      r = std::max(r, euclidean_distance(center(static_cast<int>(id)),
                                         point(pos)));
    }
    radii_[id] = r;

    if (cosine_ok_) {
      double* uc = ucenters_.data() + id * d_;
      for (int pos = nd.begin; pos < nd.end; ++pos) {
        const double* pt = unit_.data() + static_cast<std::size_t>(pos) * d_;
        for (std::size_t j = 0; j < d_; ++j) {
          uc[j] += pt[j];
        }
      }
      for (std::size_t j = 0; j < d_; ++j) {
        uc[j] *= inv;
      }
      double ur = 0.0;
      for (int pos = nd.begin; pos < nd.end; ++pos) {
        ur = std::max(ur, euclidean_distance(unit_center(static_cast<int>(id)),
                                             unit_point(pos)));
      }
      uradii_[id] = ur;
    }
  }
}

void BallTree::require_cosine_ok() const {
  if (!cosine_ok_) {
    raise(ErrorCode::zero_vector,
          "cosine queries require all embedding rows to be nonzero");
  }
}

void BallTree::activate(int entity) {
  if (entity < 0 || static_cast<std::size_t>(entity) >= n_) {
    raise(ErrorCode::bad_argument, "entity out of range: " + std::to_string(entity));
  }
  if (active_[entity]) {
    raise(ErrorCode::already_active,
          "entity already active: " + std::to_string(entity));
  }
  active_[entity] = 1;
  active_rank_[entity] = next_rank_++;
  const int pos = pos_of_[entity];
  active_pos_[pos] = 1;
  const double lp = log_power_[pos];
  for (int v = leaf_of_pos_[pos]; v >= 0; v = nodes_[v].parent) {
    ++active_count_[v];
    if (lp > max_active_lp_[v]) {
      max_active_lp_[v] = lp;
    }
  }
}

void BallTree::touch_query(std::span<const double> q, DistanceKind kind) const {
  if (serial_ != 0 && kind == last_kind_ && last_q_.size() == q.size() &&
      std::equal(last_q_.begin(), last_q_.end(), q.begin())) {
    return;
  }
  last_q_.assign(q.begin(), q.end());
  last_kind_ = kind;
  ++serial_;
}

double BallTree::point_distance(std::span<const double> q, double norm_q,
                                int pos, DistanceKind kind) const {
  if (point_stamp_[pos] == serial_) {
    return point_dist_[pos];
  }
  const double dist =
      kind == DistanceKind::euclidean
          ? euclidean_distance(q, point(pos))
          : cosine_from_parts(dot(q, point(pos)), norm_q, norms_[pos]);
  point_stamp_[pos] = serial_;
  point_dist_[pos] = dist;
  return dist;
}

double BallTree::center_distance(std::span<const double> v, int node,
                                 bool unit) const {
  if (node_stamp_[node] == serial_) {
    return node_dist_[node];
  }
  const double dist =
      euclidean_distance(v, unit ? unit_center(node) : center(node));
  node_stamp_[node] = serial_;
  node_dist_[node] = dist;
  return dist;
}

double BallTree::node_lower_bound(std::span<const double> q,
                                  std::span<const double> q_unit, int node,
                                  DistanceKind kind) const {
  if (kind == DistanceKind::euclidean) {
    return std::max(0.0, center_distance(q, node, false) - radii_[node]);
  }
  // Cosine distance on unit vectors is chord^2 / 2, a monotone function of
  // the chord, so a euclidean bound on the unit sphere transfers over.
  const double chord =
      std::max(0.0, center_distance(q_unit, node, true) - uradii_[node]);
  return chord * chord / 2.0;
}

namespace {

void check_query_dim(std::span<const double> q, std::size_t d) {
  if (q.size() != d) {
    raise(ErrorCode::dimension_mismatch, "query dimension does not match index");
  }
}

std::vector<double> normalize_query(std::span<const double> q, double norm_q) {
  if (norm_q == 0.0) {
    raise(ErrorCode::zero_vector, "cosine query vector is zero");
  }
  std::vector<double> out(q.begin(), q.end());
  for (double& x : out) {
    x /= norm_q;
  }
  return out;
}

}  // namespace

void BallTree::nearest_rec(int node, std::span<const double> q,
                           std::span<const double> q_unit, double norm_q,
                           DistanceKind kind, double cutoff, Hit& best) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (int pos = nd.begin; pos < nd.end; ++pos) {
      if (!active_pos_[pos]) {
        continue;
      }
      const double dist = point_distance(q, norm_q, pos, kind);
      const int entity = perm_[pos];
      if (dist < best.distance ||
          (dist == best.distance && entity < best.entity)) {
        best = {entity, dist};
      }
    }
    return;
  }
  const int kids[2] = {nd.left, nd.right};
  double bounds[2];
  for (int s = 0; s < 2; ++s) {
    bounds[s] = active_count_[kids[s]] > 0
                    ? node_lower_bound(q, q_unit, kids[s], kind)
                    : std::numeric_limits<double>::infinity();
  }
  const int first = bounds[0] <= bounds[1] ? 0 : 1;
  for (int s : {first, 1 - first}) {
    if (active_count_[kids[s]] == 0) {
      continue;
    }
    // Strict inequality: a bound exactly at the incumbent distance may hide
    // an equal-distance entity with a lower index.
    if (bounds[s] * (1.0 - kBoundSlack) > std::min(best.distance, cutoff)) {
      continue;
    }
    nearest_rec(kids[s], q, q_unit, norm_q, kind, cutoff, best);
  }
}

BallTree::Hit BallTree::nearest_active(std::span<const double> q,
                                       DistanceKind kind,
                                       double cutoff) const {
  check_query_dim(q, d_);
  if (active_count() == 0) {
    raise(ErrorCode::no_active_entities, "no active entity to search");
  }
  touch_query(q, kind);
  double norm_q = 0.0;
  std::vector<double> q_unit;
  if (kind == DistanceKind::cosine) {
    require_cosine_ok();
    norm_q = l2_norm(q);
    q_unit = normalize_query(q, norm_q);
  }
  Hit best{-1, std::numeric_limits<double>::infinity()};
  nearest_rec(0, q, q_unit, norm_q, kind, cutoff, best);
  return best;
}

void BallTree::best_score_rec(int node, std::span<const double> q,
                              std::span<const double> q_unit, double norm_q,
                              double p, double m_d, double m_p,
                              DistanceKind kind, double eps, double prune_below,
                              ScoredHit& best, int& best_rank) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (int pos = nd.begin; pos < nd.end; ++pos) {
      if (!active_pos_[pos]) {
        continue;
      }
      const double dist = point_distance(q, norm_q, pos, kind);
      const double score =
          score_from_distance(dist, log_power_[pos], p, m_d, m_p, eps);
      const int entity = perm_[pos];
      const int rank = active_rank_[entity];
      if (score > best.score ||
          (score == best.score &&
           (rank < best_rank || (rank == best_rank && entity < best.entity)))) {
        best = {entity, score, dist};
        best_rank = rank;
      }
    }
    return;
  }
  const int kids[2] = {nd.left, nd.right};
  double upper[2];
  for (int s = 0; s < 2; ++s) {
    if (active_count_[kids[s]] == 0) {
      upper[s] = -std::numeric_limits<double>::infinity();
      continue;
    }
    // Admissible bound: nearest possible distance paired with the largest
    // active log power in the subtree.
    const double lb = node_lower_bound(q, q_unit, kids[s], kind);
    upper[s] = score_from_distance(lb, max_active_lp_[kids[s]], p, m_d, m_p, eps);
  }
  const int first = upper[0] >= upper[1] ? 0 : 1;
  for (int s : {first, 1 - first}) {
    if (active_count_[kids[s]] == 0) {
      continue;
    }
    // Descend on equality: an exact tie at the incumbent score may still
    // improve the (rank, index) tie-break. prune_below needs no such care:
    // a candidate tying it is irrelevant by contract.
    const double bar =
        std::max(prune_below,
                 best.entity >= 0 ? best.score
                                  : -std::numeric_limits<double>::infinity());
    if (upper[s] * (1.0 + kBoundSlack) < bar) {
      continue;
    }
    best_score_rec(kids[s], q, q_unit, norm_q, p, m_d, m_p, kind, eps,
                   prune_below, best, best_rank);
  }
}

BallTree::ScoredHit BallTree::best_scoring_active(std::span<const double> q,
                                                  double p, double m_d,
                                                  double m_p, DistanceKind kind,
                                                  double eps,
                                                  double prune_below) const {
  check_query_dim(q, d_);
  if (active_count() == 0) {
    raise(ErrorCode::no_active_entities, "no active entity to search");
  }
  if (!(m_d > 0.0) || m_p < 0.0) {
    raise(ErrorCode::bad_argument, "need M_d > 0 and M_p >= 0");
  }
  touch_query(q, kind);
  double norm_q = 0.0;
  std::vector<double> q_unit;
  if (kind == DistanceKind::cosine) {
    require_cosine_ok();
    norm_q = l2_norm(q);
    q_unit = normalize_query(q, norm_q);
  }
  ScoredHit best{-1, -std::numeric_limits<double>::infinity(), 0.0};
  int best_rank = std::numeric_limits<int>::max();
  best_score_rec(0, q, q_unit, norm_q, p, m_d, m_p, kind, eps, prune_below,
                 best, best_rank);
  return best;
}

void BallTree::knn_rec(int node, std::span<const double> q,
                       std::span<const double> q_unit, double norm_q,
                       DistanceKind kind, std::size_t k,
                       std::optional<int> exclude,
                       std::vector<std::pair<double, int>>& heap) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (int pos = nd.begin; pos < nd.end; ++pos) {
      const int entity = perm_[pos];
      if (exclude && entity == *exclude) {
        continue;
      }
      const std::pair<double, int> cand{point_distance(q, norm_q, pos, kind),
                                        entity};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const int kids[2] = {nd.left, nd.right};
  double bounds[2];
  for (int s = 0; s < 2; ++s) {
    bounds[s] = node_lower_bound(q, q_unit, kids[s], kind);
  }
  const int first = bounds[0] <= bounds[1] ? 0 : 1;
  for (int s : {first, 1 - first}) {
    if (heap.size() == k &&
        bounds[s] * (1.0 - kBoundSlack) > heap.front().first) {
      continue;
    }
    knn_rec(kids[s], q, q_unit, norm_q, kind, k, exclude, heap);
  }
}

std::vector<BallTree::Hit> BallTree::knn(std::span<const double> q, int k,
                                         DistanceKind kind,
                                         std::optional<int> exclude) const {
  check_query_dim(q, d_);
  std::size_t available = n_;
  if (exclude && *exclude >= 0 && static_cast<std::size_t>(*exclude) < n_) {
    --available;
  }
  if (k < 1 || static_cast<std::size_t>(k) > available) {
    raise(ErrorCode::k_too_large,
          "k=" + std::to_string(k) + " with " + std::to_string(available) +
              " searchable points");
  }
  touch_query(q, kind);
  double norm_q = 0.0;
  std::vector<double> q_unit;
  if (kind == DistanceKind::cosine) {
    require_cosine_ok();
    norm_q = l2_norm(q);
    q_unit = normalize_query(q, norm_q);
  }
  std::vector<std::pair<double, int>> heap;
  heap.reserve(static_cast<std::size_t>(k));
  knn_rec(0, q, q_unit, norm_q, kind, static_cast<std::size_t>(k), exclude,
          heap);
  std::sort(heap.begin(), heap.end());
  std::vector<Hit> out;
  out.reserve(heap.size());
  for (const auto& [dist, entity] : heap) {
    out.push_back({entity, dist});
  }
  return out;
}

BallTree::NodeView BallTree::node_view(std::size_t node) const {
  if (node >= nodes_.size()) {
    raise(ErrorCode::bad_argument, "node id out of range");
  }
  const Node& nd = nodes_[node];
  NodeView view;
  view.center = center(static_cast<int>(node));
  view.radius = radii_[node];
  view.begin = nd.begin;
  view.end = nd.end;
  view.leaf = nd.left < 0;
  view.active_count = active_count_[node];
  view.max_active_log_power = max_active_lp_[node];
  view.entities.assign(perm_.begin() + nd.begin, perm_.begin() + nd.end);
  return view;
}

}  // namespace orient
