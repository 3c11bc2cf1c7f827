#include "orient/lca.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "orient/error.hpp"
#include "orient/rng.hpp"

namespace orient {

LcaIndex::LcaIndex(const Arborescence& tree) {
  const std::size_t n_nodes = tree.n_nodes();
  std::vector<std::vector<int>> children(n_nodes);
  for (std::size_t node = 1; node < n_nodes; ++node) {
    children[tree.parent[node]].push_back(static_cast<int>(node));
  }

  depth_.assign(n_nodes, 0);
  first_.assign(n_nodes, -1);
  tour_.reserve(2 * n_nodes - 1);

  std::vector<std::pair<int, std::size_t>> stack;
  stack.emplace_back(Arborescence::root_node, 0);
  tour_.push_back(Arborescence::root_node);
  first_[Arborescence::root_node] = 0;
  while (!stack.empty()) {
    const int node = stack.back().first;
    std::size_t& next_child = stack.back().second;
    if (next_child < children[node].size()) {
      const int child = children[node][next_child];
      ++next_child;
      depth_[child] = depth_[node] + 1;
      if (first_[child] < 0) {
        first_[child] = static_cast<int>(tour_.size());
      }
      tour_.push_back(child);
      stack.emplace_back(child, 0);
    } else {
      stack.pop_back();
      if (!stack.empty()) {
        tour_.push_back(stack.back().first);
      }
    }
  }

  const std::size_t len = tour_.size();
  log2_.assign(len + 1, 0);
  for (std::size_t i = 2; i <= len; ++i) {
    log2_[i] = log2_[i / 2] + 1;
  }
  const int levels = log2_[len] + 1;
  table_.resize(levels);
  table_[0].resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    table_[0][i] = static_cast<int>(i);
  }
  for (int j = 1; j < levels; ++j) {
    const std::size_t span = std::size_t{1} << j;
    table_[j].resize(len - span + 1);
    for (std::size_t i = 0; i + span <= len; ++i) {
      const int a = table_[j - 1][i];
      const int b = table_[j - 1][i + span / 2];
      // <= keeps the leftmost minimum, making queries fully deterministic.
      table_[j][i] = depth_[tour_[a]] <= depth_[tour_[b]] ? a : b;
    }
  }
}

int LcaIndex::argmin_position(int lo, int hi) const {
  const int j = log2_[hi - lo + 1];
  const int a = table_[j][lo];
  const int b = table_[j][hi - (1 << j) + 1];
  return depth_[tour_[a]] <= depth_[tour_[b]] ? a : b;
}

int LcaIndex::lca(int u, int v) const {
  const auto n = static_cast<int>(n_nodes());
  if (u < 0 || u >= n || v < 0 || v >= n) {
    raise(ErrorCode::unknown_node, "lca query node out of range");
  }
  int a = first_[u];
  int b = first_[v];
  if (a > b) {
    std::swap(a, b);
  }
  return tour_[argmin_position(a, b)];
}

std::vector<int> lca_closure(const LcaIndex& index, const Arborescence& tree,
                             int u, int v, int radius) {
  if (radius < 0) {
    raise(ErrorCode::bad_argument, "closure radius must be >= 0");
  }
  std::vector<int> out;
  int node = index.lca(u, v);
  for (int step = 0; step <= radius; ++step) {
    if (node == Arborescence::root_node) {
      break;
    }
    out.push_back(node);
    node = tree.parent[node];
  }
  return out;
}

std::vector<std::pair<int, int>> sample_pairs(const EmbeddingSet& embedding,
                                              const BallTree& index,
                                              std::size_t n_pairs, int k,
                                              std::uint64_t seed,
                                              DistanceKind kind) {
  const std::size_t n = embedding.size();
  if (k < 1 || static_cast<std::size_t>(k) + 1 > n) {
    raise(ErrorCode::k_too_large, "need at least k+1 entities to sample pairs");
  }
  Rng rng(seed);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const int w1 = static_cast<int>(rng.bounded(n));
    const auto neighbors = index.knn(embedding.row(w1), k, kind, w1);
    const auto pick = rng.bounded(neighbors.size());
    pairs.emplace_back(w1, neighbors[pick].entity);
  }
  return pairs;
}

void LchMap::insert(const std::string& w1, const std::string& w2,
                    std::vector<std::string> labels) {
  map_[key(w1, w2)] = std::move(labels);
}

const std::vector<std::string>* LchMap::find(const std::string& a,
                                             const std::string& b) const {
  const auto it = map_.find(key(a, b));
  return it == map_.end() ? nullptr : &it->second;
}

std::vector<std::string> lch_closure(const RelationSet& relations,
                                     const std::vector<std::string>& base,
                                     int radius) {
  if (radius < 0) {
    raise(ErrorCode::bad_argument, "closure radius must be >= 0");
  }
  std::unordered_map<std::string, std::vector<const std::string*>> parents;
  parents.reserve(relations.size());
  for (const auto& [child, parent] : relations.pairs()) {
    parents[child].push_back(&parent);
  }

  std::unordered_set<std::string> seen(base.begin(), base.end());
  std::vector<std::string> frontier(seen.begin(), seen.end());
  for (int step = 0; step < radius && !frontier.empty(); ++step) {
    std::vector<std::string> next;
    for (const auto& word : frontier) {
      const auto it = parents.find(word);
      if (it == parents.end()) {
        continue;
      }
      for (const std::string* parent : it->second) {
        if (seen.insert(*parent).second) {
          next.push_back(*parent);
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<std::string> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

double hit_rate(const std::vector<std::vector<std::string>>& lca_sets,
                const std::vector<std::vector<std::string>>& lch_sets) {
  if (lca_sets.size() != lch_sets.size()) {
    raise(ErrorCode::size_mismatch, "lca and lch lists must align");
  }
  std::size_t scorable = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < lca_sets.size(); ++i) {
    if (lch_sets[i].empty()) {
      continue;
    }
    ++scorable;
    const std::unordered_set<std::string> truth(lch_sets[i].begin(),
                                                lch_sets[i].end());
    for (const auto& label : lca_sets[i]) {
      if (truth.count(label)) {
        ++hits;
        break;
      }
    }
  }
  if (scorable == 0) {
    raise(ErrorCode::no_scorable_pairs, "every pair has an empty lch set");
  }
  return static_cast<double>(hits) / static_cast<double>(scorable);
}

}  // namespace orient
