#include "orient/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orient/error.hpp"

namespace orient {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_input: return "Empty";
    case ErrorCode::duplicate_label: return "DuplicateLabel";
    case ErrorCode::ragged_matrix: return "RaggedMatrix";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::zero_vector: return "ZeroVector";
    case ErrorCode::size_mismatch: return "SizeMismatch";
    case ErrorCode::bad_argument: return "BadArgument";
    case ErrorCode::k_too_large: return "KTooLarge";
    case ErrorCode::degenerate_spectrum: return "DegenerateSpectrum";
    case ErrorCode::no_resolvable_edges: return "NoResolvableEdges";
    case ErrorCode::already_active: return "AlreadyActive";
    case ErrorCode::no_active_entities: return "NoActiveEntities";
    case ErrorCode::unknown_node: return "UnknownNode";
    case ErrorCode::no_scorable_pairs: return "NoScorablePairs";
    case ErrorCode::no_scorable_edges: return "NoScorableEdges";
    case ErrorCode::reserved_label: return "ReservedLabel";
    case ErrorCode::malformed_input: return "MalformedInput";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

const char* to_string(InsertionOrder order) {
  switch (order) {
    case InsertionOrder::descending: return "descending";
    case InsertionOrder::random: return "random";
    case InsertionOrder::ascending: return "ascending";
  }
  return "unknown";
}

const char* to_string(ParentRule rule) {
  switch (rule) {
    case ParentRule::score_argmax: return "score_argmax";
    case ParentRule::random_selection: return "random_selection";
  }
  return "unknown";
}

const char* to_string(PowerProvider provider) {
  switch (provider) {
    case PowerProvider::zipf: return "zipf";
    case PowerProvider::pca: return "pca";
    case PowerProvider::degree: return "degree";
    case PowerProvider::pagerank: return "pagerank";
    case PowerProvider::external: return "external";
  }
  return "unknown";
}

InsertionOrder insertion_order_from_string(std::string_view name) {
  if (name == "descending" || name == "desc") return InsertionOrder::descending;
  if (name == "random" || name == "rand") return InsertionOrder::random;
  if (name == "ascending" || name == "asc") return InsertionOrder::ascending;
  raise(ErrorCode::bad_argument, "unknown insertion order: " + std::string(name));
}

ParentRule parent_rule_from_string(std::string_view name) {
  if (name == "score_argmax" || name == "score") return ParentRule::score_argmax;
  if (name == "random_selection" || name == "random") {
    return ParentRule::random_selection;
  }
  raise(ErrorCode::bad_argument, "unknown parent rule: " + std::string(name));
}

PowerProvider power_provider_from_string(std::string_view name) {
  if (name == "zipf") return PowerProvider::zipf;
  if (name == "pca") return PowerProvider::pca;
  if (name == "degree") return PowerProvider::degree;
  if (name == "pagerank") return PowerProvider::pagerank;
  if (name == "external") return PowerProvider::external;
  raise(ErrorCode::bad_argument, "unknown power provider: " + std::string(name));
}

std::optional<std::size_t> EmbeddingSet::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<double> EmbeddingSet::centroid() const {
  std::vector<double> mean(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto r = row(i);
    for (std::size_t j = 0; j < dim_; ++j) {
      mean[j] += r[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(size());
  for (double& m : mean) {
    m *= inv_n;
  }
  return mean;
}

EmbeddingSet validate_embedding(std::vector<std::string> labels,
                                const std::vector<std::vector<double>>& matrix) {
  if (labels.size() != matrix.size()) {
    raise(ErrorCode::size_mismatch, "label count differs from row count");
  }
  if (matrix.empty()) {
    raise(ErrorCode::empty_input, "embedding must have n >= 1 and d >= 1");
  }
  const std::size_t dim = matrix.front().size();
  std::vector<double> data;
  data.reserve(matrix.size() * dim);
  for (const auto& row : matrix) {
    if (row.size() != dim) {
      raise(ErrorCode::ragged_matrix, "rows have differing dimension");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return validate_embedding_flat(std::move(labels), std::move(data), dim);
}

EmbeddingSet validate_embedding_flat(std::vector<std::string> labels,
                                     std::vector<double> data, std::size_t dim) {
  if (labels.empty() || dim == 0) {
    raise(ErrorCode::empty_input, "embedding must have n >= 1 and d >= 1");
  }
  if (data.size() != labels.size() * dim) {
    raise(ErrorCode::size_mismatch, "flat data size does not match n * d");
  }
  for (double x : data) {
    if (!std::isfinite(x)) {
      raise(ErrorCode::non_finite_value, "embedding contains NaN or Inf");
    }
  }
  EmbeddingSet e;
  e.index_.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!e.index_.emplace(labels[i], i).second) {
      raise(ErrorCode::duplicate_label, "duplicate label: " + labels[i]);
    }
  }
  e.labels_ = std::move(labels);
  e.data_ = std::move(data);
  e.dim_ = dim;
  return e;
}

PowerAssignment PowerAssignment::from_raw(std::vector<double> raw,
                                          PowerProvider provider) {
  if (raw.empty()) {
    raise(ErrorCode::empty_input, "power assignment must be nonempty");
  }
  for (double x : raw) {
    if (!std::isfinite(x)) {
      raise(ErrorCode::non_finite_value, "power contains NaN or Inf");
    }
  }
  const double lo = *std::min_element(raw.begin(), raw.end());
  if (lo > 0.0) {
    // Scale so the minimum is exactly 1; monotone, preserves ratios.
    for (double& x : raw) {
      x /= lo;
    }
  } else {
    // Raw powers touching or crossing zero (possible for pca projections or
    // external files); shift instead of scaling to keep the floor at 1.
    for (double& x : raw) {
      x = x - lo + 1.0;
    }
  }
  PowerAssignment p;
  p.powers_ = std::move(raw);
  p.provider_ = provider;
  return p;
}

void validate_arborescence(const Arborescence& tree) {
  const std::size_t n = tree.n_nodes();
  if (n == 0 || tree.edge_length.size() != n || tree.insertion_rank.size() != n ||
      tree.node_level.size() != n || tree.node_power.size() != n) {
    raise(ErrorCode::size_mismatch, "tree arrays have inconsistent sizes");
  }
  if (tree.parent[0] != -1 || tree.insertion_rank[0] != -1 ||
      tree.node_level[0] != 0) {
    raise(ErrorCode::malformed_input, "node 0 is not a valid root");
  }
  for (std::size_t i = 1; i < n; ++i) {
    const int p = tree.parent[i];
    if (p < 0 || static_cast<std::size_t>(p) >= n ||
        static_cast<std::size_t>(p) == i) {
      raise(ErrorCode::malformed_input,
            "node " + std::to_string(i) + " has invalid parent");
    }
    if (tree.insertion_rank[p] >= tree.insertion_rank[i]) {
      raise(ErrorCode::malformed_input,
            "parent rank not below child rank at node " + std::to_string(i));
    }
    if (tree.node_level[i] != tree.node_level[p] + 1) {
      raise(ErrorCode::malformed_input,
            "level mismatch at node " + std::to_string(i));
    }
  }
  // Rank ordering above already rules out cycles, but walk anyway so a
  // corrupted rank array cannot mask one.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t steps = 0;
    for (int v = static_cast<int>(i); v != Arborescence::root_node;
         v = tree.parent[v]) {
      if (++steps > n) {
        raise(ErrorCode::malformed_input, "parent pointers contain a cycle");
      }
    }
  }
}

RelationSet::RelationSet(std::vector<std::pair<std::string, std::string>> pairs,
                         std::string kind)
    : kind_(std::move(kind)) {
  std::unordered_set<std::string> seen;
  seen.reserve(pairs.size());
  pairs_.reserve(pairs.size());
  for (auto& pr : pairs) {
    if (pr.first == pr.second) {
      ++self_dropped_;
      continue;
    }
    std::string key = pr.first + '\t' + pr.second;
    if (seen.insert(std::move(key)).second) {
      pairs_.push_back(std::move(pr));
    }
  }
}

ResolvedRelations::ResolvedRelations(const RelationSet& relations,
                                     const EmbeddingSet& embedding) {
  pairs_.reserve(relations.size());
  for (const auto& [child, parent] : relations.pairs()) {
    const auto c = embedding.index_of(child);
    const auto p = embedding.index_of(parent);
    if (!c || !p) {
      ++dropped_;
      continue;
    }
    pairs_.emplace_back(static_cast<int>(*c), static_cast<int>(*p));
    keys_.insert(key(static_cast<int>(*c), static_cast<int>(*p)));
  }
}

}  // namespace orient
