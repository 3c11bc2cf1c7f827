#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "orient/distance.hpp"

namespace orient {

enum class InsertionOrder { descending, random, ascending };
enum class ParentRule { score_argmax, random_selection };
enum class PowerProvider { zipf, pca, degree, pagerank, external };

const char* to_string(InsertionOrder order);
const char* to_string(ParentRule rule);
const char* to_string(PowerProvider provider);
InsertionOrder insertion_order_from_string(std::string_view name);
ParentRule parent_rule_from_string(std::string_view name);
PowerProvider power_provider_from_string(std::string_view name);

// Entity labels plus their dense vectors, row i belonging to labels[i].
// Construction goes through validate_embedding, which is the only place
// label uniqueness and finiteness are checked.
class EmbeddingSet {
public:
  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<double>& data() const { return data_; }

  std::optional<std::size_t> index_of(std::string_view label) const;

  // Arithmetic mean of all rows; the artificial root sits here.
  std::vector<double> centroid() const;

private:
  friend EmbeddingSet validate_embedding(std::vector<std::string> labels,
                                         const std::vector<std::vector<double>>& matrix);
  friend EmbeddingSet validate_embedding_flat(std::vector<std::string> labels,
                                              std::vector<double> data,
                                              std::size_t dim);
  EmbeddingSet() = default;

  std::vector<std::string> labels_;
  std::vector<double> data_;  // row-major, size() * dim()
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingSet validate_embedding(std::vector<std::string> labels,
                                const std::vector<std::vector<double>>& matrix);
EmbeddingSet validate_embedding_flat(std::vector<std::string> labels,
                                     std::vector<double> data, std::size_t dim);

// Per-entity positive power, floor-rescaled at construction so the minimum
// is exactly 1 and log(power) is nonnegative.
class PowerAssignment {
public:
  static PowerAssignment from_raw(std::vector<double> raw, PowerProvider provider);

  const std::vector<double>& powers() const { return powers_; }
  double power(std::size_t i) const { return powers_[i]; }
  std::size_t size() const { return powers_.size(); }
  PowerProvider provider() const { return provider_; }

private:
  PowerAssignment() = default;
  std::vector<double> powers_;
  PowerProvider provider_ = PowerProvider::external;
};

struct BuildConfig {
  double p = 0.6;
  DistanceKind distance = DistanceKind::euclidean;
  InsertionOrder order = InsertionOrder::descending;
  ParentRule parent_rule = ParentRule::score_argmax;
  std::uint64_t seed = 0;
  bool accelerated = true;
  double epsilon_dist = 1e-12;
};

// Directed rooted tree over the entities. Node 0 is the artificial root
// (no label, vector = embedding centroid); entity e is node e + 1.
struct Arborescence {
  static constexpr int root_node = 0;
  static int node_of_entity(int entity) { return entity + 1; }
  static int entity_of_node(int node) { return node - 1; }

  std::vector<int> parent;          // parent[0] = -1
  std::vector<double> edge_length;  // edge_length[0] = 0
  std::vector<int> insertion_rank;  // insertion_rank[0] = -1
  std::vector<int> node_level;      // node_level[0] = 0
  std::vector<double> node_power;   // node_power[0] = final dynamic root power
  std::vector<double> root_vector;  // centroid of the embedding
  DistanceKind distance = DistanceKind::euclidean;

  // Build provenance, carried so exported trees can be re-evaluated and
  // rebuilt deterministically.
  BuildConfig config;
  PowerProvider provider = PowerProvider::external;

  std::size_t n_nodes() const { return parent.size(); }
  std::size_t n_entities() const { return parent.size() - 1; }
};

// Checks structural invariants: single root at node 0, acyclic parent
// pointers, parent rank strictly below child rank, consistent levels.
void validate_arborescence(const Arborescence& tree);

// Directed (child_label, parent_label) ground-truth pairs. Duplicates are
// collapsed; self-pairs are dropped and counted.
class RelationSet {
public:
  RelationSet() = default;
  RelationSet(std::vector<std::pair<std::string, std::string>> pairs,
              std::string kind);

  const std::vector<std::pair<std::string, std::string>>& pairs() const {
    return pairs_;
  }
  const std::string& kind() const { return kind_; }
  std::size_t size() const { return pairs_.size(); }
  std::size_t self_pairs_dropped() const { return self_dropped_; }

private:
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::string kind_;
  std::size_t self_dropped_ = 0;
};

// RelationSet resolved against an EmbeddingSet: entity-index pairs with a
// fast membership test. Pairs whose labels are missing are dropped and
// counted.
class ResolvedRelations {
public:
  ResolvedRelations(const RelationSet& relations, const EmbeddingSet& embedding);

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::size_t dropped() const { return dropped_; }
  bool contains(int child, int parent) const {
    return keys_.count(key(child, parent)) != 0;
  }

private:
  static std::uint64_t key(int child, int parent) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(child)) << 32) |
           static_cast<std::uint32_t>(parent);
  }
  std::vector<std::pair<int, int>> pairs_;
  std::unordered_set<std::uint64_t> keys_;
  std::size_t dropped_ = 0;
};

struct AccuracyBucket {
  double center = 0.0;    // percentile midpoint of the bucket (or level value)
  double key_mean = 0.0;  // mean bucketing key (edge length / power / level)
  long long count = 0;
  long long directed_hits = 0;
  long long reversed_hits = 0;
  long long undirected_hits = 0;
  double directed_acc = 0.0;
  double reversed_acc = 0.0;
  double undirected_acc = 0.0;
};

struct AccuracyCurve {
  std::vector<AccuracyBucket> buckets;
};

struct EvalReport {
  double undirected_acc = 0.0;
  double directed_acc = 0.0;
  double reversed_acc = 0.0;
  std::optional<double> synonym_acc;
  long long n_edges_scored = 0;
  long long directed_hits = 0;
  long long reversed_hits = 0;
  long long undirected_hits = 0;
  std::optional<AccuracyCurve> by_edge_length;
  std::optional<AccuracyCurve> by_node_power;
  std::optional<AccuracyCurve> by_tree_level;
};

}  // namespace orient
