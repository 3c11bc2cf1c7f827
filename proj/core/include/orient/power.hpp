#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "orient/types.hpp"

namespace orient {

// Mean vector and top-k orthonormal principal directions of an embedding.
struct PcaModel {
  std::vector<double> mu;
  std::vector<std::vector<double>> components;  // k rows of length d
  int k = 0;
};

// Power from rank order: entity at rank r gets n / (r+1)^exponent, assuming
// rows are already sorted by descending frequency.
PowerAssignment zipf_power(std::size_t n, double exponent = 1.0);

PcaModel fit_pca(const EmbeddingSet& embedding, int k);

// l2 norm of each (uncentered) row's projection onto the model components.
PowerAssignment pca_power(const EmbeddingSet& embedding, const PcaModel& model);

// Rows replaced by v - mu - proj(v); output rows are orthogonal to every
// model component.
EmbeddingSet debias_embedding(const EmbeddingSet& embedding, const PcaModel& model);

// Undirected multiplicity-1 degree over the resolvable relation edges.
// Degree-0 entities get the minimum positive degree so log power stays finite.
PowerAssignment degree_power(const RelationSet& edges, const EmbeddingSet& embedding);

// Raw PageRank scores (sum to 1) over the directed relation graph with
// uniform teleport across all entities and uniform dangling redistribution.
std::vector<double> pagerank_scores(const RelationSet& edges,
                                    const EmbeddingSet& embedding,
                                    double damping = 0.85, int iters = 100,
                                    double tol = 1e-10);

PowerAssignment pagerank_power(const RelationSet& edges,
                               const EmbeddingSet& embedding,
                               double damping = 0.85, int iters = 100,
                               double tol = 1e-10);

// Centered moving average; the symmetric window is clipped at the ends.
// window <= 1 returns the input unchanged.
std::vector<double> moving_average(const std::vector<double>& values, int window);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct RankCurve {
  std::vector<double> values;  // smoothed, index = rank
  int window = 0;
};

RankCurve norm_rank_curve(const EmbeddingSet& embedding, int window = 50);

struct PowerRankCurve {
  std::vector<double> values;
  int window = 0;
  double spearman = 0.0;  // correlation of power with negated rank
};

PowerRankCurve power_rank_curve(const PowerAssignment& power, int window = 50);

struct HypernymRankScatter {
  // One point per hyponym: (hyponym rank, min rank among its hypernyms).
  std::vector<std::pair<long long, long long>> points;
  double fraction_below_diagonal = 0.0;
};

HypernymRankScatter hypernym_rank_scatter(
    const RelationSet& edges,
    const std::unordered_map<std::string, long long>& rank_of);

}  // namespace orient
