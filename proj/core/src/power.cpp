#include "orient/power.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "orient/distance.hpp"
#include "orient/error.hpp"

namespace orient {

PowerAssignment zipf_power(std::size_t n, double exponent) {
  if (n == 0) {
    raise(ErrorCode::empty_input, "zipf power needs at least one entity");
  }
  if (!(exponent > 0.0)) {
    raise(ErrorCode::bad_argument, "zipf exponent must be positive");
  }
  std::vector<double> raw(n);
  for (std::size_t r = 0; r < n; ++r) {
    raw[r] = static_cast<double>(n) /
             std::pow(static_cast<double>(r + 1), exponent);
  }
  return PowerAssignment::from_raw(std::move(raw), PowerProvider::zipf);
}

PcaModel fit_pca(const EmbeddingSet& embedding, int k) {
  const auto n = static_cast<Eigen::Index>(embedding.size());
  const auto d = static_cast<Eigen::Index>(embedding.dim());
  if (k < 1 || k > d || static_cast<Eigen::Index>(k) > n) {
    raise(ErrorCode::k_too_large,
          "k must satisfy 1 <= k <= min(n, d); got k=" + std::to_string(k));
  }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      X(embedding.data().data(), n, d);
  Eigen::RowVectorXd mu = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - mu;
  Eigen::MatrixXd cov = centered.transpose() * centered;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::degenerate_spectrum, "eigendecomposition failed");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const double total_var = cov.trace();
  const double floor = total_var * 1e-12;

  PcaModel model;
  model.k = k;
  model.mu.assign(mu.data(), mu.data() + d);
  model.components.reserve(k);
  for (int j = 0; j < k; ++j) {
    const Eigen::Index col = d - 1 - j;
    if (!(evals(col) > floor)) {
      raise(ErrorCode::degenerate_spectrum,
            "component " + std::to_string(j) + " has no variance");
    }
    Eigen::VectorXd u = solver.eigenvectors().col(col);
    // Sign convention: first coordinate of meaningful magnitude is positive,
    // so repeated fits give identical components.
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(u(i)) > 1e-9) {
        if (u(i) < 0.0) {
          u = -u;
        }
        break;
      }
    }
    model.components.emplace_back(u.data(), u.data() + d);
  }
  return model;
}

namespace {

void check_model_dim(const EmbeddingSet& embedding, const PcaModel& model) {
  if (model.mu.size() != embedding.dim() ||
      model.components.empty() ||
      model.components.front().size() != embedding.dim()) {
    raise(ErrorCode::dimension_mismatch,
          "pca model dimension does not match embedding");
  }
}

}  // namespace

PowerAssignment pca_power(const EmbeddingSet& embedding, const PcaModel& model) {
  check_model_dim(embedding, model);
  std::vector<double> raw(embedding.size());
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    const auto row = embedding.row(i);
    double sq = 0.0;
    for (const auto& u : model.components) {
      const double coeff = dot(row, u);
      sq += coeff * coeff;
    }
    raw[i] = std::sqrt(sq);
  }
  return PowerAssignment::from_raw(std::move(raw), PowerProvider::pca);
}

EmbeddingSet debias_embedding(const EmbeddingSet& embedding, const PcaModel& model) {
  check_model_dim(embedding, model);
  const std::size_t d = embedding.dim();
  std::vector<double> out(embedding.size() * d);
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    const auto row = embedding.row(i);
    double* dst = out.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      dst[j] = row[j] - model.mu[j];
    }
    // Project the centered vector; that leaves the output orthogonal to
    // every component regardless of where the mean sits.
    const std::span<const double> centered(dst, d);
    for (const auto& u : model.components) {
      const double coeff = dot(centered, u);
      for (std::size_t j = 0; j < d; ++j) {
        dst[j] -= coeff * u[j];
      }
    }
  }
  return validate_embedding_flat(embedding.labels(), std::move(out), d);
}

namespace {

struct ResolvedGraph {
  std::vector<std::pair<int, int>> edges;  // deduped directed (child, parent)
};

ResolvedGraph resolve_edges(const RelationSet& relations,
                            const EmbeddingSet& embedding) {
  ResolvedRelations resolved(relations, embedding);
  if (resolved.pairs().empty()) {
    raise(ErrorCode::no_resolvable_edges,
          "no relation edge resolves against the embedding");
  }
  return {resolved.pairs()};
}

}  // namespace

PowerAssignment degree_power(const RelationSet& edges,
                             const EmbeddingSet& embedding) {
  const auto graph = resolve_edges(edges, embedding);
  const std::size_t n = embedding.size();
  std::vector<double> deg(n, 0.0);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(graph.edges.size());
  for (const auto& [c, p] : graph.edges) {
    const auto lo = static_cast<std::uint64_t>(std::min(c, p));
    const auto hi = static_cast<std::uint64_t>(std::max(c, p));
    if (seen.insert((lo << 32) | hi).second) {
      deg[c] += 1.0;
      deg[p] += 1.0;
    }
  }
  double min_positive = 0.0;
  for (double x : deg) {
    if (x > 0.0 && (min_positive == 0.0 || x < min_positive)) {
      min_positive = x;
    }
  }
  for (double& x : deg) {
    if (x == 0.0) {
      x = min_positive;
    }
  }
  return PowerAssignment::from_raw(std::move(deg), PowerProvider::degree);
}

std::vector<double> pagerank_scores(const RelationSet& edges,
                                    const EmbeddingSet& embedding,
                                    double damping, int iters, double tol) {
  const auto graph = resolve_edges(edges, embedding);
  const std::size_t n = embedding.size();
  std::vector<int> out_degree(n, 0);
  for (const auto& [src, dst] : graph.edges) {
    (void)dst;
    ++out_degree[src];
  }

  std::vector<double> rank(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  for (int it = 0; it < iters; ++it) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (out_degree[i] == 0) {
        dangling += rank[i];
      }
    }
    const double base =
        (1.0 - damping + damping * dangling) / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (const auto& [src, dst] : graph.edges) {
      next[dst] += damping * rank[src] / out_degree[src];
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta += std::abs(next[i] - rank[i]);
    }
    rank.swap(next);
    if (delta <= tol) {
      break;
    }
  }
  return rank;
}

PowerAssignment pagerank_power(const RelationSet& edges,
                               const EmbeddingSet& embedding, double damping,
                               int iters, double tol) {
  return PowerAssignment::from_raw(
      pagerank_scores(edges, embedding, damping, iters, tol),
      PowerProvider::pagerank);
}

std::vector<double> moving_average(const std::vector<double>& values,
                                   int window) {
  if (window <= 1 || values.empty()) {
    return values;
  }
  const auto n = static_cast<long long>(values.size());
  const long long half = window / 2;
  std::vector<double> prefix(n + 1, 0.0);
  for (long long i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + values[i];
  }
  std::vector<double> out(values.size());
  for (long long i = 0; i < n; ++i) {
    const long long lo = std::max<long long>(0, i - half);
    const long long hi = std::min<long long>(n - 1, i + half);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

namespace {

// Average ranks (1-based, ties share the mean of their positions).
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      ranks[order[t]] = mean_rank;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    raise(ErrorCode::size_mismatch, "spearman needs two equal nonempty vectors");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    return 0.0;
  }
  return cov / std::sqrt(var_a * var_b);
}

RankCurve norm_rank_curve(const EmbeddingSet& embedding, int window) {
  std::vector<double> norms(embedding.size());
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    norms[i] = l2_norm(embedding.row(i));
  }
  return {moving_average(norms, window), window};
}

PowerRankCurve power_rank_curve(const PowerAssignment& power, int window) {
  const auto& values = power.powers();
  std::vector<double> neg_rank(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    neg_rank[i] = -static_cast<double>(i);
  }
  PowerRankCurve curve;
  curve.values = moving_average(values, window);
  curve.window = window;
  curve.spearman = spearman(values, neg_rank);
  return curve;
}

HypernymRankScatter hypernym_rank_scatter(
    const RelationSet& edges,
    const std::unordered_map<std::string, long long>& rank_of) {
  // Ordered by hyponym rank so output is deterministic.
  std::map<long long, long long> min_hypernym_rank;
  for (const auto& [child, parent] : edges.pairs()) {
    const auto c = rank_of.find(child);
    const auto p = rank_of.find(parent);
    if (c == rank_of.end() || p == rank_of.end()) {
      continue;
    }
    auto [it, inserted] = min_hypernym_rank.emplace(c->second, p->second);
    if (!inserted && p->second < it->second) {
      it->second = p->second;
    }
  }
  HypernymRankScatter scatter;
  scatter.points.reserve(min_hypernym_rank.size());
  long long below = 0;
  for (const auto& [child_rank, parent_rank] : min_hypernym_rank) {
    scatter.points.emplace_back(child_rank, parent_rank);
    if (parent_rank < child_rank) {
      ++below;
    }
  }
  if (!scatter.points.empty()) {
    scatter.fraction_below_diagonal =
        static_cast<double>(below) / static_cast<double>(scatter.points.size());
  }
  return scatter;
}

}  // namespace orient
