#include "orient/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orient/error.hpp"

namespace orient {

const char* to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::euclidean:
      return "euclidean";
    case DistanceKind::cosine:
      return "cosine";
  }
  return "unknown";
}

DistanceKind distance_kind_from_string(std::string_view name) {
  if (name == "euclidean" || name == "l2") {
    return DistanceKind::euclidean;
  }
  if (name == "cosine") {
    return DistanceKind::cosine;
  }
  raise(ErrorCode::bad_argument,
        "unknown distance kind: " + std::string(name));
}

namespace {

void check_same_dim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    raise(ErrorCode::dimension_mismatch,
          "vector dimensions differ: " + std::to_string(u.size()) + " vs " +
              std::to_string(v.size()));
  }
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) {
  check_same_dim(u, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += u[i] * v[i];
  }
  return acc;
}

double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) {
    acc += x * x;
  }
  return std::sqrt(acc);
}

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  check_same_dim(u, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = u[i] - v[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

double cosine_from_parts(double dot_uv, double norm_u, double norm_v) {
  if (norm_u == 0.0 || norm_v == 0.0) {
    raise(ErrorCode::zero_vector, "cosine distance undefined for zero vector");
  }
  const double d = 1.0 - dot_uv / (norm_u * norm_v);
  return std::clamp(d, 0.0, 2.0);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return cosine_from_parts(dot(u, v), l2_norm(u), l2_norm(v));
}

double distance(std::span<const double> u, std::span<const double> v,
                DistanceKind kind) {
  return kind == DistanceKind::euclidean ? euclidean_distance(u, v)
                                         : cosine_distance(u, v);
}

}  // namespace orient
