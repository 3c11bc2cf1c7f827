#pragma once

#include <span>
#include <string_view>

namespace orient {

enum class DistanceKind { euclidean, cosine };

const char* to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(std::string_view name);

double dot(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> v);

double euclidean_distance(std::span<const double> u, std::span<const double> v);

// Cosine distance assembled from a precomputed dot product and norms.
// Every caller (brute force scans, tree queries, evaluation) goes through
// this one function so the result is bit-identical across code paths.
double cosine_from_parts(double dot_uv, double norm_u, double norm_v);

double cosine_distance(std::span<const double> u, std::span<const double> v);

double distance(std::span<const double> u, std::span<const double> v,
                DistanceKind kind);

}  // namespace orient
