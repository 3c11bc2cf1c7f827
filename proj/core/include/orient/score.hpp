#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "orient/distance.hpp"

namespace orient {

// Parent-selection score of a candidate at a known distance:
//   p * min(dist^-2, eps^-2) / M_d  +  (1-p) * log(power) / M_p
// with the power term defined as 0 when M_p is 0. Every scorer (brute-force
// scan and ball-tree search alike) calls this exact function so candidate
// scores are bit-identical across code paths.
inline double score_from_distance(double dist, double log_power, double p,
                                  double m_d, double m_p, double eps) {
  const double guarded = std::max(dist, eps);
  const double inv_sq = 1.0 / (guarded * guarded);
  const double dist_term = p * (inv_sq / m_d);
  const double power_term = m_p == 0.0 ? 0.0 : (1.0 - p) * (log_power / m_p);
  return dist_term + power_term;
}

inline double score_candidate(std::span<const double> q,
                              std::span<const double> cand_vector,
                              double cand_power, double p, double m_d,
                              double m_p, DistanceKind kind, double eps) {
  return score_from_distance(distance(q, cand_vector, kind),
                             std::log(cand_power), p, m_d, m_p, eps);
}

}  // namespace orient
