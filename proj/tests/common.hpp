#pragma once

// Deterministic builders shared by the test binaries. Everything here is
// seed-driven; two calls with the same arguments produce identical objects.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "graph_matrix.hpp"
#include "instance.hpp"
#include "rng.hpp"

namespace steer::testutil {

// Complete 3-node graph, unit weights; every row normalizes to 0.5 on the
// two off-diagonal entries. With symmetric rows the matrix is also doubly
// stochastic.
inline std::shared_ptr<const InteractionMatrix> triangle_matrix() {
  WeightedEdgeList list;
  list.node_count = 3;
  list.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
  return std::make_shared<InteractionMatrix>(
      InteractionMatrix::from_edge_list(list, true));
}

inline ProblemInstance triangle_instance(
    std::optional<std::vector<double>> alpha0 = std::nullopt,
    double lower = 0.001, double upper = 0.999) {
  return ProblemInstance(triangle_matrix(), {1.0, 0.5, 0.0},
                         {lower, lower, lower}, {upper, upper, upper},
                         std::move(alpha0), 0);
}

// Cycle over n nodes, unit weights: connected, degree 2, and doubly
// stochastic after row normalization (each column also receives 0.5 + 0.5).
inline std::shared_ptr<const InteractionMatrix> ring_matrix(std::uint32_t n) {
  WeightedEdgeList list;
  list.node_count = n;
  list.edges.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    list.edges.push_back({i, (i + 1) % n, 1.0});
  }
  return std::make_shared<InteractionMatrix>(
      InteractionMatrix::from_edge_list(list, true));
}

// Random connected topology: a uniform attachment tree plus `extra` random
// edges (self-loop draws are skipped but still consume randomness, keeping
// the stream aligned). Weights are U(0,1] unless unit_weights.
inline std::shared_ptr<const InteractionMatrix> random_connected_matrix(
    std::uint32_t n, std::uint32_t extra, std::uint64_t seed,
    bool unit_weights = false) {
  Rng rng(splitmix64(seed ^ 0x746f706fULL));
  WeightedEdgeList list;
  list.node_count = n;
  list.edges.reserve(static_cast<std::size_t>(n) + extra);
  for (std::uint32_t i = 1; i < n; ++i) {
    const auto parent = static_cast<std::uint32_t>(rng.below(i));
    const double w = unit_weights ? 1.0 : rng.uniform01_open_low();
    list.edges.push_back({parent, i, w});
  }
  for (std::uint32_t e = 0; e < extra; ++e) {
    const auto u = static_cast<std::uint32_t>(rng.below(n));
    const auto v = static_cast<std::uint32_t>(rng.below(n));
    const double w = unit_weights ? 1.0 : rng.uniform01_open_low();
    if (u == v) continue;
    list.edges.push_back({u, v, w});
  }
  return std::make_shared<InteractionMatrix>(
      InteractionMatrix::from_edge_list(list, true));
}

// Random instance over a random connected topology. The default bound ranges
// keep eps_alpha moderate so certified loops stay short in unit tests;
// acceptance runs that need the harsher published profile generate instances
// through generate_instance instead.
inline ProblemInstance random_instance(std::uint32_t n, std::uint32_t extra,
                                       std::uint64_t seed,
                                       bool with_alpha0 = false,
                                       double l_lo = 0.05, double l_hi = 0.3,
                                       double u_lo = 0.7, double u_hi = 0.95) {
  auto matrix = random_connected_matrix(n, extra, seed);
  Rng rng(splitmix64(seed ^ 0x6669656cULL));
  std::vector<double> s(n), lower(n), upper(n);
  for (std::uint32_t i = 0; i < n; ++i) s[i] = rng.uniform01();
  for (std::uint32_t i = 0; i < n; ++i) lower[i] = rng.uniform(l_lo, l_hi);
  for (std::uint32_t i = 0; i < n; ++i) upper[i] = rng.uniform(u_lo, u_hi);
  std::optional<std::vector<double>> alpha0;
  if (with_alpha0) {
    alpha0.emplace(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      (*alpha0)[i] = rng.uniform(lower[i], upper[i]);
    }
  }
  return ProblemInstance(std::move(matrix), std::move(s), std::move(lower),
                         std::move(upper), std::move(alpha0), seed);
}

}  // namespace steer::testutil
