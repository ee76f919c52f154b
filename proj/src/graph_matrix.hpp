#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parallel.hpp"

namespace steer {

struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double w = 1.0;
};

struct WeightedEdgeList {
  std::uint32_t node_count = 0;
  std::vector<WeightedEdge> edges;
};

// Row-stochastic sparse interaction matrix in CSR form, together with its
// transpose layout. Row i holds the normalized influence weights of agent i's
// neighbors; the raw (pre-normalization) weights are kept so instances can be
// serialized and rebuilt bit-exactly.
//
// Invariants established by from_edge_list and preserved thereafter:
//   - every row is non-empty and sums to 1 within 1e-12,
//   - all stored weights are positive,
//   - the undirected support graph is connected,
//   - column indices within a row are strictly increasing.
class InteractionMatrix {
 public:
  // Builds from an edge list. With symmetrize=true (the default input mode)
  // each edge {u,v} contributes weight to both row u and row v; self-loops
  // contribute once. Duplicate entries are summed in a canonical order
  // (sorted by row, column, weight), so the result does not depend on the
  // order of the input edges.
  static InteractionMatrix from_edge_list(const WeightedEdgeList& list,
                                          bool symmetrize);

  std::uint32_t node_count() const { return n_; }
  // Number of stored directed entries (after symmetrization and merging).
  std::uint64_t entry_count() const { return cols_.size(); }

  // out := A s + (I - A) P z, evaluated row-parallel. Each row accumulates
  // sequentially in stored column order, so results are independent of the
  // thread count. `out` must not alias `z`.
  void apply_diluted(const std::vector<double>& alpha,
                     const std::vector<double>& s, const std::vector<double>& z,
                     std::vector<double>& out, ThreadPool& pool) const;

  // out := 1 + P^T (I - A) r, evaluated row-parallel over the transpose
  // layout. `out` must not alias `r`.
  void apply_transpose_diluted(const std::vector<double>& alpha,
                               const std::vector<double>& r,
                               std::vector<double>& out,
                               ThreadPool& pool) const;

  // CSR access for dense assembly and serialization.
  const std::vector<std::uint64_t>& row_offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& cols() const { return cols_; }
  const std::vector<double>& probs() const { return prob_; }
  const std::vector<double>& raw_weights() const { return raw_; }

  double row_sum_raw(std::uint32_t i) const;

 private:
  InteractionMatrix() = default;
  void build_transpose();
  void check_connected() const;

  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> offsets_;  // size n+1
  std::vector<std::uint32_t> cols_;
  std::vector<double> prob_;  // normalized, row sums = 1
  std::vector<double> raw_;   // pre-normalization weights

  // Transpose layout: for column j of P, the rows i and values P_ij.
  std::vector<std::uint64_t> t_offsets_;
  std::vector<std::uint32_t> t_rows_;
  std::vector<double> t_prob_;
};

// Text edge list: one `u v [w]` line per edge (w defaults to 1.0), lines
// beginning with '#' are comments. Node ids are arbitrary non-negative
// integers; they are remapped to 0..n-1 in order of first appearance and the
// mapping is returned for the caller to emit.
struct EdgeListFile {
  WeightedEdgeList list;
  std::vector<std::uint64_t> original_id;  // dense id -> original id
};

EdgeListFile read_edge_list_file(const std::string& path);

}  // namespace steer
