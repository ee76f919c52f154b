#include "graph_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include "errors.hpp"
#include "io_util.hpp"

namespace steer {

namespace {

struct Triple {
  std::uint32_t row;
  std::uint32_t col;
  double w;
};

}  // namespace

InteractionMatrix InteractionMatrix::from_edge_list(
    const WeightedEdgeList& list, bool symmetrize) {
  const std::uint32_t n = list.node_count;
  if (n == 0) fail(ErrorCode::InvalidArgument, "edge list has no nodes");

  std::vector<Triple> triples;
  triples.reserve(list.edges.size() * (symmetrize ? 2 : 1));
  for (const WeightedEdge& e : list.edges) {
    if (e.u >= n || e.v >= n) {
      fail(ErrorCode::DimensionMismatch,
           "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
               ") references a node outside 0.." + std::to_string(n - 1));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      fail(ErrorCode::NonPositiveWeight,
           "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
               ") has non-positive weight " + format_double(e.w));
    }
    triples.push_back({e.u, e.v, e.w});
    if (symmetrize && e.u != e.v) triples.push_back({e.v, e.u, e.w});
  }

  // Canonical order: duplicates are summed in sorted sequence, so the stored
  // matrix is a pure function of the edge multiset.
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.row, a.col, a.w) < std::tie(b.row, b.col, b.w);
  });

  InteractionMatrix m;
  m.n_ = n;
  m.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  m.cols_.reserve(triples.size());
  m.raw_.reserve(triples.size());
  for (std::size_t i = 0; i < triples.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < triples.size() && triples[j].row == triples[i].row &&
           triples[j].col == triples[i].col) {
      sum += triples[j].w;
      ++j;
    }
    m.cols_.push_back(triples[i].col);
    m.raw_.push_back(sum);
    ++m.offsets_[triples[i].row + 1];
    i = j;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (m.offsets_[i + 1] == 0) {
      fail(ErrorCode::EmptyRow,
           "node " + std::to_string(i) + " has no outgoing edges");
    }
    m.offsets_[i + 1] += m.offsets_[i];
  }

  m.prob_.resize(m.raw_.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::uint64_t k = m.offsets_[i]; k < m.offsets_[i + 1]; ++k) {
      sum += m.raw_[k];
    }
    for (std::uint64_t k = m.offsets_[i]; k < m.offsets_[i + 1]; ++k) {
      m.prob_[k] = m.raw_[k] / sum;
    }
  }

  m.build_transpose();
  m.check_connected();
  return m;
}

double InteractionMatrix::row_sum_raw(std::uint32_t i) const {
  double sum = 0.0;
  for (std::uint64_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sum += raw_[k];
  return sum;
}

void InteractionMatrix::build_transpose() {
  t_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (std::uint32_t c : cols_) ++t_offsets_[c + 1];
  for (std::uint32_t j = 0; j < n_; ++j) t_offsets_[j + 1] += t_offsets_[j];
  t_rows_.resize(cols_.size());
  t_prob_.resize(cols_.size());
  std::vector<std::uint64_t> cursor(t_offsets_.begin(), t_offsets_.end() - 1);
  for (std::uint32_t i = 0; i < n_; ++i) {
    for (std::uint64_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const std::uint64_t slot = cursor[cols_[k]]++;
      t_rows_[slot] = i;
      t_prob_[slot] = prob_[k];
    }
  }
}

void InteractionMatrix::check_connected() const {
  // BFS over the undirected support graph (both CSR layouts give the union of
  // out- and in-neighbors, which covers directed inputs too).
  std::vector<std::uint8_t> seen(n_, 0);
  std::vector<std::uint32_t> queue;
  queue.reserve(n_);
  queue.push_back(0);
  seen[0] = 1;
  std::size_t head = 0;
  std::uint32_t reached = 1;
  while (head < queue.size()) {
    const std::uint32_t i = queue[head++];
    for (std::uint64_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const std::uint32_t j = cols_[k];
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        queue.push_back(j);
      }
    }
    for (std::uint64_t k = t_offsets_[i]; k < t_offsets_[i + 1]; ++k) {
      const std::uint32_t j = t_rows_[k];
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        queue.push_back(j);
      }
    }
  }
  if (reached != n_) {
    fail(ErrorCode::Disconnected,
         "support graph is disconnected: reached " + std::to_string(reached) +
             " of " + std::to_string(n_) + " nodes");
  }
}

void InteractionMatrix::apply_diluted(const std::vector<double>& alpha,
                                      const std::vector<double>& s,
                                      const std::vector<double>& z,
                                      std::vector<double>& out,
                                      ThreadPool& pool) const {
  if (alpha.size() != n_ || s.size() != n_ || z.size() != n_) {
    fail(ErrorCode::DimensionMismatch,
         "apply_diluted: vector sizes do not match node count " +
             std::to_string(n_));
  }
  if (&out == &z) {
    fail(ErrorCode::InvalidArgument, "apply_diluted: out must not alias z");
  }
  out.resize(n_);
  pool.for_range(n_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double acc = 0.0;
      for (std::uint64_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        acc += prob_[k] * z[cols_[k]];
      }
      out[i] = alpha[i] * s[i] + (1.0 - alpha[i]) * acc;
    }
  });
}

void InteractionMatrix::apply_transpose_diluted(const std::vector<double>& alpha,
                                                const std::vector<double>& r,
                                                std::vector<double>& out,
                                                ThreadPool& pool) const {
  if (alpha.size() != n_ || r.size() != n_) {
    fail(ErrorCode::DimensionMismatch,
         "apply_transpose_diluted: vector sizes do not match node count " +
             std::to_string(n_));
  }
  if (&out == &r) {
    fail(ErrorCode::InvalidArgument,
         "apply_transpose_diluted: out must not alias r");
  }
  out.resize(n_);
  pool.for_range(n_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      double acc = 0.0;
      for (std::uint64_t k = t_offsets_[j]; k < t_offsets_[j + 1]; ++k) {
        const std::uint32_t i = t_rows_[k];
        acc += t_prob_[k] * ((1.0 - alpha[i]) * r[i]);
      }
      out[j] = 1.0 + acc;
    }
  });
}

EdgeListFile read_edge_list_file(const std::string& path) {
  const std::string text = read_text_file(path);
  EdgeListFile result;
  std::unordered_map<std::uint64_t, std::uint32_t> remap;

  auto dense_id = [&](std::uint64_t original) {
    auto [it, inserted] =
        remap.try_emplace(original, static_cast<std::uint32_t>(remap.size()));
    if (inserted) result.original_id.push_back(original);
    return it->second;
  };

  std::uint64_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line = strip_cr(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 2 && fields.size() != 3) {
      fail(ErrorCode::Parse, path + ": expected 'u v [w]' on line " +
                                 std::to_string(line_no));
    }
    const std::uint64_t u = parse_u64(fields[0], path, line_no);
    const std::uint64_t v = parse_u64(fields[1], path, line_no);
    double w = 1.0;
    if (fields.size() == 3) {
      w = parse_double(fields[2], path, line_no);
      if (!(w > 0.0)) {
        fail(ErrorCode::NonPositiveWeight,
             path + ": non-positive weight on line " + std::to_string(line_no));
      }
    }
    result.list.edges.push_back({dense_id(u), dense_id(v), w});
  }
  result.list.node_count = static_cast<std::uint32_t>(remap.size());
  if (result.list.node_count == 0) {
    fail(ErrorCode::Parse, path + ": no edges found");
  }
  return result;
}

}  // namespace steer
