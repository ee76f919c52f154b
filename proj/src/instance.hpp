#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graph_matrix.hpp"

namespace steer {

// How alpha0 (the pre-intervention resistance of each agent) is drawn when
// generating an instance. None omits alpha0 entirely; the other three draw it
// from [l_i, u_i] and make the instance usable by the budgeted solvers.
enum class Profile {
  None,
  Uniform,       // alpha0 ~ U[l_i, u_i]
  PowerLawLow,   // density proportional to x^-2 on [l_i, u_i] (mass near l_i)
  PowerLawHigh,  // reflection u_i - x + l_i of PowerLawLow (mass near u_i)
};

const char* profile_name(Profile p);
std::optional<Profile> profile_from_name(const std::string& name);

// A full problem: interaction matrix plus per-agent innate opinion s_i in
// [0,1], resistance bounds 0 < l_i < u_i < 1, and optionally the initial
// resistance alpha0_i in [l_i, u_i].
class ProblemInstance {
 public:
  ProblemInstance(std::shared_ptr<const InteractionMatrix> matrix,
                  std::vector<double> s, std::vector<double> lower,
                  std::vector<double> upper,
                  std::optional<std::vector<double>> alpha0,
                  std::uint64_t seed);

  const InteractionMatrix& matrix() const { return *matrix_; }
  std::shared_ptr<const InteractionMatrix> matrix_ptr() const { return matrix_; }
  std::uint32_t n() const { return matrix_->node_count(); }
  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  bool has_alpha0() const { return alpha0_.has_value(); }
  const std::vector<double>& alpha0() const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::shared_ptr<const InteractionMatrix> matrix_;
  std::vector<double> s_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::optional<std::vector<double>> alpha0_;
  std::uint64_t seed_ = 0;
};

// Resistance vector with a cached minimum. eps() is the contraction parameter
// of the diluted iteration and is consulted every step, so it must stay O(1);
// lowering a coordinate updates it directly, raising one may trigger a rescan.
class ResistanceVector {
 public:
  explicit ResistanceVector(std::vector<double> values);

  static ResistanceVector at_upper(const ProblemInstance& inst);

  const std::vector<double>& values() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::size_t size() const { return v_.size(); }
  double eps() const { return min_; }

  void set(std::size_t i, double value);

 private:
  void recompute_min();

  std::vector<double> v_;
  double min_ = 1.0;
};

// Draws s, l, u (and alpha0 for profiles other than None) from independent,
// documented substreams of `seed`:
//   s_i ~ U[0,1]
//   l_i  = 0.001 with prob. 0.99, else ~ U[0.001, 0.1]
//   u_i  = 0.999 with prob. 0.99, else ~ U[0.9, 0.999]
// Each field consumes a fixed number of draws per agent from its own stream,
// so regenerating one field never disturbs the others.
ProblemInstance generate_instance(std::shared_ptr<const InteractionMatrix> m,
                                  std::uint64_t seed, Profile profile);

// Replaces every edge weight with an independent U(0,1] draw (EdgeWeights
// substream of `seed`), in edge order. Used to synthesize weighted inputs
// from a bare topology.
void randomize_weights(WeightedEdgeList& list, std::uint64_t seed);

// Adds independent U[-magnitude, magnitude] noise to each coordinate,
// reflecting at 0 and 1 so values stay inside [0,1]. magnitude must be below
// 1e-6: large enough to break exact ties, far too small to move the optimum
// of a generic instance. magnitude = 0 returns s unchanged.
std::vector<double> perturb_innate(const std::vector<double>& s,
                                   double magnitude, std::uint64_t seed);

// Instance text format (all doubles with 17 significant digits):
//   line 1:        n m seed
//   lines 2..n+1:  s_i l_i u_i [alpha0_i]
//   lines n+2..:   u v w        (m canonical directed entries, raw weights)
// The stored entries are the matrix's own canonical triples, so a write/read
// cycle rebuilds a bit-identical matrix.
void write_instance_file(const ProblemInstance& inst, const std::string& path);
ProblemInstance read_instance_file(const std::string& path);

}  // namespace steer
