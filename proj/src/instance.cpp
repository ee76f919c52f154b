#include "instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "io_util.hpp"
#include "rng.hpp"

namespace steer {

const char* profile_name(Profile p) {
  switch (p) {
    case Profile::None: return "none";
    case Profile::Uniform: return "uniform";
    case Profile::PowerLawLow: return "power_law_low";
    case Profile::PowerLawHigh: return "power_law_high";
  }
  return "unknown";
}

std::optional<Profile> profile_from_name(const std::string& name) {
  if (name == "none") return Profile::None;
  if (name == "uniform") return Profile::Uniform;
  if (name == "power_law_low") return Profile::PowerLawLow;
  if (name == "power_law_high") return Profile::PowerLawHigh;
  return std::nullopt;
}

ProblemInstance::ProblemInstance(std::shared_ptr<const InteractionMatrix> matrix,
                                 std::vector<double> s,
                                 std::vector<double> lower,
                                 std::vector<double> upper,
                                 std::optional<std::vector<double>> alpha0,
                                 std::uint64_t seed)
    : matrix_(std::move(matrix)),
      s_(std::move(s)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      alpha0_(std::move(alpha0)),
      seed_(seed) {
  if (!matrix_) fail(ErrorCode::InvalidArgument, "instance has no matrix");
  const std::size_t n = matrix_->node_count();
  if (s_.size() != n || lower_.size() != n || upper_.size() != n ||
      (alpha0_ && alpha0_->size() != n)) {
    fail(ErrorCode::DimensionMismatch,
         "instance field sizes do not match node count " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s_[i] >= 0.0 && s_[i] <= 1.0)) {
      fail(ErrorCode::InvalidArgument,
           "s[" + std::to_string(i) + "] = " + format_double(s_[i]) +
               " outside [0,1]");
    }
    if (!(lower_[i] > 0.0 && lower_[i] < upper_[i] && upper_[i] < 1.0)) {
      fail(ErrorCode::InvalidArgument,
           "bounds for agent " + std::to_string(i) +
               " must satisfy 0 < l < u < 1, got l=" + format_double(lower_[i]) +
               " u=" + format_double(upper_[i]));
    }
    if (alpha0_) {
      const double a = (*alpha0_)[i];
      if (!(a >= lower_[i] && a <= upper_[i])) {
        fail(ErrorCode::InvalidArgument,
             "alpha0[" + std::to_string(i) + "] = " + format_double(a) +
                 " outside [l,u]");
      }
    }
  }
}

const std::vector<double>& ProblemInstance::alpha0() const {
  if (!alpha0_) {
    fail(ErrorCode::PreconditionUnmet, "instance has no alpha0 column");
  }
  return *alpha0_;
}

ResistanceVector::ResistanceVector(std::vector<double> values)
    : v_(std::move(values)) {
  if (v_.empty()) fail(ErrorCode::InvalidArgument, "empty resistance vector");
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!(v_[i] > 0.0 && v_[i] < 1.0)) {
      fail(ErrorCode::InvalidArgument,
           "alpha[" + std::to_string(i) + "] = " + format_double(v_[i]) +
               " outside (0,1)");
    }
  }
  recompute_min();
}

ResistanceVector ResistanceVector::at_upper(const ProblemInstance& inst) {
  return ResistanceVector(inst.upper());
}

void ResistanceVector::set(std::size_t i, double value) {
  if (!(value > 0.0 && value < 1.0)) {
    fail(ErrorCode::InvalidArgument,
         "alpha[" + std::to_string(i) + "] = " + format_double(value) +
             " outside (0,1)");
  }
  const double old = v_[i];
  v_[i] = value;
  if (value <= min_) {
    min_ = value;
  } else if (old <= min_) {
    // The old value was the (or a) minimum and it moved up.
    recompute_min();
  }
}

void ResistanceVector::recompute_min() {
  min_ = v_[0];
  for (double x : v_) min_ = std::min(min_, x);
}

namespace {

double power_law_low_draw(double t, double l, double u) {
  // Inverse CDF of density A x^-2 on [l, u], A = 1 / (1/l - 1/u):
  // F(x) = A (1/l - 1/x), so x = 1 / (1/l - t/A). t=0 -> l, t=1 -> u.
  const double a = 1.0 / (1.0 / l - 1.0 / u);
  return 1.0 / (1.0 / l - t / a);
}

}  // namespace

ProblemInstance generate_instance(std::shared_ptr<const InteractionMatrix> m,
                                  std::uint64_t seed, Profile profile) {
  if (!m) fail(ErrorCode::InvalidArgument, "generate_instance: null matrix");
  const std::uint32_t n = m->node_count();

  std::vector<double> s(n), lower(n), upper(n);
  {
    Rng rng(seed, Stream::InnateOpinion);
    for (std::uint32_t i = 0; i < n; ++i) s[i] = rng.uniform01();
  }
  {
    Rng rng(seed, Stream::LowerBound);
    for (std::uint32_t i = 0; i < n; ++i) {
      const double coin = rng.uniform01();
      const double value = rng.uniform01();  // always drawn: fixed stream layout
      lower[i] = coin < 0.99 ? 0.001 : 0.001 + value * (0.1 - 0.001);
    }
  }
  {
    Rng rng(seed, Stream::UpperBound);
    for (std::uint32_t i = 0; i < n; ++i) {
      const double coin = rng.uniform01();
      const double value = rng.uniform01();
      upper[i] = coin < 0.99 ? 0.999 : 0.9 + value * (0.999 - 0.9);
    }
  }

  std::optional<std::vector<double>> alpha0;
  if (profile != Profile::None) {
    alpha0.emplace(n);
    Rng rng(seed, Stream::InitialAlpha);
    for (std::uint32_t i = 0; i < n; ++i) {
      const double t = rng.uniform01();
      double a = 0.0;
      switch (profile) {
        case Profile::Uniform:
          a = lower[i] + t * (upper[i] - lower[i]);
          break;
        case Profile::PowerLawLow:
          a = power_law_low_draw(t, lower[i], upper[i]);
          break;
        case Profile::PowerLawHigh:
          a = upper[i] - power_law_low_draw(t, lower[i], upper[i]) + lower[i];
          break;
        case Profile::None:
          break;
      }
      (*alpha0)[i] = std::clamp(a, lower[i], upper[i]);
    }
  }

  return ProblemInstance(std::move(m), std::move(s), std::move(lower),
                         std::move(upper), std::move(alpha0), seed);
}

void randomize_weights(WeightedEdgeList& list, std::uint64_t seed) {
  Rng rng(seed, Stream::EdgeWeights);
  for (WeightedEdge& e : list.edges) e.w = rng.uniform01_open_low();
}

std::vector<double> perturb_innate(const std::vector<double>& s,
                                   double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0) || magnitude >= 1e-6) {
    fail(ErrorCode::InvalidArgument,
         "perturbation magnitude must lie in [0, 1e-6), got " +
             format_double(magnitude));
  }
  std::vector<double> out = s;
  if (magnitude == 0.0) return out;
  Rng rng(seed, Stream::Perturbation);
  for (double& x : out) {
    x += (2.0 * rng.uniform01() - 1.0) * magnitude;
    if (x < 0.0) x = -x;            // reflect at 0
    else if (x > 1.0) x = 2.0 - x;  // reflect at 1
  }
  return out;
}

void write_instance_file(const ProblemInstance& inst, const std::string& path) {
  const InteractionMatrix& m = inst.matrix();
  const std::uint32_t n = m.node_count();
  std::ostringstream out;
  out << n << ' ' << m.entry_count() << ' ' << inst.seed() << '\n';
  for (std::uint32_t i = 0; i < n; ++i) {
    out << format_double(inst.s()[i]) << ' ' << format_double(inst.lower()[i])
        << ' ' << format_double(inst.upper()[i]);
    if (inst.has_alpha0()) out << ' ' << format_double(inst.alpha0()[i]);
    out << '\n';
  }
  const auto& offsets = m.row_offsets();
  const auto& cols = m.cols();
  const auto& raw = m.raw_weights();
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      out << i << ' ' << cols[k] << ' ' << format_double(raw[k]) << '\n';
    }
  }
  write_text_file(path, out.str());
}

ProblemInstance read_instance_file(const std::string& path) {
  const std::string text = read_text_file(path);

  std::uint64_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](bool required) -> std::optional<std::string_view> {
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      std::string_view line =
          strip_cr(std::string_view(text).substr(pos, nl - pos));
      pos = nl + 1;
      ++line_no;
      if (!line.empty()) return line;
    }
    if (required) {
      fail(ErrorCode::Parse, path + ": unexpected end of file");
    }
    return std::nullopt;
  };

  const auto header = next_line(true);
  auto fields = split_fields(*header);
  if (fields.size() != 3) {
    fail(ErrorCode::Parse, path + ": header must be 'n m seed'");
  }
  const std::uint64_t n = parse_u64(fields[0], path, line_no);
  const std::uint64_t m_entries = parse_u64(fields[1], path, line_no);
  const std::uint64_t seed = parse_u64(fields[2], path, line_no);
  if (n == 0 || n > 0xFFFFFFFFull) {
    fail(ErrorCode::Parse, path + ": node count " + std::to_string(n) +
                               " out of range");
  }

  std::vector<double> s(n), lower(n), upper(n);
  std::optional<std::vector<double>> alpha0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto line = next_line(true);
    fields = split_fields(*line);
    if (i == 0 && fields.size() == 4) alpha0.emplace(n);
    const std::size_t expected = alpha0 ? 4 : 3;
    if (fields.size() != expected) {
      fail(ErrorCode::Parse, path + ": agent line " + std::to_string(i) +
                                 " must have " + std::to_string(expected) +
                                 " fields (line " + std::to_string(line_no) +
                                 ")");
    }
    s[i] = parse_double(fields[0], path, line_no);
    lower[i] = parse_double(fields[1], path, line_no);
    upper[i] = parse_double(fields[2], path, line_no);
    if (alpha0) (*alpha0)[i] = parse_double(fields[3], path, line_no);
  }

  WeightedEdgeList list;
  list.node_count = static_cast<std::uint32_t>(n);
  list.edges.reserve(m_entries);
  for (std::uint64_t e = 0; e < m_entries; ++e) {
    const auto line = next_line(true);
    fields = split_fields(*line);
    if (fields.size() != 3) {
      fail(ErrorCode::Parse, path + ": edge line must be 'u v w' (line " +
                                 std::to_string(line_no) + ")");
    }
    const std::uint64_t u = parse_u64(fields[0], path, line_no);
    const std::uint64_t v = parse_u64(fields[1], path, line_no);
    const double w = parse_double(fields[2], path, line_no);
    if (u >= n || v >= n) {
      fail(ErrorCode::Parse, path + ": edge endpoint out of range (line " +
                                 std::to_string(line_no) + ")");
    }
    list.edges.push_back(
        {static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), w});
  }
  if (next_line(false)) {
    fail(ErrorCode::Parse, path + ": trailing content after " +
                               std::to_string(m_entries) + " edges");
  }

  // Entries are stored directed and pre-merged; rebuilding with the same
  // canonical accumulation order reproduces the original matrix bit-exactly.
  auto matrix = std::make_shared<InteractionMatrix>(
      InteractionMatrix::from_edge_list(list, /*symmetrize=*/false));
  return ProblemInstance(std::move(matrix), std::move(s), std::move(lower),
                         std::move(upper), std::move(alpha0), seed);
}

}  // namespace steer
