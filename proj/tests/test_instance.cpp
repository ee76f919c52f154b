#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "errors.hpp"
#include "instance.hpp"
#include "io_util.hpp"

using namespace steer;

namespace {

std::shared_ptr<const InteractionMatrix> triangle_ptr() {
  return testutil::triangle_matrix();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("profile names round-trip") {
  for (Profile p : {Profile::None, Profile::Uniform, Profile::PowerLawLow, Profile::PowerLawHigh}) {
    const auto back = profile_from_name(profile_name(p));
    REQUIRE(back.has_value());
    CHECK(*back == p);
  }
  CHECK(!profile_from_name("bogus").has_value());
}

TEST_CASE("instance construction validates every field") {
  auto m = triangle_ptr();
  const std::vector<double> s = {1.0, 0.5, 0.0};
  const std::vector<double> l = {0.001, 0.001, 0.001};
  const std::vector<double> u = {0.999, 0.999, 0.999};

  CHECK_NOTHROW(ProblemInstance(m, s, l, u, std::nullopt, 0));

  SUBCASE("innate opinion outside [0,1]") {
    CHECK_THROWS_AS(ProblemInstance(m, {1.2, 0.5, 0.0}, l, u, std::nullopt, 0), Error);
    CHECK_THROWS_AS(ProblemInstance(m, {-0.1, 0.5, 0.0}, l, u, std::nullopt, 0), Error);
  }
  SUBCASE("bounds must satisfy 0 < l < u < 1") {
    CHECK_THROWS_AS(ProblemInstance(m, s, {0.0, 0.001, 0.001}, u, std::nullopt, 0), Error);
    CHECK_THROWS_AS(ProblemInstance(m, s, l, {0.999, 1.0, 0.999}, std::nullopt, 0), Error);
    CHECK_THROWS_AS(ProblemInstance(m, s, {0.5, 0.001, 0.001}, {0.5, 0.999, 0.999}, std::nullopt, 0), Error);
    CHECK_THROWS_AS(ProblemInstance(m, s, {0.6, 0.001, 0.001}, {0.4, 0.999, 0.999}, std::nullopt, 0), Error);
  }
  SUBCASE("length mismatches") {
    try {
      ProblemInstance(m, {1.0, 0.5}, l, u, std::nullopt, 0);
      FAIL("expected dimension_mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    CHECK_THROWS_AS(ProblemInstance(m, s, {0.001, 0.001}, u, std::nullopt, 0), Error);
  }
  SUBCASE("alpha0 must sit inside the bounds") {
    CHECK_NOTHROW(ProblemInstance(m, s, l, u, std::vector<double>{0.5, 0.001, 0.999}, 0));
    CHECK_THROWS_AS(ProblemInstance(m, s, l, u, std::vector<double>{0.5, 0.0005, 0.9}, 0), Error);
    CHECK_THROWS_AS(ProblemInstance(m, s, l, u, std::vector<double>{0.5, 0.5}, 0), Error);
  }
  SUBCASE("null matrix") {
    CHECK_THROWS_AS(ProblemInstance(nullptr, s, l, u, std::nullopt, 0), Error);
  }
}

TEST_CASE("alpha0 accessor refuses when absent") {
  const ProblemInstance inst = testutil::triangle_instance();
  REQUIRE(!inst.has_alpha0());
  CHECK_THROWS_AS(inst.alpha0(), Error);
}

TEST_CASE("resistance vector tracks its minimum through updates") {
  ResistanceVector v({0.5, 0.2, 0.8});
  CHECK(v.eps() == 0.2);
  v.set(1, 0.9);  // old minimum raised: forces a rescan
  CHECK(v.eps() == 0.5);
  v.set(0, 0.1);  // new minimum set directly
  CHECK(v.eps() == 0.1);
  v.set(2, 0.05);
  CHECK(v.eps() == 0.05);
  v.set(2, 0.06);  // raising the unique minimum rescans again
  CHECK(v.eps() == 0.06);
  CHECK(v.values() == std::vector<double>{0.1, 0.9, 0.06});
  CHECK(v[1] == 0.9);
  CHECK(v.size() == 3);
}

TEST_CASE("resistance vector minimum matches a full scan after random updates") {
  Rng rng(31);
  std::vector<double> ref(64);
  for (double& x : ref) x = rng.uniform(0.01, 0.99);
  ResistanceVector v(ref);
  for (int step = 0; step < 2000; ++step) {
    const std::size_t i = static_cast<std::size_t>(rng.below(64));
    const double x = rng.uniform(0.01, 0.99);
    ref[i] = x;
    v.set(i, x);
    CHECK(v.eps() == *std::min_element(ref.begin(), ref.end()));
  }
}

TEST_CASE("resistance vector rejects values outside (0,1)") {
  CHECK_THROWS_AS(ResistanceVector({0.5, 0.0}), Error);
  CHECK_THROWS_AS(ResistanceVector({0.5, 1.0}), Error);
  ResistanceVector v({0.5});
  CHECK_THROWS_AS(v.set(0, 0.0), Error);
  CHECK_THROWS_AS(v.set(0, 1.0), Error);
  CHECK_THROWS_AS(ResistanceVector({}), Error);
}

TEST_CASE("at_upper copies the instance upper bounds") {
  const ProblemInstance inst = testutil::triangle_instance();
  const ResistanceVector v = ResistanceVector::at_upper(inst);
  CHECK(v.values() == inst.upper());
  CHECK(v.eps() == 0.999);
}

TEST_CASE("generated fields respect their documented ranges") {
  auto m = testutil::random_connected_matrix(5000, 5000, 1);
  const ProblemInstance inst = generate_instance(m, 77, Profile::Uniform);
  const std::uint32_t n = inst.n();
  int lower_default = 0, upper_default = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    CHECK(inst.s()[i] >= 0.0);
    CHECK(inst.s()[i] < 1.0);
    CHECK(inst.lower()[i] >= 0.001);
    CHECK(inst.lower()[i] <= 0.1);
    CHECK(inst.upper()[i] >= 0.9);
    CHECK(inst.upper()[i] <= 0.999);
    CHECK(inst.alpha0()[i] >= inst.lower()[i]);
    CHECK(inst.alpha0()[i] <= inst.upper()[i]);
    if (inst.lower()[i] == 0.001) ++lower_default;
    if (inst.upper()[i] == 0.999) ++upper_default;
  }
  // 99% of bounds sit exactly at the defaults (binomial n=5000, p=0.99:
  // anything outside [4900, 5000] is a 10-sigma event).
  CHECK(lower_default >= 4900);
  CHECK(lower_default < 5000);
  CHECK(upper_default >= 4900);
  CHECK(upper_default < 5000);
  CHECK(inst.seed() == 77);
}

TEST_CASE("generation is deterministic and profile-independent for s,l,u") {
  auto m = testutil::random_connected_matrix(200, 200, 2);
  const ProblemInstance a = generate_instance(m, 5, Profile::None);
  const ProblemInstance b = generate_instance(m, 5, Profile::PowerLawLow);
  CHECK(!a.has_alpha0());
  REQUIRE(b.has_alpha0());
  // The alpha0 stream is separate, so adding it must not move s, l, or u.
  CHECK(a.s() == b.s());
  CHECK(a.lower() == b.lower());
  CHECK(a.upper() == b.upper());
  const ProblemInstance c = generate_instance(m, 5, Profile::PowerLawLow);
  CHECK(b.alpha0() == c.alpha0());
  const ProblemInstance d = generate_instance(m, 6, Profile::PowerLawLow);
  CHECK(b.s() != d.s());
}

TEST_CASE("power-law profiles concentrate mass at the matching bound") {
  auto m = testutil::random_connected_matrix(4001, 4001, 3);
  const ProblemInstance low = generate_instance(m, 9, Profile::PowerLawLow);
  const ProblemInstance high = generate_instance(m, 9, Profile::PowerLawHigh);
  const ProblemInstance mid = generate_instance(m, 9, Profile::Uniform);
  const double med_low = median_of(low.alpha0());
  const double med_high = median_of(high.alpha0());
  const double med_mid = median_of(mid.alpha0());
  // Median of the x^-2 law on [0.001, 0.999] is 2*l/(1+l/u) ~ 0.002.
  CHECK(med_low < 0.01);
  CHECK(med_high > 0.99);
  CHECK(med_mid > 0.4);
  CHECK(med_mid < 0.6);
}

TEST_CASE("randomize_weights draws positive weights deterministically") {
  WeightedEdgeList list;
  list.node_count = 4;
  list.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}};
  WeightedEdgeList twin = list;
  randomize_weights(list, 123);
  randomize_weights(twin, 123);
  for (std::size_t i = 0; i < list.edges.size(); ++i) {
    CHECK(list.edges[i].w > 0.0);
    CHECK(list.edges[i].w <= 1.0);
    CHECK(list.edges[i].w == twin.edges[i].w);
  }
  WeightedEdgeList other = list;
  randomize_weights(other, 124);
  CHECK(other.edges[0].w != list.edges[0].w);
}

TEST_CASE("perturb_innate respects magnitude, bounds, and determinism") {
  std::vector<double> s = {0.0, 1.0, 0.5, 0.25};
  SUBCASE("zero magnitude is the identity") {
    CHECK(perturb_innate(s, 0.0, 9) == s);
  }
  SUBCASE("magnitude at or above 1e-6 is rejected") {
    CHECK_THROWS_AS(perturb_innate(s, 1e-6, 9), Error);
    CHECK_THROWS_AS(perturb_innate(s, 0.5, 9), Error);
    CHECK_THROWS_AS(perturb_innate(s, -1e-9, 9), Error);
  }
  SUBCASE("noise is bounded and reflected into [0,1]") {
    const double mag = 1e-7;
    const auto out = perturb_innate(s, mag, 9);
    REQUIRE(out.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(out[i] >= 0.0);
      CHECK(out[i] <= 1.0);
      CHECK(std::abs(out[i] - s[i]) <= mag + 1e-18);
    }
    CHECK(perturb_innate(s, mag, 9) == out);
    CHECK(perturb_innate(s, mag, 10) != out);
  }
}

TEST_CASE("instance file write/read round-trips bit-exactly") {
  auto m = testutil::random_connected_matrix(40, 60, 12);
  const ProblemInstance inst = generate_instance(m, 4242, Profile::PowerLawHigh);
  const std::string path = "instance_roundtrip.tmp";
  write_instance_file(inst, path);
  const ProblemInstance back = read_instance_file(path);
  std::remove(path.c_str());

  CHECK(back.n() == inst.n());
  CHECK(back.seed() == inst.seed());
  CHECK(back.s() == inst.s());
  CHECK(back.lower() == inst.lower());
  CHECK(back.upper() == inst.upper());
  REQUIRE(back.has_alpha0());
  CHECK(back.alpha0() == inst.alpha0());
  CHECK(back.matrix().row_offsets() == inst.matrix().row_offsets());
  CHECK(back.matrix().cols() == inst.matrix().cols());
  CHECK(back.matrix().probs() == inst.matrix().probs());
  CHECK(back.matrix().raw_weights() == inst.matrix().raw_weights());
}

TEST_CASE("instance files without alpha0 round-trip too") {
  const ProblemInstance inst = testutil::triangle_instance();
  const std::string path = "instance_roundtrip2.tmp";
  write_instance_file(inst, path);
  const ProblemInstance back = read_instance_file(path);
  std::remove(path.c_str());
  CHECK(!back.has_alpha0());
  CHECK(back.s() == inst.s());
  CHECK(back.matrix().probs() == inst.matrix().probs());
}

TEST_CASE("reading a truncated instance file reports parse failure") {
  const std::string path = "instance_truncated.tmp";
  write_text_file(path, "3 6 0\n");
  CHECK_THROWS_AS(read_instance_file(path), Error);
  std::remove(path.c_str());
}
