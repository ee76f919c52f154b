#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"
#include "dynamics.hpp"
#include "errors.hpp"

using namespace steer;

namespace {

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double one_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace

TEST_CASE("dense equilibrium matches the hand-solved triangle") {
  const InteractionMatrix m = *testutil::triangle_matrix();
  const std::vector<double> s = {1.0, 0.5, 0.0};
  const std::vector<double> alpha = {0.9, 0.1, 0.1};
  const std::vector<double> z = equilibrium_exact(m, s, alpha);
  // Solved independently: z = [I - (I-A)P]^{-1} A s on the 3-clique.
  CHECK(z[0] == doctest::Approx(0.98514851485148514).epsilon(1e-14));
  CHECK(z[1] == doctest::Approx(0.86872652782519644).epsilon(1e-14));
  CHECK(z[2] == doctest::Approx(0.83424376920450682).epsilon(1e-14));
  CHECK(objective_exact(m, s, alpha) == doctest::Approx(2.6881188118811883).epsilon(1e-14));
}

TEST_CASE("dense derivative vector matches the hand-solved triangle") {
  const InteractionMatrix m = *testutil::triangle_matrix();
  const std::vector<double> alpha = {0.9, 0.1, 0.1};
  const std::vector<double> r = derivative_vector_exact(m, alpha);
  // r* = [I - P^T(I-A)]^{-1} 1.
  CHECK(r[0] == doctest::Approx(2.8712871287128716).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(2.0792079207920793).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(2.0792079207920793).epsilon(1e-14));
}

TEST_CASE("partial derivatives match independently computed values") {
  const InteractionMatrix m = *testutil::triangle_matrix();
  const std::vector<double> s = {1.0, 0.5, 0.0};
  const std::vector<double> alpha = {0.9, 0.1, 0.1};
  CHECK(partial_derivative_exact(m, s, alpha, 0) ==
        doctest::Approx(0.42642878149201108).epsilon(1e-12));
  CHECK(partial_derivative_exact(m, s, alpha, 1) ==
        doctest::Approx(-0.85184346362256602).epsilon(1e-12));
  CHECK(partial_derivative_exact(m, s, alpha, 2) ==
        doctest::Approx(-1.9272958364460553).epsilon(1e-12));
}

TEST_CASE("equilibrium iteration certificate holds on random instances") {
  ThreadPool pool(2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::uint32_t n = 4 + static_cast<std::uint32_t>(seed) * 3;
    const ProblemInstance inst = testutil::random_instance(n, n, seed);
    std::vector<double> alpha(n);
    for (std::uint32_t i = 0; i < n; ++i)
      alpha[i] = (i % 2 == 0) ? inst.lower()[i] : inst.upper()[i];
    const std::vector<double> z_star = equilibrium_exact(inst.matrix(), inst.s(), alpha);

    ResistanceVector rv(alpha);
    EquilibriumEstimate est;
    // Certificate covers any start in [0,1]^n; exercise both ends.
    for (const double fill : {1.0, 0.0}) {
      est.start(n, fill, rv.eps());
      CHECK(est.err == 1.0 / rv.eps());
      for (int t = 1; t <= 120; ++t) {
        est.step(inst.matrix(), alpha, inst.s(), pool);
        CHECK(est.t == static_cast<std::uint64_t>(t));
        CHECK(inf_dist(est.z, z_star) <= est.err);
      }
    }
  }
}

TEST_CASE("derivative iteration certificate holds on random instances") {
  ThreadPool pool(2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::uint32_t n = 4 + static_cast<std::uint32_t>(seed) * 3;
    const ProblemInstance inst = testutil::random_instance(n, n, seed + 100);
    std::vector<double> alpha = inst.lower();
    alpha[0] = inst.upper()[0];  // mixed corner
    const std::vector<double> r_star = derivative_vector_exact(inst.matrix(), alpha);

    ResistanceVector rv(alpha);
    DerivativeEstimate dest;
    dest.start(n, rv.eps());
    for (int t = 1; t <= 120; ++t) {
      dest.step(inst.matrix(), alpha, pool);
      CHECK(dest.t == static_cast<std::uint64_t>(t));
      CHECK(one_dist(dest.r, r_star) <= dest.err_r);
    }
  }
}

TEST_CASE("certificates contract geometrically and reset re-arms them") {
  const ProblemInstance inst = testutil::random_instance(12, 10, 5);
  ThreadPool pool(1);
  ResistanceVector rv(inst.upper());
  const double eps = rv.eps();

  EquilibriumEstimate est;
  est.start(inst.n(), 1.0, eps);
  const double err0 = est.err;
  est.step(inst.matrix(), inst.upper(), inst.s(), pool);
  CHECK(est.err == doctest::Approx(err0 * (1.0 - eps)).epsilon(1e-15));
  est.step(inst.matrix(), inst.upper(), inst.s(), pool);
  CHECK(est.err == doctest::Approx(err0 * (1.0 - eps) * (1.0 - eps)).epsilon(1e-15));

  const std::vector<double> kept = est.z;
  est.reset_phase(eps);
  CHECK(est.t == 0);
  CHECK(est.err == err0);
  CHECK(est.z == kept);  // the iterate itself is preserved across phases

  DerivativeEstimate dest;
  dest.start(inst.n(), eps);
  const double derr0 = dest.err_r;
  CHECK(derr0 == doctest::Approx(inst.n() * (1.0 - eps) / eps).epsilon(1e-15));
  dest.step(inst.matrix(), inst.upper(), pool);
  CHECK(dest.err_r == doctest::Approx(derr0 * (1.0 - eps)).epsilon(1e-15));
}

TEST_CASE("iterative objective honors its reported error bound") {
  ThreadPool pool(2);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::uint32_t n = 5 + static_cast<std::uint32_t>(seed) * 4;
    const ProblemInstance inst = testutil::random_instance(n, 2 * n, seed + 50);
    std::vector<double> alpha(n);
    for (std::uint32_t i = 0; i < n; ++i)
      alpha[i] = (i % 2 == 0) ? inst.lower()[i] : inst.upper()[i];
    const IterativeObjective it = objective_iterative(inst.matrix(), inst.s(), alpha, 1e-10, pool);
    const double exact = objective_exact(inst.matrix(), inst.s(), alpha);
    CHECK(std::abs(it.value - exact) <= it.err);
    CHECK(it.err <= n * 1e-10 * (1 + 1e-12));
    CHECK(it.iterations > 0);
  }
}

TEST_CASE("dense paths refuse oversized systems") {
  const InteractionMatrix m = *testutil::triangle_matrix();
  const std::vector<double> s = {1.0, 0.5, 0.0};
  const std::vector<double> alpha = {0.5, 0.5, 0.5};
  try {
    equilibrium_exact(m, s, alpha, 2);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
  CHECK_THROWS_AS(derivative_vector_exact(m, alpha, 2), Error);
  CHECK_THROWS_AS(objective_exact(m, s, alpha, 2), Error);
  CHECK_NOTHROW(objective_exact(m, s, alpha, 3));
}

TEST_CASE("derivative sign helpers agree with the gap") {
  CHECK(derivative_sign_exact(0.8, 0.3) == 1);
  CHECK(derivative_sign_exact(0.2, 0.9) == -1);
  CHECK(derivative_sign_exact(0.5, 0.5) == 0);

  // Estimate flavor: inconclusive until the gap clears err + guard.
  CHECK(!derivative_sign_estimate(0.5, 0.5004, 0.001).has_value());
  CHECK(!derivative_sign_estimate(0.5, 0.5, 0.0).has_value());  // guard band
  const auto plus = derivative_sign_estimate(0.8, 0.3, 0.1);
  REQUIRE(plus.has_value());
  CHECK(*plus == 1);
  const auto minus = derivative_sign_estimate(0.2, 0.9, 0.1);
  REQUIRE(minus.has_value());
  CHECK(*minus == -1);
}

TEST_CASE("sign estimate is sound against the dense solution") {
  ThreadPool pool(1);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::uint32_t n = 8;
    const ProblemInstance inst = testutil::random_instance(n, 8, seed + 200);
    const std::vector<double>& alpha = inst.upper();
    const std::vector<double> z_star = equilibrium_exact(inst.matrix(), inst.s(), alpha);
    ResistanceVector rv(alpha);
    EquilibriumEstimate est;
    est.start(n, 1.0, rv.eps());
    for (int t = 0; t < 400; ++t) {
      est.step(inst.matrix(), alpha, inst.s(), pool);
      for (std::uint32_t i = 0; i < n; ++i) {
        const auto sign = derivative_sign_estimate(inst.s()[i], est.z[i], est.err);
        if (sign.has_value() && *sign != 0) {
          CHECK(*sign == derivative_sign_exact(inst.s()[i], z_star[i]));
        }
      }
    }
  }
}

TEST_CASE("phase cap is generous, finite, and shrinks with easier contraction") {
  const std::uint64_t tight = phase_iteration_cap(0.001);
  const std::uint64_t loose = phase_iteration_cap(0.5);
  CHECK(tight > loose);
  CHECK(loose >= 10);
  // Enough budget to push err below the settle guard with slack.
  const double eps = 0.001;
  const double need = std::log(1.0 / (eps * kSettleGuard)) / -std::log1p(-eps);
  CHECK(static_cast<double>(tight) >= 2.0 * need);
}

TEST_CASE("dimension mismatches are rejected by dense and iterative paths") {
  const InteractionMatrix m = *testutil::triangle_matrix();
  ThreadPool pool(1);
  const std::vector<double> bad = {0.5, 0.5};
  const std::vector<double> s = {1.0, 0.5, 0.0};
  CHECK_THROWS_AS(equilibrium_exact(m, s, bad), Error);
  CHECK_THROWS_AS(objective_iterative(m, s, bad, 1e-6, pool), Error);
}
