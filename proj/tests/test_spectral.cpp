#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "esflow/defaults.hpp"
#include "esflow/spectral.hpp"

using namespace esflow;

namespace {
// converged ground values of the banded pencil at fixed resolutions
struct Ref {
  int n;
  double lambda;
};
constexpr Ref kLambdaRefs[] = {{256, -0.767645384183},
                               {512, -0.767654133332},
                               {1024, -0.767656320884},
                               {2048, -0.767656867789}};
}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("dof layout shares the horizon values") {
  CHECK(spectral::dof_index(0, 0) == 0);
  CHECK(spectral::dof_index(0, 1) == 0);
  CHECK(spectral::dof_index(0, 2) == 1);
  CHECK(spectral::dof_index(1, 0) == 2);
  CHECK(spectral::dof_index(1, 2) == 4);
  CHECK(spectral::dof_index(2, 0) == 5);
  const auto sys = spectral::assemble(64);
  CHECK(sys.ndof == 2 + 3 * 63);
  CHECK(sys.bw == 3);
}

TEST_CASE("banded matrix is symmetric with positive mass") {
  const auto sys = spectral::assemble(128);
  for (int i = 0; i < sys.ndof; i += 7) {
    for (int j = std::max(0, i - 3); j <= std::min(sys.ndof - 1, i + 3); ++j) {
      CHECK(sys.at(i, j) == doctest::Approx(sys.at(j, i)).epsilon(1e-13));
    }
  }
  CHECK(sys.at(0, 5) == 0.0);
  for (double b : sys.Bd) CHECK(b > 0.0);
  auto bad = spectral::BandedSystem::create(10, 2);
  CHECK_THROWS_AS(bad.add(0, 5, 1.0), std::out_of_range);
}

TEST_CASE("ground value at the reference resolutions") {
  for (const auto& ref : kLambdaRefs) {
    const auto eg = spectral::solve_min(ref.n);
    CHECK(eg.converged);
    CHECK(eg.iterations < defaults::eigen_max_iter);
    CHECK(std::abs(eg.lambda - ref.lambda) <= 1e-8);
    CHECK(eg.lambda > defaults::eigen_lambda_lo);
    CHECK(eg.lambda < defaults::eigen_lambda_hi);
  }
}

TEST_CASE("ground value converges at second order") {
  const double l0 = spectral::solve_min(256).lambda;
  const double l1 = spectral::solve_min(512).lambda;
  const double l2 = spectral::solve_min(1024).lambda;
  const double ratio = (l0 - l1) / (l1 - l2);
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);
}

TEST_CASE("mode normalization, sign, and horizon values") {
  const auto eg = spectral::solve_min(512);
  const auto sys = spectral::assemble(512);
  double xbx = 0.0;
  for (int k = 0; k < sys.ndof; ++k) xbx += eg.v[k] * sys.Bd[k] * eg.v[k];
  CHECK(xbx == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eg.v[0] > 0.0);
  CHECK(std::abs(eg.a - 0.969876) <= 1e-3);
  CHECK(std::abs(eg.a + eg.b) <= 1e-3);
  CHECK(spectral::rayleigh(sys, eg.v) == doctest::Approx(eg.lambda).epsilon(1e-8));
  const auto m = eg.mode();
  CHECK(m.n == 512);
  CHECK(m.has_horizon);
  CHECK(m.a == eg.a);
  CHECK(m.b == eg.b);
  CHECK(m.u0[10] == eg.v[spectral::dof_index(11, 0)]);
  CHECK(m.u2[10] == eg.v[spectral::dof_index(11, 2)]);
}

TEST_CASE("strong residual decays at first order") {
  const auto e256 = spectral::solve_min(256);
  const auto e512 = spectral::solve_min(512);
  const double r256 = spectral::strong_residual(e256.mode(), e256.lambda);
  const double r512 = spectral::strong_residual(e512.mode(), e512.lambda);
  CHECK(r256 > 2.8e-4);
  CHECK(r256 < 3.0e-4);
  CHECK(r512 / r256 >= 0.45);
  CHECK(r512 / r256 <= 0.55);
}

TEST_CASE("second ritz value sits near zero with an order one gap") {
  const auto eg = spectral::solve_min(1024);
  const auto sys = spectral::assemble(1024);
  const double l2 = spectral::second_ritz_value(sys, eg);
  CHECK(l2 - eg.lambda >= 0.7);
  CHECK(l2 - eg.lambda <= 0.85);
  CHECK(std::abs(l2) <= 0.01);
}

TEST_CASE("decay coefficients are stable under refinement") {
  const auto e1 = spectral::solve_min(1024);
  const auto e2 = spectral::solve_min(2048);
  const auto f1 = spectral::decay_fits(e1.mode());
  const auto f2 = spectral::decay_fits(e2.mode());
  CHECK(f1.c0 > 20.0);
  CHECK(f1.c0 < 40.0);
  CHECK(std::abs(f2.c0 / f1.c0 - 1.0) <= 0.005);
  CHECK(f1.c1 > 0.001);
  CHECK(f1.c1 < 0.01);
  CHECK(std::abs(f2.c1 / f1.c1 - 1.0) <= 0.02);
}

TEST_CASE("repeated solves are bitwise identical") {
  const auto a = spectral::solve_min(256);
  const auto b = spectral::solve_min(256);
  CHECK(a.lambda == b.lambda);
  CHECK(a.v == b.v);
  CHECK(a.iterations == b.iterations);
}

}  // TEST_SUITE
