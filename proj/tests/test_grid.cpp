#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "esflow/chart.hpp"
#include "esflow/functional.hpp"
#include "esflow/grid.hpp"
#include "esflow/quad.hpp"

using namespace esflow;

namespace {
// adaptive reference values of int_{0.1}^{0.9} p^k rho dp, unit angular measure
constexpr double kWindowRef[4] = {48.25441244916905, 40.88377626677514,
                                  34.91414896200722, 29.971346544612963};
}  // namespace

TEST_SUITE("grid") {

TEST_CASE("product rule reproduces moment windows") {
  const int n = 2048;
  const auto g = Grid::build(n);
  for (int k = 0; k <= 3; ++k) {
    std::vector<double> vals(n - 1);
    for (int i = 0; i < n - 1; ++i) vals[i] = std::pow(g.p[i], k);
    const double got = g.integrate_window(vals, 0.1, 0.9);
    const double want = kFullMeasure * kWindowRef[k];
    CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
  }
}

TEST_CASE("full window equals the plain quadrature") {
  const int n = 512;
  const auto g = Grid::build(n);
  std::vector<double> vals(n - 1);
  for (int i = 0; i < n - 1; ++i) vals[i] = std::exp(-2.0 * g.p[i]) * (1.0 - g.p[i]);
  const double a = g.integrate(vals);
  const double b = g.integrate_window(vals, 0.0, 1.0);
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("grid integral of the certified profile matches adaptive quadrature") {
  const int n = 2048;
  const auto g = Grid::build(n);
  std::vector<double> vals(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const double eta = functional::hhat_eta(1000, g.r[i]);
    vals[i] = 4.0 * eta * eta;
  }
  const double got = g.integrate(vals);
  const double adaptive = functional::hhat_norm_sq(1000);
  CHECK(std::abs(got - adaptive) <= 1e-7 * adaptive);
  CHECK(got / kFullMeasure == doctest::Approx(18.174195).epsilon(1e-6));
}

TEST_CASE("node masses approximate the density cell integrals") {
  const int n = 2048;
  const auto m = gridfn::node_masses(n, gridfn::F_rho);
  REQUIRE(m.size() == static_cast<size_t>(n - 1));
  const double h = 1.0 / n;
  for (int i : {n / 4, n / 2, 3 * n / 4}) {
    const double p = i * h;
    CHECK(m[i - 1] == doctest::Approx(gridfn::rho(p) * h).epsilon(1e-5));
    CHECK(m[i - 1] > 0.0);
  }
}

TEST_CASE("horizon cell masses follow the leading asymptotics") {
  const int n = 64;
  const auto hm = gridfn::horizon_masses(n);
  const double x = 0.5 / n;
  CHECK(hm.c12 == doctest::Approx(2.0 * x * x * x * x).epsilon(1e-3));
  CHECK(hm.cQ == doctest::Approx(4.0 * x * x).epsilon(1e-3));
  CHECK(hm.rho == doctest::Approx(x * x).epsilon(1e-3));
  CHECK(hm.c12 >= 0.0);
}

TEST_CASE("gradient cell weights telescope") {
  const int n = 128;
  const auto w = gridfn::grad_cell_weights(n);
  REQUIRE(w.size() == static_cast<size_t>(n));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / n, b = static_cast<double>(i + 1) / n;
    CHECK(w[i] == doctest::Approx((b * b - a * a) / 4.0).epsilon(1e-15));
    sum += w[i];
  }
  CHECK(sum == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("gauss kronrod panel on a smooth integrand") {
  const auto [ik, err] = quad::gk15([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(std::abs(ik - (std::exp(1.0) - 1.0)) <= 1e-14);
  CHECK(err <= 1e-10);
  const double v = quad::adaptive([](double x) { return std::exp(x); }, 0.0, 2.0);
  CHECK(std::abs(v - (std::exp(2.0) - 1.0)) <= 1e-12 * std::exp(2.0));
}

TEST_CASE("inverse square root stalls at the depth cap") {
  const double v = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(std::abs(v - 2.0) <= 5e-5);
  CHECK(std::abs(v - 2.0) >= 1e-7);
}

TEST_CASE("tail map integrates decaying functions") {
  const double ve = quad::adaptive_tail([](double r) { return std::exp(-r); }, 1.0);
  CHECK(std::abs(ve - std::exp(-1.0)) <= 1e-12);
  const double vr = quad::adaptive_tail([](double r) { return 1.0 / (r * r); }, 1.0);
  CHECK(std::abs(vr - 1.0) <= 1e-12);
}

TEST_CASE("grid guards its inputs") {
  CHECK_THROWS_AS(Grid::build(4), std::invalid_argument);
  const auto g = Grid::build(16);
  std::vector<double> bad(3, 1.0);
  CHECK_THROWS_AS(g.integrate(bad), std::invalid_argument);
  CHECK_THROWS_AS(g.integrate_window(bad, 0.2, 0.4), std::invalid_argument);
}

}  // TEST_SUITE
