#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "esflow/chart.hpp"
#include "esflow/defaults.hpp"
#include "esflow/deturck.hpp"
#include "esflow/flow.hpp"
#include "esflow/rng.hpp"

using namespace esflow;

namespace {

const flow::Mode& mode4096() {
  static const flow::Mode m = flow::Mode::build(4096);
  return m;
}

std::vector<double> bump_state(const flow::Background& bg, double amp,
                               SplitMix64& rng) {
  std::vector<double> y(3 * (bg.m + 1), 0.0);
  for (int c = 0; c < 3; ++c) {
    double ctr[3], wid[3], amps[3];
    for (int b = 0; b < 3; ++b) {
      ctr[b] = rng.uniform(6.0, 38.0);
      wid[b] = rng.uniform(1.5, 4.0);
      amps[b] = amp * rng.uniform(-1.0, 1.0);
    }
    for (int j = 0; j <= bg.m; ++j) {
      double v = 0.0;
      for (int b = 0; b < 3; ++b) {
        const double z = (bg.s[j] - ctr[b]) / wid[b];
        v += amps[b] * std::exp(-z * z);
      }
      y[3 * j + c] = v;
    }
    y[3 * bg.m + c] = 0.0;
  }
  y[1] = y[0];
  return y;
}

double rel_l2_against_linear(const flow::Background& bg,
                             const std::vector<double>& y, double lambda,
                             const std::vector<double>& out, double* horizon_rel) {
  const int m = bg.m;
  std::vector<double> diff(3 * (m + 1), 0.0), target(3 * (m + 1), 0.0);
  for (int k = 0; k < 3 * (m + 1); ++k) {
    target[k] = -lambda * y[k];
    diff[k] = out[k] - target[k];
  }
  if (horizon_rel) {
    horizon_rel[0] = std::abs(diff[0]) / std::abs(target[0]);
    horizon_rel[1] = std::abs(diff[2]) / std::abs(target[2]);
  }
  return flow::l2_tensor(bg, diff) / flow::l2_tensor(bg, target);
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("mode spline reproduces the eigen data") {
  const auto& md = mode4096();
  CHECK(std::abs(md.lambda - (-0.767657004511)) <= 1e-8);
  CHECK(md.a_h == doctest::Approx(0.077180).epsilon(2e-4));
  CHECK(md.b_h == doctest::Approx(-md.a_h).epsilon(1e-3));
  double u0[3], u1[3];
  md.at_p(0.0, u0);
  CHECK(u0[0] == doctest::Approx(md.a_h).epsilon(1e-8));
  CHECK(u0[2] == doctest::Approx(md.b_h).epsilon(1e-8));
  md.at_p(1.0, u1);
  CHECK(std::abs(u1[0]) <= 1e-10);
  // spline derivative against a central difference
  const double d = 1e-5;
  double lo[3], hi[3], dv[3];
  md.at_p(0.5 - d, lo);
  md.at_p(0.5 + d, hi);
  md.at_p(0.5, dv, 1);
  for (int c = 0; c < 3; ++c)
    CHECK(dv[c] == doctest::Approx((hi[c] - lo[c]) / (2 * d)).epsilon(1e-5));
}

TEST_CASE("background tables at zero amplitude") {
  const int m = 256;
  const flow::Background bg(m, 50.0, mode4096(), 0.0);
  CHECK(bg.r[0] == 1.0);
  CHECK(bg.sdot[0] == 0.5);
  CHECK(bg.sddot[0] == 0.0);
  CHECK(bg.ds == doctest::Approx(50.0 / m).epsilon(1e-15));
  CHECK(bg.wq[0] == 0.0);
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    const double r = bg.r[j];
    CHECK(r == doctest::Approx(chart::s_inverse(bg.s[j])).epsilon(1e-12));
    const double f = 1.0 - 1.0 / r;
    const double r3 = 1.0 / (r * r * r);
    CHECK(bg.A[i] == doctest::Approx(f).epsilon(1e-13));
    CHECK(bg.B[i] == doctest::Approx(1.0 / f).epsilon(1e-13));
    CHECK(bg.C[i] == doctest::Approx(r * r).epsilon(1e-13));
    CHECK(bg.K01[i] == doctest::Approx(r3).epsilon(1e-12));
    CHECK(bg.K23[i] == doctest::Approx(r3).epsilon(1e-12));
    CHECK(bg.K02[i] == doctest::Approx(-0.5 * r3).epsilon(1e-12));
    CHECK(bg.K12[i] == doctest::Approx(-0.5 * r3).epsilon(1e-12));
    CHECK(bg.Pr[i] == doctest::Approx(f).epsilon(1e-13));
    CHECK(bg.wq[j] > 0.0);
    CHECK(bg.wbar[3 * j + 0] == 1.0);
    CHECK(bg.wbar[3 * j + 2] == 1.0);
  }
  // first and second derivative stencils are exact on quadratics in r
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    const double rm = bg.r[j - 1], rc = bg.r[j], ru = bg.r[j + 1];
    const double d1 = bg.d1[3 * i + 0] * rm * rm + bg.d1[3 * i + 1] * rc * rc +
                      bg.d1[3 * i + 2] * ru * ru;
    CHECK(d1 == doctest::Approx(2.0 * rc).epsilon(1e-9));
    const double d2 = bg.d2[3 * i + 0] * rm * rm + bg.d2[3 * i + 1] * rc * rc +
                      bg.d2[3 * i + 2] * ru * ru;
    CHECK(d2 == doctest::Approx(2.0).epsilon(1e-7));
  }
}

TEST_CASE("background frame ratios carry the seeded amplitude") {
  const int m = 128;
  const double e = 1e-3;
  const flow::Background bg(m, 50.0, mode4096(), e);
  CHECK(bg.eps_b == e);
  CHECK(bg.wbar[0] == doctest::Approx(1.0 + e * mode4096().a_h).epsilon(1e-14));
  CHECK(bg.wbar[2] == doctest::Approx(1.0 + e * mode4096().b_h).epsilon(1e-14));
  for (int j = 1; j < m; j += 17) {
    double u[3];
    mode4096().at_p(chart::to_p(bg.r[j]), u);
    for (int c = 0; c < 3; ++c)
      CHECK(bg.wbar[3 * j + c] == doctest::Approx(1.0 + e * u[c]).epsilon(1e-12));
  }
}

TEST_CASE("run construction in both backgrounds") {
  const int m = 256;
  flow::Run rs(m, 50.0, mode4096(), 1e-3);
  CHECK(rs.t0 == doctest::Approx(std::log(1e-3) / (-rs.lambda)).epsilon(1e-14));
  CHECK(rs.t == rs.t0);
  CHECK(rs.dt > 0.0);
  CHECK(rs.delta() == doctest::Approx(1e-3).epsilon(1e-12));
  double ymax = 0.0;
  for (double v : rs.y) ymax = std::max(ymax, std::abs(v));
  CHECK(ymax == 0.0);
  CHECK(rs.uh_nodes[0] == mode4096().a_h);
  CHECK(rs.uh_nodes[1] == mode4096().a_h);
  CHECK(rs.uh_nodes[2] == mode4096().b_h);
  CHECK(rs.uh_nodes[3 * m + 0] == 0.0);

  flow::Run rg(m, 50.0, mode4096(), 1e-3, "g0");
  for (int k = 0; k < 3 * (m + 1); ++k)
    CHECK(rg.y[k] == doctest::Approx(1e-3 * rg.uh_nodes[k]).epsilon(1e-12));
  CHECK(&rg.bg0() == &rg.bg());
  CHECK(&rs.bg0() != &rs.bg());

  CHECK_THROWS_AS(flow::Run(m, 50.0, mode4096(), 1e-3, "weird"),
                  std::invalid_argument);
}

TEST_CASE("tendency linearizes onto the eigenvalue") {
  double rel[2] = {0.0, 0.0};
  double hor[2];
  int k = 0;
  for (int m : {1024, 2048}) {
    flow::Run run(m, 50.0, mode4096(), 1e-6, "g0");
    std::vector<double> out(3 * (m + 1), 0.0);
    flow::rhs_direct(run.bg(), run.y, out);
    rel[k] = rel_l2_against_linear(run.bg(), run.y, run.lambda, out, hor);
    CHECK(hor[0] <= 1e-4);
    CHECK(hor[1] <= 1e-4);
    ++k;
  }
  CHECK(rel[0] >= 0.05);
  CHECK(rel[0] <= 0.10);
  CHECK(rel[1] <= 0.04);
  CHECK(rel[0] / rel[1] >= 2.0);

  // reference route agrees at the same resolution
  flow::Run run(2048, 50.0, mode4096(), 1e-6, "g0");
  std::vector<double> out(3 * 2049, 0.0);
  flow::rhs_expanded(run.bg(), run.y, out);
  CHECK(rel_l2_against_linear(run.bg(), run.y, run.lambda, out, nullptr) <= 0.05);
}

TEST_CASE("direct and expanded tendencies agree on smooth states") {
  const int m = 1024;
  const flow::Background bg(m, 50.0, mode4096(), 0.0);
  double rel[2] = {0.0, 0.0};
  int k = 0;
  for (double amp : {1e-4, 1e-2}) {
    SplitMix64 rng(0x524F555445ull);
    const auto y = bump_state(bg, amp, rng);
    std::vector<double> r1(3 * (m + 1), 0.0), r2(3 * (m + 1), 0.0);
    flow::rhs_expanded(bg, y, r1);
    flow::rhs_direct(bg, y, r2);
    double maxdiff = 0.0, maxval = 0.0;
    for (int j = 2; j <= m - 2; ++j) {
      for (int c = 0; c < 3; ++c) {
        maxdiff = std::max(maxdiff, std::abs(r1[3 * j + c] - r2[3 * j + c]));
        maxval = std::max(maxval, std::abs(r1[3 * j + c]));
      }
    }
    REQUIRE(maxval > 0.0);
    rel[k++] = maxdiff / maxval;
  }
  CHECK(rel[0] <= 2e-4);
  CHECK(rel[1] <= 2e-2);
  // the two routes differ only through quadratic remainders, so the
  // disagreement must scale linearly in the amplitude
  CHECK(rel[1] / rel[0] >= 50.0);
  CHECK(rel[1] / rel[0] <= 200.0);
}

TEST_CASE("parallel tendency is bitwise equal to serial") {
  const int m = 1024;
  const flow::Background bg(m, 50.0, mode4096(), 0.0);
  SplitMix64 rng(0x504152ull);
  const auto y = bump_state(bg, 1e-2, rng);
  std::vector<double> a(3 * (m + 1), 0.0), b(3 * (m + 1), 1.0);
  flow::rhs_direct(bg, y, a, true);
  flow::rhs_direct(bg, y, b, false);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("unperturbed background does not drift") {
  flow::Run run(512, 50.0, mode4096(), 0.0, "g0", 1e-3);
  for (int k = 0; k < 200; ++k) REQUIRE(run.step());
  CHECK(!run.blown);
  CHECK(run.diag().norm_g <= 1e-10);
}

TEST_CASE("time stepping converges as dt shrinks") {
  const int m = 512;
  const double dts[3] = {5e-4, 2.5e-4, 1.25e-4};
  std::vector<double> finals[3];
  for (int k = 0; k < 3; ++k) {
    flow::Run run(m, 50.0, mode4096(), 1e-3, "g0_plus_eps_h", dts[k]);
    const int nst = static_cast<int>(std::llround(0.3 / dts[k]));
    for (int it = 0; it < nst; ++it) REQUIRE(run.step());
    finals[k] = run.y;
  }
  double e01 = 0.0, e12 = 0.0;
  for (size_t i = 0; i < finals[0].size(); ++i) {
    e01 = std::max(e01, std::abs(finals[0][i] - finals[1][i]));
    e12 = std::max(e12, std::abs(finals[1][i] - finals[2][i]));
  }
  REQUIRE(e12 > 0.0);
  CHECK(e01 / e12 >= 1.7);
  CHECK(e01 / e12 <= 4.0);
}

TEST_CASE("seeded run tracks the linear growth rate") {
  const auto res = flow::run_flow(mode4096(), 1024, 50.0, 1e-3,
                                  "g0_plus_eps_h", 1.0 / 0.7677);
  CHECK(!res.blown);
  CHECK(res.steps > 1000);
  REQUIRE(res.rows.size() > 10);
  for (size_t i = 1; i < res.rows.size(); ++i)
    CHECK(res.rows[i].t > res.rows[i - 1].t);
  CHECK(res.slope >= 0.745);
  CHECK(res.slope <= 0.765);
  CHECK(res.max_w_over_delta <= 0.05);
  CHECK(res.max_farfield <= defaults::farfield_tol);
  CHECK(res.max_opening <= 0.02);
}

TEST_CASE("positivity guard trips on an oversized seed") {
  const auto res =
      flow::run_flow(mode4096(), 256, 50.0, 8.0, "g0_plus_eps_h", 6.0);
  CHECK(res.blown);
}

TEST_CASE("cone report recognizes rays and orthogonal excursions") {
  const int m = 512;
  const flow::Background bg(m, 50.0, mode4096(), 0.0);
  flow::Run run(m, 50.0, mode4096(), 1.0, "g0");
  const auto& h = run.uh_nodes;
  const double hn = flow::w12_tensor(bg, h);
  REQUIRE(hn > 0.0);

  std::vector<double> v(h.size());
  for (size_t i = 0; i < h.size(); ++i) v[i] = 3.0 * h[i];
  auto cr = flow::cone_report(bg, v, h);
  CHECK(cr.opening <= 1e-6 * hn);
  CHECK(cr.delta_star == doctest::Approx(3.0).epsilon(1e-9));

  // orthogonalized bump, one percent of the ray amplitude
  std::vector<double> q(h.size(), 0.0);
  for (int j = 1; j < m; ++j) {
    const double z = (bg.s[j] - 20.0) / 6.0;
    const double b = std::exp(-z * z);
    q[3 * j + 0] = b;
    q[3 * j + 1] = -0.5 * b;
    q[3 * j + 2] = 0.25 * b;
  }
  q[1] = q[0];
  const double proj = flow::w12_inner(bg, q, h) / (hn * hn);
  for (size_t i = 0; i < q.size(); ++i) q[i] -= proj * h[i];
  const double qn = flow::w12_tensor(bg, q);
  const double scale = 0.03 * hn / qn;
  for (size_t i = 0; i < q.size(); ++i) v[i] = 3.0 * h[i] + scale * q[i];
  cr = flow::cone_report(bg, v, h);
  const double want = 0.03 * hn / std::sqrt(9.0 + 0.03 * 0.03);
  CHECK(cr.opening == doctest::Approx(want).epsilon(1e-6));
  CHECK(cr.delta_star == doctest::Approx(3.0 + 0.0009 / 3.0).epsilon(1e-6));

  std::vector<double> zero(h.size(), 0.0);
  CHECK_THROWS_AS(flow::cone_report(bg, v, zero), std::invalid_argument);
}

TEST_CASE("ancient family structure at a coarse resolution") {
  const auto res = flow::ancient_limit(mode4096(), 256, 50.0, 4, 6);
  REQUIRE(res.members.size() == 3);
  REQUIRE(res.distances.size() == 2);
  CHECK(res.t_common ==
        doctest::Approx(std::log(0.0625) / (-mode4096().lambda)).epsilon(1e-12));
  CHECK(res.members[0].steps == 0);
  CHECK(res.members[1].steps > 0);
  CHECK(res.members[0].eps == 0.0625);
  CHECK(res.members[2].eps == doctest::Approx(1.0 / 64.0).epsilon(1e-15));
  for (const auto& mb : res.members) {
    CHECK(!mb.blown);
    CHECK(mb.norm_g > 0.0);
    CHECK(mb.gfr.size() == 3 * 257);
  }
  CHECK(res.members[0].opening <= 1e-6);
  for (double d : res.distances) {
    CHECK(std::isfinite(d));
    CHECK(d > 0.0);
  }
  CHECK_THROWS_AS(flow::ancient_limit(mode4096(), 256, 50.0, 5, 4),
                  std::invalid_argument);
}

TEST_CASE("gauge recovery is the identity without a seed") {
  const auto rep = deturck::recover(mode4096(), 256, 50.0, 0.0, "g0", 1.5);
  CHECK(!rep.blown);
  CHECK(!rep.crossing);
  CHECK(rep.monotone);
  CHECK(rep.snapshots >= 4);
  REQUIRE(rep.maps.size() == rep.deltas.size());
  REQUIRE(!rep.maps.empty());
  CHECK(rep.maps[0] == rep.r_grid);
  double worst = 0.0;
  for (const auto& map : rep.maps)
    for (size_t i = 0; i < map.size(); ++i)
      worst = std::max(worst, std::abs(map[i] - rep.r_grid[i]));
  CHECK(worst <= 1e-12);
  CHECK(rep.max_abs_shift <= 1e-12);
}

TEST_CASE("gauge recovery structure on a seeded run") {
  const auto rep = deturck::recover(mode4096(), 512, 50.0, 1.0 / 64.0, "g0");
  CHECK(rep.steps > 0);
  CHECK(rep.dt > 0.0);
  CHECK(!rep.blown);
  CHECK(!rep.crossing);
  CHECK(rep.monotone);
  CHECK(rep.snapshots >= 4);
  REQUIRE(rep.maps.size() == rep.deltas.size());
  CHECK(rep.maps[0] == rep.r_grid);
  CHECK(rep.deltas.front() < rep.deltas.back());
  CHECK(rep.max_abs_shift > 0.0);
  CHECK(rep.max_abs_shift < 1e-2);
  CHECK(rep.ricci_residual > 0.0);
  CHECK(rep.rdt_self_residual > 0.0);
  CHECK(rep.ratio > 0.0);
}

}  // TEST_SUITE
