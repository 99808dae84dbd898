// End-to-end gate suite: each numbered check exercises one pipeline stage
// at its production settings and must finish inside its time budget.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "esflow/chart.hpp"
#include "esflow/defaults.hpp"
#include "esflow/deturck.hpp"
#include "esflow/flow.hpp"
#include "esflow/functional.hpp"
#include "esflow/geometry.hpp"
#include "esflow/grid.hpp"
#include "esflow/quad.hpp"
#include "esflow/spectral.hpp"

using namespace esflow;

namespace {

struct Gate {
  bool ok = false;
  std::string detail;
};

bool run_gate(int idx, const char* name, double limit_s,
              const std::function<Gate()>& body) {
  const auto tic = std::chrono::steady_clock::now();
  Gate g;
  try {
    g = body();
  } catch (const std::exception& e) {
    g.ok = false;
    g.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
  const bool in_time = secs <= limit_s;
  const bool pass = g.ok && in_time;
  std::printf("[%s] %d %s (%s) [%.1fs limit %.0fs%s]\n", pass ? "PASS" : "FAIL",
              idx, name, g.detail.c_str(), secs, limit_s,
              in_time ? "" : " EXCEEDED");
  std::fflush(stdout);
  return pass;
}

std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

int main() {
  bool all = true;

  all &= run_gate(1, "curvature parity", 5.0, [] {
    const auto g0 = geometry::schwarzschild();
    const auto radii =
        geometry::sample_radii(defaults::parity_samples, defaults::parity_r_min,
                               defaults::parity_r_max, defaults::parity_seed);
    const auto rows = geometry::parity_suite(g0, radii);
    double max_rel = 0.0;
    for (const auto& row : rows) max_rel = std::max(max_rel, row.rel_err);
    const double ricci = geometry::max_ricci_violation(g0, radii);
    const auto sect = geometry::sectional_bound_check(g0, radii);
    Gate g;
    g.ok = max_rel <= defaults::parity_rel_tol &&
           ricci <= defaults::ricci_flat_tol &&
           sect.max_ratio <= 1.0 + defaults::sectional_ratio_tol;
    g.detail = "max rel " + fmtg(max_rel) + "; ricci " + fmtg(ricci) +
               "; |K|r^3 " + fmtg(sect.max_ratio);
    return g;
  });

  all &= run_gate(2, "energy certificate", 1.0, [] {
    const double plateau =
        quad::adaptive([](double r) { return 16.0 - 32.0 / (r * r); }, 1.0,
                       std::sqrt(2.0), 1e-13);
    const double tail_log = quad::adaptive_tail(
        [](double r) { return std::exp(-4.0 * r / 3.0) / r; }, std::sqrt(2.0),
        1e-13);
    const double growth = std::exp(4.0 * std::sqrt(2.0) / 3.0);
    const auto cert = functional::negativity_certificate(defaults::certificate_n);
    Gate g;
    g.ok = std::abs(plateau - (-2.7451)) <= 1e-3 &&
           std::abs(tail_log - 0.05734) <= 5e-5 &&
           std::abs(growth - 6.5903) <= 5e-4 && cert.holds_ramp &&
           cert.sum_middle <= defaults::certificate_group_a &&
           cert.sum_tail <= defaults::certificate_group_b &&
           cert.total < defaults::certificate_total_max;
    g.detail = "plateau " + fmtg(plateau) + "; tail " + fmtg(tail_log) +
               "; growth " + fmtg(growth) + "; groups " + fmtg(cert.sum_ramp) +
               "/" + fmtg(cert.sum_middle) + "/" + fmtg(cert.sum_tail) +
               "; total " + fmtg(cert.total);
    return g;
  });

  all &= run_gate(3, "gradient inequality sweep", 10.0, [] {
    const auto sweep = functional::hardy_sweep(
        defaults::hardy_grid_n, defaults::hardy_count, defaults::hardy_seed);
    double worst = HUGE_VAL;
    bool ok = true;
    for (const auto& pr : sweep.pairs) {
      const double lr = pr.lhs / kFullMeasure;
      const double rr = pr.rhs / kFullMeasure;
      const double margin = (lr - rr) / (1.0 + lr);
      worst = std::min(worst, margin);
      if (lr - rr < -defaults::hardy_margin_tol * (1.0 + lr)) ok = false;
    }
    Gate g;
    g.ok = ok && static_cast<int>(sweep.pairs.size()) == defaults::hardy_count;
    g.detail = "worst margin " + fmtg(worst) + " over " +
               std::to_string(sweep.pairs.size()) + " tensors";
    return g;
  });

  all &= run_gate(4, "negative eigenvalue", 60.0, [&] {
    const auto e4096 = spectral::solve_min(4096);
    const auto e8192 = spectral::solve_min(8192);
    const auto cert = functional::negativity_certificate(defaults::certificate_n);
    const double upper = cert.a_hat / functional::hhat_norm_sq(defaults::certificate_n);
    const double resid = spectral::strong_residual(e8192.mode(), e8192.lambda);
    const auto f4 = spectral::decay_fits(e4096.mode());
    const auto f8 = spectral::decay_fits(e8192.mode());
    Gate g;
    const bool window = e4096.lambda > defaults::eigen_lambda_lo &&
                        e4096.lambda < defaults::eigen_lambda_hi;
    const bool below = e4096.lambda <= upper;
    const bool cauchy = std::abs(e4096.lambda - e8192.lambda) <= 1e-3;
    const bool res_ok = resid <= defaults::eigen_residual_tol;
    const bool decay_ok = std::abs(f8.c0 / f4.c0 - 1.0) <= 0.2 &&
                          std::abs(f8.c1 / f4.c1 - 1.0) <= 0.2;
    g.ok = window && below && cauchy && res_ok && decay_ok &&
           e4096.converged && e8192.converged;
    g.detail = "lambda " + fmtg(e4096.lambda) + " upper " + fmtg(upper) +
               "; |d lambda| " + fmtg(std::abs(e4096.lambda - e8192.lambda)) +
               "; resid " + fmtg(resid) + "; c0 " + fmtg(f8.c0) + " c1 " +
               fmtg(f8.c1);
    return g;
  });

  const flow::Mode mode = flow::Mode::build(defaults::flow_eigen_n);

  all &= run_gate(5, "background fixed point", 30.0, [&] {
    flow::Run run(defaults::flow_grid_n, defaults::flow_s_max, mode, 0.0, "g0",
                  defaults::flow_dt_max);
    for (int k = 0; k < 1000; ++k)
      if (!run.step()) break;
    const double drift = run.diag().norm_g;
    Gate g;
    g.ok = !run.blown && drift <= defaults::drift_tol;
    g.detail = "drift " + fmtg(drift) + " after 1000 steps";
    return g;
  });

  all &= run_gate(6, "seeded growth rate", 180.0, [&] {
    const double t_end = 1.0 / (-mode.lambda);
    const auto r1 = flow::run_flow(mode, 1024, defaults::flow_s_max,
                                   defaults::flow_epsilon, "g0_plus_eps_h", t_end);
    const auto r2 = flow::run_flow(mode, 2048, defaults::flow_s_max,
                                   defaults::flow_epsilon, "g0_plus_eps_h", t_end);
    const double lam = -mode.lambda;
    Gate g;
    const bool s1 = std::abs(r1.slope - lam) <= defaults::slope_rel_tol * lam;
    const bool s2 = std::abs(r2.slope - lam) <= defaults::slope_rel_tol * lam;
    const bool shrink = r2.max_w_over_delta <= 1.5 * r1.max_w_over_delta;
    g.ok = s1 && s2 && shrink && !r1.blown && !r2.blown;
    g.detail = "slopes " + fmtg(r1.slope) + "/" + fmtg(r2.slope) + " vs " +
               fmtg(lam) + "; C " + fmtg(r1.max_w_over_delta) + "->" +
               fmtg(r2.max_w_over_delta);
    return g;
  });

  all &= run_gate(7, "ancient family contraction", 600.0, [&] {
    const auto anc =
        flow::ancient_limit(mode, defaults::ancient_grid_n, defaults::flow_s_max,
                            defaults::ancient_pow_min, defaults::ancient_pow_max);
    Gate g;
    bool members_ok = true;
    for (const auto& mem : anc.members)
      if (mem.blown) members_ok = false;
    g.ok = anc.strictly_decreasing && members_ok &&
           anc.max_opening <= defaults::cone_bound_M;
    std::ostringstream d;
    d << "distances";
    for (double x : anc.distances) d << ' ' << fmtg(x);
    d << "; opening " << fmtg(anc.max_opening);
    g.detail = d.str();
    return g;
  });

  all &= run_gate(8, "gauge recovery", 120.0, [&] {
    const auto rep = deturck::recover(mode, defaults::deturck_grid_n,
                                      defaults::flow_s_max,
                                      std::pow(2.0, -defaults::deturck_eps_pow),
                                      "g0");
    bool identity = !rep.maps.empty();
    if (identity)
      for (size_t i = 0; i < rep.r_grid.size(); ++i)
        if (rep.maps[0][i] != rep.r_grid[i]) identity = false;
    Gate g;
    g.ok = identity && rep.monotone && !rep.crossing && !rep.blown &&
           rep.ratio <= defaults::deturck_ratio_max;
    g.detail = "shift " + fmtg(rep.max_abs_shift) + "; residual ratio " +
               fmtg(rep.ratio) + "; snapshots " + std::to_string(rep.snapshots);
    return g;
  });

  std::printf("%s\n", all ? "all gates passed" : "GATE FAILURES PRESENT");
  return all ? 0 : 1;
}
