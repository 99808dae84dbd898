#include "esflow/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "esflow/chart.hpp"
#include "esflow/defaults.hpp"
#include "esflow/deturck.hpp"
#include "esflow/flow.hpp"
#include "esflow/functional.hpp"
#include "esflow/geometry.hpp"
#include "esflow/io.hpp"
#include "esflow/spectral.hpp"
#include "esflow/version.hpp"
#include "json.hpp"

namespace esflow::cli {

namespace {

using nlohmann::json;

constexpr const char* kUsage =
    "usage: escli <subcommand> [--config <path>] [--out <dir>] [--json]\n"
    "subcommands:\n"
    "  verify-geometry   curvature closed forms vs finite-difference oracles\n"
    "                    (extra flag: --inject-sign-fault <component>)\n"
    "  certificate       analytic negativity certificate of the energy form\n"
    "  eigen             lowest eigenvalue of the curvature quadratic form\n"
    "  flow              one seeded evolution run with trajectory output\n"
    "  ancient           epsilon-sequence limit plus gauge recovery checks\n";

struct Ctx {
  std::string sub;
  io::Config cfg;
  std::string out_dir = ".";
  bool json_out = false;
  std::string fault;
  std::vector<std::string> artifacts;
  std::chrono::steady_clock::time_point start;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

void save_artifact(Ctx& c, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(c.out_dir);
  io::write_text_file(c.out_dir + "/" + name, body);
  c.artifacts.push_back(name);
}

void write_manifest(Ctx& c) {
  json j;
  j["command"] = c.sub;
  json jc = json::object();
  for (const auto& [k, v] : c.cfg.entries()) jc[k] = v;
  j["config"] = jc;
  j["artifacts"] = c.artifacts;
  j["versions"] = {{"tool", kToolVersion}, {"schema", kSchemaVersion}};
  const auto now = std::chrono::steady_clock::now();
  j["wall_time"] = std::chrono::duration<double>(now - c.start).count();
  std::filesystem::create_directories(c.out_dir);
  io::write_text_file(c.out_dir + "/manifest.json", j.dump(2) + "\n");
}

void emit(Ctx& c, const json& summary, const std::string& human) {
  if (c.json_out)
    *c.out << summary.dump(2) << "\n";
  else
    *c.out << human;
}

int cmd_verify_geometry(Ctx& c) {
  c.cfg.require_known({"samples", "r_min", "r_max", "seed"});
  const int samples = c.cfg.get_int("samples", defaults::parity_samples);
  if (samples < 10)
    throw std::invalid_argument("verify-geometry: samples must be >= 10");
  const double r_min = c.cfg.get_num("r_min", defaults::parity_r_min);
  const double r_max = c.cfg.get_num("r_max", defaults::parity_r_max);
  const auto seed =
      static_cast<std::uint64_t>(c.cfg.get_num("seed", static_cast<double>(defaults::parity_seed)));
  if (r_min <= 1.0 || r_max <= r_min)
    throw std::invalid_argument("verify-geometry: need 1 < r_min < r_max");

  const geometry::DiagonalRadialMetric g = geometry::schwarzschild();
  const std::vector<double> radii = geometry::sample_radii(samples, r_min, r_max, seed);
  const std::vector<geometry::ParityRow> rows =
      geometry::parity_suite(g, radii, c.fault);
  double max_rel = 0.0;
  const geometry::ParityRow* worst = &rows.front();
  for (const geometry::ParityRow& row : rows) {
    if (row.rel_err > max_rel) {
      max_rel = row.rel_err;
      worst = &row;
    }
  }
  const double ricci = geometry::max_ricci_violation(g, radii);
  const geometry::SectionalReport sect = geometry::sectional_bound_check(g, radii);

  std::ostringstream csv;
  csv << "r,p,s,component_name,closed_form,oracle,abs_err\n";
  for (const geometry::ParityRow& row : rows) {
    csv << io::fmt(row.r) << ',' << io::fmt(row.p) << ',' << io::fmt(row.s)
        << ',' << row.component << ',' << io::fmt(row.closed) << ','
        << io::fmt(row.oracle) << ',' << io::fmt(row.abs_err) << '\n';
  }
  save_artifact(c, "geometry_parity.csv", csv.str());

  const bool pass_parity = max_rel <= defaults::parity_rel_tol;
  const bool pass_ricci = ricci <= defaults::ricci_flat_tol;
  const bool pass_sect = sect.max_ratio <= 1.0 + defaults::sectional_ratio_tol;
  const bool pass = pass_parity && pass_ricci && pass_sect;

  json j;
  j["schema"] = kSchemaVersion;
  j["samples"] = samples;
  j["r_min"] = r_min;
  j["r_max"] = r_max;
  j["max_rel_err"] = max_rel;
  j["worst_component"] = worst->component;
  j["worst_r"] = worst->r;
  j["max_ricci_component"] = ricci;
  j["max_sectional_ratio"] = sect.max_ratio;
  j["sectional_worst_pair"] = sect.worst_pair;
  j["pass_parity"] = pass_parity;
  j["pass_ricci_flat"] = pass_ricci;
  j["pass_sectional_bound"] = pass_sect;
  j["pass"] = pass;
  save_artifact(c, "geometry_summary.json", j.dump(2) + "\n");

  std::ostringstream human;
  human << "parity: max rel err " << io::fmt(max_rel) << " on " << worst->component
        << " at r=" << io::fmt(worst->r) << (pass_parity ? "  ok" : "  FAIL") << "\n"
        << "ricci flat: max component " << io::fmt(ricci)
        << (pass_ricci ? "  ok" : "  FAIL") << "\n"
        << "sectional bound: max |K|r^3 " << io::fmt(sect.max_ratio) << " ("
        << sect.worst_pair << ")" << (pass_sect ? "  ok" : "  FAIL") << "\n";
  emit(c, j, human.str());
  if (!pass)
    *c.err << "verify-geometry: failing component: "
           << (pass_parity ? sect.worst_pair : worst->component) << "\n";
  return pass ? 0 : 1;
}

int cmd_certificate(Ctx& c) {
  c.cfg.require_known({"n"});
  const int n = c.cfg.get_int("n", defaults::certificate_n);
  const functional::Certificate cert = functional::negativity_certificate(n);

  json j;
  j["schema"] = kSchemaVersion;
  j["n"] = cert.n;
  for (int i = 0; i < 8; ++i) j["J" + std::to_string(i + 1)] = cert.J[i];
  j["total"] = cert.total;
  j["a_hat"] = cert.a_hat;
  j["inequalities"] = {
      {"ne1", {{"sum", cert.sum_ramp}, {"bound", 0.0}, {"holds", cert.holds_ramp}}},
      {"ne2",
       {{"sum", cert.sum_middle},
        {"bound", defaults::certificate_group_a},
        {"holds", cert.holds_middle}}},
      {"ne3",
       {{"sum", cert.sum_tail},
        {"bound", defaults::certificate_group_b},
        {"holds", cert.holds_tail}}}};
  j["holds_total"] = cert.holds_total;
  save_artifact(c, "certificate.json", j.dump(2) + "\n");

  std::ostringstream human;
  human << "n = " << cert.n << "\n";
  for (int i = 0; i < 8; ++i)
    human << "J" << (i + 1) << " = " << io::fmt(cert.J[i]) << "\n";
  human << "total = " << io::fmt(cert.total)
        << "  a_hat = " << io::fmt(cert.a_hat) << "\n"
        << "ne1 (J1+J6 <= 0): " << io::fmt(cert.sum_ramp)
        << (cert.holds_ramp ? "  ok" : "  FAIL") << "\n"
        << "ne2 (J2+J4+J7 <= " << io::fmt(defaults::certificate_group_a)
        << "): " << io::fmt(cert.sum_middle)
        << (cert.holds_middle ? "  ok" : "  FAIL") << "\n"
        << "ne3 (J3+J5+J8 <= " << io::fmt(defaults::certificate_group_b)
        << "): " << io::fmt(cert.sum_tail)
        << (cert.holds_tail ? "  ok" : "  FAIL") << "\n";
  emit(c, j, human.str());
  if (!cert.holds_total) {
    *c.err << "certificate: failing groupings:";
    if (!cert.holds_ramp) *c.err << " ne1";
    if (!cert.holds_middle) *c.err << " ne2";
    if (!cert.holds_tail) *c.err << " ne3";
    *c.err << " total\n";
  }
  return cert.holds_total ? 0 : 1;
}

int cmd_eigen(Ctx& c) {
  c.cfg.require_known({"grid_n"});
  const int n = c.cfg.get_int("grid_n", defaults::eigen_grid_n);
  if (n < 8) throw std::invalid_argument("eigen: grid_n must be >= 8");
  const spectral::EigenResult er = spectral::solve_min(n);
  if (!er.converged) throw std::runtime_error("eigen: iteration did not converge");
  const spectral::BandedSystem sys = spectral::assemble(n);
  const double lam2 = spectral::second_ritz_value(sys, er);
  const RadialSymTensor h = er.mode();
  const double resid = spectral::strong_residual(h, er.lambda);
  const spectral::DecayFit fit = spectral::decay_fits(h);
  const functional::TraceDivergence td = functional::trace_and_divergence(h);
  const functional::Certificate cert =
      functional::negativity_certificate(defaults::certificate_n);
  const double upper = cert.a_hat / functional::hhat_norm_sq(defaults::certificate_n);

  json j;
  j["schema"] = kSchemaVersion;
  j["grid_n"] = n;
  j["lambda"] = er.lambda;
  j["residual_l2"] = resid;
  j["decay"] = {{"c0", fit.c0}, {"c1", fit.c1}};
  j["upper_bound_from_certificate"] = upper;
  j["second_ritz_gap"] = lam2 - er.lambda;
  j["trace_divergence_gap"] = td.gap_norm;
  j["horizon"] = {{"a", er.a}, {"b", er.b}};
  j["iterations"] = er.iterations;
  save_artifact(c, "eigen.json", j.dump(2) + "\n");

  std::ostringstream csv;
  csv << "p,r,u0,u1,u2\n";
  for (int i = 0; i < n; ++i) {
    const double p = static_cast<double>(i) / n;
    const double r = 1.0 / (1.0 - p * p);
    const double u0 = i == 0 ? h.a : h.u0[i - 1];
    const double u1 = i == 0 ? h.a : h.u1[i - 1];
    const double u2 = i == 0 ? h.b : h.u2[i - 1];
    csv << io::fmt(p) << ',' << io::fmt(r) << ',' << io::fmt(u0) << ','
        << io::fmt(u1) << ',' << io::fmt(u2) << '\n';
  }
  save_artifact(c, "mode_profile.csv", csv.str());

  const bool pass = er.lambda > defaults::eigen_lambda_lo &&
                    er.lambda < defaults::eigen_lambda_hi &&
                    resid <= defaults::eigen_residual_tol;
  std::ostringstream human;
  human << "lambda = " << io::fmt(er.lambda) << " (iterations " << er.iterations
        << ")\n"
        << "residual_l2 = " << io::fmt(resid) << "\n"
        << "upper bound from certificate = " << io::fmt(upper) << "\n"
        << "second ritz gap = " << io::fmt(lam2 - er.lambda) << "\n"
        << "decay c0 = " << io::fmt(fit.c0) << "  c1 = " << io::fmt(fit.c1)
        << "\n"
        << (pass ? "ok\n" : "FAIL\n");
  emit(c, j, human.str());
  if (!pass) *c.err << "eigen: lambda window or residual check failed\n";
  return pass ? 0 : 1;
}

int cmd_flow(Ctx& c) {
  c.cfg.require_known({"epsilon", "t_end", "grid_n", "s_max", "dt", "background"});
  const double eps = c.cfg.get_num("epsilon", defaults::flow_epsilon);
  if (eps < 0.0) throw std::invalid_argument("flow: epsilon must be >= 0");
  const int m = c.cfg.get_int("grid_n", defaults::flow_grid_n);
  if (m < 16) throw std::invalid_argument("flow: grid_n must be >= 16");
  const double s_max = c.cfg.get_num("s_max", defaults::flow_s_max);
  const double dt = c.cfg.get_num("dt", 0.0);
  const std::string background = c.cfg.get_str("background", "g0_plus_eps_h");
  if (background != "g0" && background != "g0_plus_eps_h")
    throw std::invalid_argument("flow: background must be g0 or g0_plus_eps_h");

  const flow::Mode mode = flow::Mode::build(defaults::flow_eigen_n);
  const double t_end = c.cfg.get_num("t_end", 1.0 / (-mode.lambda));
  const flow::FlowResult res =
      flow::run_flow(mode, m, s_max, eps, background, t_end, dt);

  std::ostringstream csv;
  csv << "t,delta,norm_g_minus_g0,norm_w,cone_opening,farfield_max\n";
  for (const flow::TrajectoryRow& row : res.rows) {
    csv << io::fmt(row.t) << ',' << io::fmt(row.delta) << ','
        << io::fmt(row.norm_g) << ',' << io::fmt(row.norm_w) << ','
        << io::fmt(row.opening) << ',' << io::fmt(row.farfield) << '\n';
  }
  save_artifact(c, "trajectory.csv", csv.str());

  const bool nonlinear = eps > defaults::linear_eps_max;
  const double ci_lo = res.slope - defaults::slope_rel_tol * std::abs(res.slope);
  const double ci_hi = res.slope + defaults::slope_rel_tol * std::abs(res.slope);
  const double target = -res.lambda;
  const bool slope_ok = ci_lo <= target && target <= ci_hi;

  json j;
  j["schema"] = kSchemaVersion;
  j["epsilon"] = eps;
  j["grid_n"] = m;
  j["s_max"] = s_max;
  j["background"] = background;
  j["dt"] = res.dt;
  j["t0"] = res.t0;
  j["t_end"] = t_end;
  j["lambda"] = res.lambda;
  j["steps"] = res.steps;
  j["blown"] = res.blown;
  j["slope"] = res.slope;
  j["slope_ci"] = {{"lo", ci_lo}, {"hi", ci_hi}};
  j["slope_target"] = target;
  j["max_w_over_delta"] = res.max_w_over_delta;
  j["max_cone_opening"] = res.max_opening;
  j["max_farfield"] = res.max_farfield;
  if (nonlinear) j["warning"] = "nonlinear_regime";
  save_artifact(c, "flow_summary.json", j.dump(2) + "\n");

  std::ostringstream human;
  human << "epsilon = " << io::fmt(eps) << "  grid_n = " << m
        << "  dt = " << io::fmt(res.dt) << "  steps = " << res.steps << "\n"
        << "blown = " << (res.blown ? "true" : "false") << "\n"
        << "slope = " << io::fmt(res.slope) << " vs -lambda = "
        << io::fmt(target) << "\n"
        << "max |w|/delta = " << io::fmt(res.max_w_over_delta) << "\n";
  if (nonlinear) human << "warning: nonlinear_regime\n";
  emit(c, j, human.str());

  if (res.blown) {
    *c.err << "flow: trajectory left the positivity window\n";
    return 1;
  }
  if (eps == 0.0 || nonlinear) return 0;
  if (!slope_ok) {
    *c.err << "flow: slope CI does not contain -lambda\n";
    return 1;
  }
  return 0;
}

int cmd_ancient(Ctx& c) {
  c.cfg.require_known({"grid_n", "s_max", "pow_min", "pow_max"});
  const int m = c.cfg.get_int("grid_n", defaults::ancient_grid_n);
  if (m < 16) throw std::invalid_argument("ancient: grid_n must be >= 16");
  const double s_max = c.cfg.get_num("s_max", defaults::flow_s_max);
  const int pow_min = c.cfg.get_int("pow_min", defaults::ancient_pow_min);
  const int pow_max = c.cfg.get_int("pow_max", defaults::ancient_pow_max);
  if (pow_min < 1 || pow_max < pow_min)
    throw std::invalid_argument("ancient: need 1 <= pow_min <= pow_max");

  const flow::Mode mode = flow::Mode::build(defaults::flow_eigen_n);
  const flow::AncientResult anc =
      flow::ancient_limit(mode, m, s_max, pow_min, pow_max);
  const deturck::Report dtr = deturck::recover(
      mode, m, s_max, std::pow(2.0, -pow_max), "g0");
  double ident = 0.0;
  for (std::size_t i = 0; i < dtr.r_grid.size(); ++i)
    ident = std::max(ident, std::abs(dtr.maps[0][i] - dtr.r_grid[i]));
  const bool identity_ok = ident == 0.0;
  const bool deturck_ok = !dtr.blown && !dtr.crossing && dtr.monotone &&
                          identity_ok &&
                          dtr.ratio <= defaults::deturck_ratio_max;
  bool members_ok = true;
  for (const flow::AncientMember& mem : anc.members)
    if (mem.blown) members_ok = false;
  const bool pass = anc.strictly_decreasing && members_ok && deturck_ok;

  std::ostringstream csv;
  csv << "eps,steps,norm_g_minus_g0,cone_opening,dist_to_finer\n";
  for (std::size_t i = 0; i < anc.members.size(); ++i) {
    const flow::AncientMember& mem = anc.members[i];
    csv << io::fmt(mem.eps) << ',' << mem.steps << ',' << io::fmt(mem.norm_g)
        << ',' << io::fmt(mem.opening) << ',';
    if (i < anc.distances.size()) csv << io::fmt(anc.distances[i]);
    csv << '\n';
  }
  save_artifact(c, "ancient_table.csv", csv.str());

  json j;
  j["schema"] = kSchemaVersion;
  j["grid_n"] = m;
  j["s_max"] = s_max;
  j["pow_min"] = pow_min;
  j["pow_max"] = pow_max;
  j["t_common"] = anc.t_common;
  j["distances"] = anc.distances;
  j["strictly_decreasing"] = anc.strictly_decreasing;
  j["max_cone_opening"] = anc.max_opening;
  j["deturck"] = {{"epsilon", std::pow(2.0, -pow_max)},
                  {"steps", dtr.steps},
                  {"snapshots", dtr.snapshots},
                  {"dt", dtr.dt},
                  {"monotone", dtr.monotone},
                  {"identity_at_zero", identity_ok},
                  {"max_abs_shift", dtr.max_abs_shift},
                  {"ricci_residual", dtr.ricci_residual},
                  {"rdt_self_residual", dtr.rdt_self_residual},
                  {"ratio", dtr.ratio},
                  {"ratio_max", defaults::deturck_ratio_max}};
  j["pass"] = pass;
  save_artifact(c, "ancient_summary.json", j.dump(2) + "\n");

  std::ostringstream human;
  human << "t_common = " << io::fmt(anc.t_common) << "\n";
  for (std::size_t i = 0; i < anc.members.size(); ++i) {
    human << "eps = " << io::fmt(anc.members[i].eps) << "  |g-g0| = "
          << io::fmt(anc.members[i].norm_g) << "  opening = "
          << io::fmt(anc.members[i].opening) << "\n";
  }
  human << "distances:";
  for (double d : anc.distances) human << ' ' << io::fmt(d);
  human << (anc.strictly_decreasing ? "  (strictly decreasing)\n"
                                    : "  (NOT decreasing)\n");
  human << "deturck: monotone = " << (dtr.monotone ? "true" : "false")
        << "  max |X-r| = " << io::fmt(dtr.max_abs_shift)
        << "  residual ratio = " << io::fmt(dtr.ratio) << "\n"
        << (pass ? "ok\n" : "FAIL\n");
  emit(c, j, human.str());
  if (!pass) {
    *c.err << "ancient: failing checks:";
    if (!anc.strictly_decreasing) *c.err << " cauchy-decrease";
    if (!members_ok) *c.err << " member-blowup";
    if (!deturck_ok) *c.err << " deturck";
    *c.err << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  Ctx c;
  c.out = &out;
  c.err = &err;
  c.start = std::chrono::steady_clock::now();
  if (args.empty()) {
    err << kUsage;
    return 2;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << kUsage;
    return 0;
  }
  c.sub = args[0];
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto next = [&]() -> const std::string& {
      if (i + 1 >= args.size())
        throw std::invalid_argument("missing value after " + a);
      return args[++i];
    };
    try {
      if (a == "--config")
        config_path = next();
      else if (a == "--out")
        c.out_dir = next();
      else if (a == "--json")
        c.json_out = true;
      else if (a == "--inject-sign-fault" && c.sub == "verify-geometry")
        c.fault = next();
      else {
        err << "unknown option: " << a << "\n" << kUsage;
        return 2;
      }
    } catch (const std::invalid_argument& e) {
      err << e.what() << "\n";
      return 2;
    }
  }

  int code = 0;
  try {
    if (!config_path.empty()) c.cfg = io::Config::parse_file(config_path);
    if (c.sub == "verify-geometry")
      code = cmd_verify_geometry(c);
    else if (c.sub == "certificate")
      code = cmd_certificate(c);
    else if (c.sub == "eigen")
      code = cmd_eigen(c);
    else if (c.sub == "flow")
      code = cmd_flow(c);
    else if (c.sub == "ancient")
      code = cmd_ancient(c);
    else {
      err << "unknown subcommand: " << c.sub << "\n" << kUsage;
      return 2;
    }
  } catch (const std::invalid_argument& e) {
    err << c.sub << ": " << e.what() << "\n";
    if (!c.artifacts.empty()) write_manifest(c);
    return 2;
  } catch (const std::exception& e) {
    err << c.sub << ": " << e.what() << "\n";
    if (!c.artifacts.empty()) write_manifest(c);
    return 3;
  }
  write_manifest(c);
  return code;
}

}  // namespace esflow::cli
