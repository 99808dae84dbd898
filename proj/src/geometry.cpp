#include "esflow/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "esflow/defaults.hpp"
#include "esflow/rng.hpp"

namespace esflow::geometry {

DiagonalRadialMetric schwarzschild() {
  DiagonalRadialMetric g;
  g.name = "schwarzschild";
  g.t_period = 4.0 * M_PI;
  g.jet = [](double r) {
    if (r <= 1.0) throw std::domain_error("schwarzschild: need r > 1");
    const double f = 1.0 - 1.0 / r;
    const double fp = 1.0 / (r * r);
    const double fpp = -2.0 / (r * r * r);
    MetricJet j;
    j.A = f;
    j.Ap = fp;
    j.App = fpp;
    j.B = 1.0 / f;
    j.Bp = -fp / (f * f);
    j.Bpp = -fpp / (f * f) + 2.0 * fp * fp / (f * f * f);
    j.C = r * r;
    j.Cp = 2.0 * r;
    j.Cpp = 2.0;
    return j;
  };
  return g;
}

DiagonalRadialMetric flat_product() {
  DiagonalRadialMetric g;
  g.name = "flat_product";
  g.t_period = 4.0 * M_PI;
  g.jet = [](double r) {
    if (r <= 0.0) throw std::domain_error("flat_product: need r > 0");
    MetricJet j;
    j.A = 1.0;
    j.Ap = 0.0;
    j.App = 0.0;
    j.B = 1.0;
    j.Bp = 0.0;
    j.Bpp = 0.0;
    j.C = r * r;
    j.Cp = 2.0 * r;
    j.Cpp = 2.0;
    return j;
  };
  return g;
}

double CurvatureSet::christoffel_at(int k, int i, int j) const {
  if (i > j) std::swap(i, j);
  if (k == 0 && i == 0 && j == 1) return G001;
  if (k == 1 && i == 0 && j == 0) return G100;
  if (k == 1 && i == 1 && j == 1) return G111;
  if (k == 1 && i == 2 && j == 2) return G122;
  if (k == 1 && i == 3 && j == 3) return G133;
  if (k == 2 && i == 1 && j == 2) return G212;
  if (k == 3 && i == 1 && j == 3) return G313;
  if (k == 2 && i == 3 && j == 3) return G233;
  if (k == 3 && i == 2 && j == 3) return G323;
  return 0.0;
}

double CurvatureSet::riemann_at(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 1) return R0101;
  if (i == 0 && j == 2) return R0202;
  if (i == 0 && j == 3) return R0303;
  if (i == 1 && j == 2) return R1212;
  if (i == 1 && j == 3) return R1313;
  if (i == 2 && j == 3) return R2323;
  throw std::invalid_argument("riemann_at: need distinct indices in 0..3");
}

double CurvatureSet::sectional_at(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 1) return K01;
  if (i == 0 && j == 2) return K02;
  if (i == 0 && j == 3) return K03;
  if (i == 1 && j == 2) return K12;
  if (i == 1 && j == 3) return K13;
  if (i == 2 && j == 3) return K23;
  throw std::invalid_argument("sectional_at: need distinct indices in 0..3");
}

namespace {

void fill_christoffel(CurvatureSet& c, const MetricJet& j) {
  c.G001 = j.Ap / (2.0 * j.A);
  c.G100 = -j.Ap / (2.0 * j.B);
  c.G111 = j.Bp / (2.0 * j.B);
  c.G122 = -j.Cp / (2.0 * j.B);
  c.G133 = c.G122;
  c.G212 = j.Cp / (2.0 * j.C);
  c.G313 = c.G212;
  c.G233 = 0.0;
  c.G323 = 0.0;
}

void fill_from_sectionals(CurvatureSet& c, const MetricJet& j) {
  c.K03 = c.K02;
  c.K13 = c.K12;
  c.R0101 = c.K01 * j.A * j.B;
  c.R0202 = c.K02 * j.A * j.C;
  c.R0303 = c.R0202;
  c.R1212 = c.K12 * j.B * j.C;
  c.R1313 = c.R1212;
  c.R2323 = c.K23 * j.C * j.C;
  const double ric0 = c.K01 + 2.0 * c.K02;
  const double ric1 = c.K01 + 2.0 * c.K12;
  const double ric2 = c.K02 + c.K12 + c.K23;
  c.Ric00 = j.A * ric0;
  c.Ric11 = j.B * ric1;
  c.Ric22 = j.C * ric2;
  c.Ric33 = c.Ric22;
  c.riem_norm_sq = 4.0 * (c.K01 * c.K01 + 2.0 * c.K02 * c.K02 +
                          2.0 * c.K12 * c.K12 + c.K23 * c.K23);
}

}  // namespace

CurvatureSet christoffel(const DiagonalRadialMetric& g, const chart::ChartPoint& x) {
  const double r = x.r();
  CurvatureSet c;
  c.r = r;
  fill_christoffel(c, g.jet(r));
  return c;
}

CurvatureSet riemann(const DiagonalRadialMetric& g, const chart::ChartPoint& x) {
  const double r = x.r();
  const MetricJet j = g.jet(r);
  CurvatureSet c;
  c.r = r;
  fill_christoffel(c, j);
  c.K01 = -(j.App - j.Ap * j.Ap / (2.0 * j.A) - j.Ap * j.Bp / (2.0 * j.B)) /
          (2.0 * j.A * j.B);
  c.K02 = -j.Ap * j.Cp / (4.0 * j.A * j.B * j.C);
  c.K12 = -(j.Cpp - j.Cp * j.Cp / (2.0 * j.C) - j.Cp * j.Bp / (2.0 * j.B)) /
          (2.0 * j.C * j.B);
  c.K23 = (1.0 - j.Cp * j.Cp / (4.0 * j.C * j.B)) / j.C;
  fill_from_sectionals(c, j);
  return c;
}

namespace {

// central difference with one Richardson sweep, fourth order in h
template <typename F>
double rich_deriv(F&& f, double x, double h) {
  auto cd = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * cd(0.5 * h) - cd(h)) / 3.0;
}

}  // namespace

CurvatureSet oracle_christoffel(const DiagonalRadialMetric& g, double r) {
  const double h = defaults::fd_metric_step;
  const MetricJet j = g.jet(r);
  const double Ap = rich_deriv([&](double rr) { return g.jet(rr).A; }, r, h);
  const double Bp = rich_deriv([&](double rr) { return g.jet(rr).B; }, r, h);
  const double Cp = rich_deriv([&](double rr) { return g.jet(rr).C; }, r, h);
  CurvatureSet c;
  c.r = r;
  c.G001 = Ap / (2.0 * j.A);
  c.G100 = -Ap / (2.0 * j.B);
  c.G111 = Bp / (2.0 * j.B);
  c.G122 = -Cp / (2.0 * j.B);
  c.G133 = c.G122;
  c.G212 = Cp / (2.0 * j.C);
  c.G313 = c.G212;
  return c;
}

CurvatureSet oracle_riemann(const DiagonalRadialMetric& g, double r) {
  const double H = defaults::fd_gamma_step_scale * std::min(r - 1.0, 1.0);
  if (!(H > 0.0)) throw std::domain_error("oracle_riemann: need r > 1");
  const MetricJet j = g.jet(r);
  const CurvatureSet G = christoffel(g, chart::ChartPoint::from_r(r));

  auto gamma = [&](double rr) { return christoffel(g, chart::ChartPoint::from_r(rr)); };
  const double dG100 = rich_deriv([&](double rr) { return gamma(rr).G100; }, r, H);
  const double dG212 = rich_deriv([&](double rr) { return gamma(rr).G212; }, r, H);
  const double dcot =
      rich_deriv([](double th) { return std::cos(th) / std::sin(th); },
                 0.5 * M_PI, defaults::fd_metric_step);

  CurvatureSet c;
  c.r = r;
  fill_christoffel(c, j);
  c.R0101 = j.B * (dG100 + G.G111 * G.G100 - G.G100 * G.G001);
  c.R0202 = j.C * (G.G212 * G.G100);
  c.R0303 = c.R0202;
  c.R1212 = j.C * (-dG212 + G.G212 * G.G111 - G.G212 * G.G212);
  c.R1313 = c.R1212;
  c.R2323 = j.C * (-dcot + G.G313 * G.G122);

  c.K01 = c.R0101 / (j.A * j.B);
  c.K02 = c.R0202 / (j.A * j.C);
  c.K03 = c.K02;
  c.K12 = c.R1212 / (j.B * j.C);
  c.K13 = c.K12;
  c.K23 = c.R2323 / (j.C * j.C);
  const double ric0 = c.K01 + 2.0 * c.K02;
  const double ric1 = c.K01 + 2.0 * c.K12;
  const double ric2 = c.K02 + c.K12 + c.K23;
  c.Ric00 = j.A * ric0;
  c.Ric11 = j.B * ric1;
  c.Ric22 = j.C * ric2;
  c.Ric33 = c.Ric22;
  c.riem_norm_sq = 4.0 * (c.K01 * c.K01 + 2.0 * c.K02 * c.K02 +
                          2.0 * c.K12 * c.K12 + c.K23 * c.K23);
  return c;
}

namespace {

struct NamedValue {
  const char* name;
  double CurvatureSet::*field;
};

constexpr NamedValue kGammaFields[] = {
    {"G001", &CurvatureSet::G001}, {"G100", &CurvatureSet::G100},
    {"G111", &CurvatureSet::G111}, {"G122", &CurvatureSet::G122},
    {"G212", &CurvatureSet::G212}};

constexpr NamedValue kRiemannFields[] = {
    {"R0101", &CurvatureSet::R0101}, {"R0202", &CurvatureSet::R0202},
    {"R1212", &CurvatureSet::R1212}, {"R2323", &CurvatureSet::R2323},
    {"riem_norm_sq", &CurvatureSet::riem_norm_sq}};

ParityRow make_row(double r, const std::string& name, double closed, double oracle) {
  ParityRow row;
  row.r = r;
  row.p = r > 1.0 ? chart::to_p(r) : 0.0;
  row.s = r > 1.0 ? chart::to_s(r) : 0.0;
  row.component = name;
  row.closed = closed;
  row.oracle = oracle;
  row.abs_err = std::fabs(closed - oracle);
  const double scale = std::max(std::fabs(closed), std::fabs(oracle));
  row.rel_err = row.abs_err / std::max(scale, 1e-300);
  return row;
}

}  // namespace

std::vector<ParityRow> parity_suite(const DiagonalRadialMetric& g,
                                    const std::vector<double>& radii,
                                    const std::string& fault_component) {
  std::vector<ParityRow> rows;
  rows.reserve(radii.size() * 10);
  for (double r : radii) {
    const CurvatureSet closed = riemann(g, chart::ChartPoint::from_r(r));
    const CurvatureSet og = oracle_christoffel(g, r);
    const CurvatureSet orr = oracle_riemann(g, r);
    for (const NamedValue& f : kGammaFields) {
      double cv = closed.*(f.field);
      if (fault_component == f.name) cv = -cv;
      rows.push_back(make_row(r, f.name, cv, og.*(f.field)));
    }
    for (const NamedValue& f : kRiemannFields) {
      double cv = closed.*(f.field);
      if (fault_component == f.name) cv = -cv;
      rows.push_back(make_row(r, f.name, cv, orr.*(f.field)));
    }
  }
  return rows;
}

SectionalReport sectional_bound_check(const DiagonalRadialMetric& g,
                                      const std::vector<double>& radii) {
  static const char* kPairs[] = {"K01", "K02", "K03", "K12", "K13", "K23"};
  SectionalReport rep;
  for (double r : radii) {
    const CurvatureSet c = riemann(g, chart::ChartPoint::from_r(r));
    const double ks[] = {c.K01, c.K02, c.K03, c.K12, c.K13, c.K23};
    for (int i = 0; i < 6; ++i) {
      const double ratio = std::fabs(ks[i]) * r * r * r;
      if (ratio > rep.max_ratio) {
        rep.max_ratio = ratio;
        rep.worst_r = r;
        rep.worst_pair = kPairs[i];
      }
    }
  }
  return rep;
}

std::vector<double> sample_radii(int count, double r_min, double r_max,
                                 std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> radii(count);
  for (double& r : radii) r = rng.uniform(r_min, r_max);
  return radii;
}

double max_ricci_violation(const DiagonalRadialMetric& g,
                           const std::vector<double>& radii) {
  double worst = 0.0;
  for (double r : radii) {
    const CurvatureSet c = riemann(g, chart::ChartPoint::from_r(r));
    worst = std::max({worst, std::fabs(c.Ric00), std::fabs(c.Ric11),
                      std::fabs(c.Ric22)});
  }
  return worst;
}

}  // namespace esflow::geometry
