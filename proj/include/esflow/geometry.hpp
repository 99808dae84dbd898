#pragma once
#include <functional>
#include <string>
#include <vector>

#include "esflow/chart.hpp"

// Curvature of diagonal radial metrics A(r)dt^2 + B(r)dr^2 + C(r)dOmega^2.
// All S^2-sector values are stored with the sin^2(theta) factor stripped
// (evaluated at the equator); indices are 0=t, 1=r, 2=theta, 3=phi.
namespace esflow::geometry {

struct MetricJet {
  double A, Ap, App;
  double B, Bp, Bpp;
  double C, Cp, Cpp;
};

struct DiagonalRadialMetric {
  std::function<MetricJet(double)> jet;  // exact value/derivative data at r
  std::string name;
  double t_period;
};

DiagonalRadialMetric schwarzschild();  // (1-1/r) dt^2 + (1-1/r)^{-1} dr^2 + r^2 dOmega^2
DiagonalRadialMetric flat_product();   // dt^2 + dr^2 + r^2 dOmega^2

struct CurvatureSet {
  double r = 0.0;
  // Christoffel symbols Gkij = Gamma^k_{ij}
  double G001 = 0, G100 = 0, G111 = 0, G122 = 0, G133 = 0, G212 = 0, G313 = 0;
  double G233 = 0, G323 = 0;  // vanish at the equator
  // Riemann R_{ijij} (lowered, pair-symmetric)
  double R0101 = 0, R0202 = 0, R0303 = 0, R1212 = 0, R1313 = 0, R2323 = 0;
  // sectional curvatures K_ij = R_{ijij}/(g_ii g_jj)
  double K01 = 0, K02 = 0, K03 = 0, K12 = 0, K13 = 0, K23 = 0;
  // diagonal Ricci (lowered) and |Riem|^2
  double Ric00 = 0, Ric11 = 0, Ric22 = 0, Ric33 = 0;
  double riem_norm_sq = 0;

  double christoffel_at(int k, int i, int j) const;
  double riemann_at(int i, int j) const;   // R_{ijij}
  double sectional_at(int i, int j) const; // K_ij
};

CurvatureSet christoffel(const DiagonalRadialMetric& g, const chart::ChartPoint& x);
CurvatureSet riemann(const DiagonalRadialMetric& g, const chart::ChartPoint& x);

// oracle_christoffel: finite differences of the metric replace A', B', C'.
// oracle_riemann: finite differences of exactly evaluated Christoffels with
// radius-scaled Richardson steps, assembled through the curvature definition.
CurvatureSet oracle_christoffel(const DiagonalRadialMetric& g, double r);
CurvatureSet oracle_riemann(const DiagonalRadialMetric& g, double r);

struct ParityRow {
  double r, p, s;
  std::string component;
  double closed, oracle, abs_err, rel_err;
};

// closed forms vs oracles on given radii; fault_component (test hook) flips
// the sign of that closed-form entry to prove the suite detects regressions
std::vector<ParityRow> parity_suite(const DiagonalRadialMetric& g,
                                    const std::vector<double>& radii,
                                    const std::string& fault_component = "");

struct SectionalReport {
  double max_ratio = 0.0;  // max |K_ij| r^3
  double worst_r = 0.0;
  std::string worst_pair;
};
SectionalReport sectional_bound_check(const DiagonalRadialMetric& g,
                                      const std::vector<double>& radii);

std::vector<double> sample_radii(int count, double r_min, double r_max,
                                 std::uint64_t seed);
double max_ricci_violation(const DiagonalRadialMetric& g,
                           const std::vector<double>& radii);

}  // namespace esflow::geometry
