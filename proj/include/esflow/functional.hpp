#pragma once
#include <cstdint>
#include <vector>

#include "esflow/chart.hpp"
#include "esflow/grid.hpp"
#include "esflow/rng.hpp"

// quadratic energy form of the linearized curvature operator on radial
// tensors, plus the analytic profile used to certify that it goes negative
namespace esflow::functional {

double mollifier(double z);  // C^inf bump supported on |z| < 1

// 1-3 mollifier bumps per component, centers in (0.15, 0.75), support in [0, 0.92]
RadialSymTensor random_bump_tensor(SplitMix64& rng, int n);

struct HardyPair {
  double lhs;  // full-measure int |grad h|^2
  double rhs;  // full-measure int |h|^2 / r^2
};
HardyPair hardy_gap(const RadialSymTensor& h);

struct HardySweep {
  double worst_margin;  // min over tensors of (lhs - rhs)/(1 + lhs)
  std::vector<HardyPair> pairs;
};
HardySweep hardy_sweep(int n, int count, std::uint64_t seed);

// profile (eta, eta, -eta): linear ramp on [1, 1+1/n), plateau to sqrt(2),
// then c e^{-2r/3} with c matching the plateau
double hhat_eta(int n, double r);
RadialSymTensor hhat_tensor(int n_profile, int grid_n);
double hhat_norm_sq(int n_profile);  // full measure, adaptive quadrature
double hhat_energy(int n_profile);   // full measure, adaptive quadrature

struct Certificate {
  int n = 0;
  double J[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  double total = 0.0;   // sum of the eight pieces, unit angular measure
  double a_hat = 0.0;   // total times the full measure
  double sum_ramp = 0.0;     // J1 + J6, must be <= 0
  double sum_middle = 0.0;   // J2 + J4 + J7, must be <= -0.7
  double sum_tail = 0.0;     // J3 + J5 + J8, must be <= 0.5695
  bool holds_ramp = false, holds_middle = false, holds_tail = false;
  bool holds_total = false;  // total < -0.1
};
Certificate negativity_certificate(int n);

struct EnergyParts {
  double grad = 0.0;       // int |grad h|^2
  double c01 = 0.0;        // t-r cross-term coefficient block
  double c12 = 0.0;        // r-sphere cross-term coefficient block
  double curvature = 0.0;  // paired curvature contraction, enters negated
  double total = 0.0;      // grad + c01 + c12 - curvature
};
EnergyParts energy_parts(const RadialSymTensor& h);  // full measure
double energy(const RadialSymTensor& h);

struct CurvatureBounds {
  double max_pair_violation;  // max of |K_ij u_i u_j| - r^{-3}(u_i^2+u_j^2)/2
  double integral_lhs;        // |curvature term of the energy|
  double integral_rhs;        // 4 int r^{-3} |h|^2
};
CurvatureBounds curvature_term_bounds(const RadialSymTensor& h);

struct CovariantDeriv {
  double d1_h00, d1_h11, d1_h22;  // radial derivatives of the diagonal entries
  double d0_h01, d2_h12;          // the only off-radial nonzero components
  double norm_sq;                 // |grad h|^2 at the point
};
CovariantDeriv covariant_derivative(const RadialSymTensor& h,
                                    const chart::ChartPoint& x);

struct TraceDivergence {
  std::vector<double> trace;  // H = u0 + u1 + 2 u2 at the nodes
  std::vector<double> xi1;    // radial component of the divergence covector
  double gap_norm;            // mass-weighted size of ddH + 2 div(xi) rows
};
TraceDivergence trace_and_divergence(const RadialSymTensor& h);

}  // namespace esflow::functional
