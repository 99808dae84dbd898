#pragma once
#include <stdexcept>
#include <vector>

namespace esflow {

inline constexpr double kPi = 3.14159265358979323846;
// measure of the t-circle (period 4 pi) times the unit round sphere
inline constexpr double kFullMeasure = 16.0 * kPi * kPi;

// diagonal radially symmetric tensor in the frame components
// h_tt = A u0, h_rr = B u1, h_thth = C u2 (phi slaved to theta);
// samples live on the interior p-nodes i/n, i = 1..n-1
struct RadialSymTensor {
  int n = 0;
  std::vector<double> u0, u1, u2;
  double a = 0.0, b = 0.0;  // horizon limits: u0(0)=u1(0)=a, u2(0)=b
  bool has_horizon = false;

  std::vector<double>& comp(int c) {
    if (c == 0) return u0;
    if (c == 1) return u1;
    if (c == 2) return u2;
    throw std::invalid_argument("RadialSymTensor::comp: c in 0..2");
  }
  const std::vector<double>& comp(int c) const {
    return const_cast<RadialSymTensor*>(this)->comp(c);
  }
  static RadialSymTensor zeros(int n) {
    RadialSymTensor t;
    t.n = n;
    t.u0.assign(n - 1, 0.0);
    t.u1.assign(n - 1, 0.0);
    t.u2.assign(n - 1, 0.0);
    return t;
  }
};

namespace gridfn {

double rho(double p);  // volume density per dp: r^2 dr/dp = 2p(1-p^2)^{-4}

// antiderivatives in p of the quadratic-form densities
double F_grad(double p);
double F_c01(double p);
double F_c12(double p);
double F_cQ(double p);
double F_rho(double p);
double F_hardy(double p);

// per-node masses F(p_i + h/2) - F(p_i - h/2), i = 1..n-1
std::vector<double> node_masses(int n, double (*F)(double));

struct HorizonMasses {
  double c12, cQ, rho;
};
HorizonMasses horizon_masses(int n);  // cell [0, h/2]

// gradient cell weights (pe_{i+1}^2 - pe_i^2)/4 for cells i = 0..n-1
std::vector<double> grad_cell_weights(int n);

}  // namespace gridfn

// product-integration rule: cellwise cubic through node values times rho,
// each cell integrated adaptively; weights carry the full 4d measure
class Grid {
 public:
  int n = 0;
  double h = 0.0;
  std::vector<double> p, r, w;

  static Grid build(int n);
  double integrate(const std::vector<double>& vals) const;
  // same rule restricted to [a, b] inside the node hull
  double integrate_window(const std::vector<double>& vals, double a, double b) const;
};

}  // namespace esflow
