#pragma once
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "esflow/spline.hpp"

// normalized Ricci-de Turck evolution of diagonal radial metrics in
// frame-ratio variables y_c = g_cc / gbar_cc - 1 on the uniform s-grid,
// horizon node shared (y0(0) = y1(0)), Dirichlet zero at s_max
namespace esflow::flow {

// eigenmode splined over p, scaled to unit norm in the full measure
class Mode {
 public:
  double lambda = 0.0;
  double a_h = 0.0, b_h = 0.0;  // horizon values of the scaled mode
  int n_eig = 0;

  static Mode build(int n_eig);
  void at_p(double p, double out[3], int deriv = 0) const;

 private:
  std::vector<CubicSpline> sp_;
};

// coefficient tables of the background metric on the s-grid; interior
// vectors are indexed j-1 for node j = 1..m
struct Background {
  int m = 0;
  double s_max = 0.0, ds = 0.0, eps_b = 0.0;
  std::vector<double> s, r, sdot, sddot;  // size m+1
  std::vector<double> A, Ap, App, B, Bp, Bpp, C, Cp, Cpp;
  std::vector<double> G111, K01, K02, K12, K23, P, a0, LA, c0, LC, Pr;
  std::vector<double> d1, d2;  // 3-point r-stencils, 3 x (m-1), nodes 1..m-1
  double P0 = 0, K01h = 0, K02h = 0, K12h = 0, K23h = 0;  // horizon limits
  std::vector<double> wq, alg01, alg12, f;  // size m+1
  std::vector<double> wbar;                 // 3 x (m+1) frame ratio vs g0

  Background(int m, double s_max, const Mode& mode, double eps_b);
};

// tendencies from the curvature of the full metric plus the de Turck
// reparametrization term; fills all nodes 0..m (node m stays zero)
void rhs_direct(const Background& bg, const std::vector<double>& y,
                std::vector<double>& out, bool parallel = true);
// reference form with expanded background coefficients, for cross-checks
void rhs_expanded(const Background& bg, const std::vector<double>& y,
                  std::vector<double>& out);

double l2_tensor(const Background& bg, const std::vector<double>& k);
double w12_tensor(const Background& bg, const std::vector<double>& k);
double w12_inner(const Background& bg, const std::vector<double>& k1,
                 const std::vector<double>& k2);

struct ConeReport {
  double opening = 0.0;     // distance of the reference direction to the ray
  double delta_star = 0.0;  // fitted amplitude along the reference direction
};
ConeReport cone_report(const Background& bg0, const std::vector<double>& v0,
                       const std::vector<double>& hvec);

class Run {
 public:
  Run(int m, double s_max, const Mode& mode, double eps,
      const std::string& background = "g0_plus_eps_h", double dt_fixed = 0.0);

  bool step();  // false once the positivity guard trips
  double delta() const;
  std::vector<double> gfr() const;  // frame ratio vs g0 at all nodes

  struct DiagOut {
    double norm_g = 0.0, norm_w = 0.0, farfield = 0.0;
    std::vector<double> v0;
  };
  DiagOut diag() const;

  const Background& bg() const { return bg_; }
  const Background& bg0() const { return bg0_ ? *bg0_ : bg_; }

  int m = 0;
  double eps = 0.0;
  double t = 0.0, t0 = 0.0, dt = 0.0;
  double lambda = 0.0;
  bool blown = false;
  std::vector<double> y;         // 3 x (m+1)
  std::vector<double> uh_nodes;  // mode samples on the s-grid, 3 x (m+1)

 private:
  Background bg_;
  std::unique_ptr<Background> bg0_;
  std::vector<double> denom_, cp_, sub_;  // prefactored tridiagonal solve
  double rcoef0_ = 0.0;
  std::vector<double> full_, expl_;
};

struct TrajectoryRow {
  double t, delta, norm_g, norm_w, opening, farfield;
};

struct FlowResult {
  std::vector<TrajectoryRow> rows;
  int steps = 0;
  double dt = 0.0, t0 = 0.0, lambda = 0.0;
  bool blown = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double max_w_over_delta = 0.0, max_opening = 0.0, max_farfield = 0.0;
};

// evolve for a duration of t_end past the seeding time and sample the
// trajectory every sample_every steps; the slope fits log ||g - g0|| vs t
FlowResult run_flow(const Mode& mode, int m, double s_max, double eps,
                    const std::string& background, double t_end,
                    double dt_fixed = 0.0, int sample_every = 50);

struct AncientMember {
  double eps = 0.0;
  int steps = 0;
  double norm_g = 0.0, opening = 0.0;
  bool blown = false;
  std::vector<double> gfr;
};

struct AncientResult {
  std::vector<AncientMember> members;
  std::vector<double> distances;  // consecutive W12 distances at t_common
  bool strictly_decreasing = false;
  double max_opening = 0.0;
  double t_common = 0.0;
};

// members seeded at eps = 2^-k, k = pow_min..pow_max, all run to the common
// time where the largest seed reaches unit delta; backgrounds pinned to g0
AncientResult ancient_limit(const Mode& mode, int m, double s_max, int pow_min,
                            int pow_max);

}  // namespace esflow::flow
