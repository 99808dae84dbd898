#pragma once
#include <vector>

#include "esflow/grid.hpp"

// variational discretization of the radial curvature quadratic form:
// banded stiffness A and diagonal mass B over the dof vector
// [a, b, u0(p1), u1(p1), u2(p1), ...], horizon values shared as in
// RadialSymTensor, Dirichlet zero at p = 1
namespace esflow::spectral {

class BandedSystem {
 public:
  int ndof = 0;
  int bw = 3;
  std::vector<double> band;  // (2bw+1) x ndof, column-major, row bw + i - j
  std::vector<double> Bd;    // diagonal mass

  static BandedSystem create(int ndof, int bw);
  void add(int i, int j, double v);
  double at(int i, int j) const;
  std::vector<double> multiply(const std::vector<double>& x) const;
};

BandedSystem assemble(int n);
int dof_index(int node, int c);

struct IterationResult {
  double lambda = 0.0;
  std::vector<double> v;  // normalized so v' B v = 1
  int iterations = 0;
  bool converged = false;
};

// shifted inverse iteration for the eigenvalue nearest the shift;
// an optional deflation vector (B-normalized) is projected out each sweep
IterationResult inverse_iteration(const BandedSystem& sys, double shift,
                                  std::vector<double> start,
                                  const std::vector<double>* deflate,
                                  double tol, int max_iter);

struct EigenResult {
  int n = 0;
  double lambda = 0.0;
  double a = 0.0, b = 0.0;  // horizon values of the mode
  std::vector<double> v;
  int iterations = 0;
  bool converged = false;
  RadialSymTensor mode() const;
};

EigenResult solve_min(int n);
double second_ritz_value(const BandedSystem& sys, const EigenResult& ground);
double rayleigh(const BandedSystem& sys, const std::vector<double>& x);

// strong-form operator applied to the tensor at the interior nodes
RadialSymTensor lichnerowicz_apply(const RadialSymTensor& h);
double strong_residual(const RadialSymTensor& h, double lambda);

struct DecayFit {
  double c0;  // linear coefficient of |h| against p near the horizon
  double c1;  // coefficient against 1 - p^2 near infinity
};
DecayFit decay_fits(const RadialSymTensor& h);

}  // namespace esflow::spectral
