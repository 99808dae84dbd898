#pragma once
#include <vector>

namespace esflow {

// cubic spline on a uniform grid, zero first derivative at the left end,
// zero second derivative at the right end
class CubicSpline {
 public:
  static CubicSpline build(double x0, double h, std::vector<double> y);
  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

 private:
  double x0_ = 0.0, h_ = 1.0;
  std::vector<double> y_, sigma_;  // sigma = second derivatives at the nodes
  int cell(double x, double& tau) const;
};

}  // namespace esflow
