#include "esflow/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esflow {

CubicSpline CubicSpline::build(double x0, double h, std::vector<double> y) {
  const int m = static_cast<int>(y.size());
  if (m < 3) throw std::invalid_argument("CubicSpline: need at least 3 nodes");
  CubicSpline s;
  s.x0_ = x0;
  s.h_ = h;
  s.y_ = std::move(y);
  const int N = m - 1;
  std::vector<double> diag(m), rhs(m), sup(m);
  diag[0] = 2.0;
  sup[0] = 1.0;
  rhs[0] = 6.0 * (s.y_[1] - s.y_[0]) / (h * h);
  for (int i = 1; i < N; ++i) {
    diag[i] = 4.0;
    sup[i] = 1.0;
    rhs[i] = 6.0 * (s.y_[i + 1] - 2.0 * s.y_[i] + s.y_[i - 1]) / (h * h);
  }
  diag[N] = 1.0;
  rhs[N] = 0.0;
  // Thomas sweep; sub-diagonal is 1 except the last row, where it is 0
  for (int i = 1; i < N; ++i) {
    const double w = 1.0 / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  s.sigma_.resize(m);
  s.sigma_[N] = rhs[N] / diag[N];
  for (int i = N - 1; i >= 0; --i)
    s.sigma_[i] = (rhs[i] - sup[i] * s.sigma_[i + 1]) / diag[i];
  return s;
}

int CubicSpline::cell(double x, double& tau) const {
  const int N = static_cast<int>(y_.size()) - 1;
  int i = static_cast<int>(std::floor((x - x0_) / h_));
  i = std::min(std::max(i, 0), N - 1);
  tau = (x - x0_ - i * h_) / h_;
  return i;
}

double CubicSpline::eval(double x) const {
  double t;
  const int i = cell(x, t);
  const double omt = 1.0 - t;
  return omt * y_[i] + t * y_[i + 1] +
         (h_ * h_ / 6.0) *
             ((omt * omt * omt - omt) * sigma_[i] + (t * t * t - t) * sigma_[i + 1]);
}

double CubicSpline::deriv(double x) const {
  double t;
  const int i = cell(x, t);
  const double omt = 1.0 - t;
  return (y_[i + 1] - y_[i]) / h_ +
         (h_ / 6.0) *
             ((1.0 - 3.0 * omt * omt) * sigma_[i] + (3.0 * t * t - 1.0) * sigma_[i + 1]);
}

double CubicSpline::deriv2(double x) const {
  double t;
  const int i = cell(x, t);
  return (1.0 - t) * sigma_[i] + t * sigma_[i + 1];
}

}  // namespace esflow
