#include "esflow/grid.hpp"

#include <cmath>

#include "esflow/defaults.hpp"
#include "esflow/quad.hpp"

namespace esflow {

namespace gridfn {

double rho(double p) {
  const double q = 1.0 - p * p;
  return 2.0 * p / (q * q * q * q);
}

double F_grad(double p) { return p * p / 4.0; }

double F_c01(double p) { return std::log(p); }

double F_c12(double p) {
  const double q = 1.0 - p * p;
  return 4.0 * (1.0 / q + std::log(q));
}

double F_cQ(double p) { return -4.0 * std::log(1.0 - p * p); }

double F_rho(double p) {
  const double q = 1.0 - p * p;
  return (1.0 / 3.0) / (q * q * q);
}

double F_hardy(double p) { return 1.0 / (1.0 - p * p); }

std::vector<double> node_masses(int n, double (*F)(double)) {
  const double h = 1.0 / n;
  std::vector<double> m(n - 1);
  for (int i = 1; i < n; ++i) {
    const double x = i * h;
    m[i - 1] = F(x + h / 2.0) - F(x - h / 2.0);
  }
  return m;
}

HorizonMasses horizon_masses(int n) {
  const double h = 1.0 / n;
  HorizonMasses hm;
  hm.c12 = F_c12(h / 2.0) - 4.0;
  hm.cQ = F_cQ(h / 2.0);
  hm.rho = F_rho(h / 2.0) - 1.0 / 3.0;
  return hm;
}

std::vector<double> grad_cell_weights(int n) {
  const double h = 1.0 / n;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const double a = i * h, b = (i + 1) * h;
    w[i] = (b * b - a * a) / 4.0;
  }
  return w;
}

}  // namespace gridfn

namespace {

double lagrange(const double* xs, int k, double p) {
  double out = 1.0;
  for (int j = 0; j < 4; ++j)
    if (j != k) out *= (p - xs[j]) / (xs[k] - xs[j]);
  return out;
}

void cell_weights(const double* xs, double a, double b, double tol, double* out) {
  for (int k = 0; k < 4; ++k) {
    out[k] = quad::adaptive(
        [&](double p) { return gridfn::rho(p) * lagrange(xs, k, p); }, a, b, tol);
  }
}

}  // namespace

Grid Grid::build(int n) {
  if (n < 5) throw std::invalid_argument("Grid::build: need n >= 5");
  Grid g;
  g.n = n;
  g.h = 1.0 / n;
  g.p.resize(n - 1);
  g.r.resize(n - 1);
  g.w.assign(n - 1, 0.0);
  for (int i = 1; i < n; ++i) {
    const double p = i * g.h;
    g.p[i - 1] = p;
    g.r[i - 1] = 1.0 / (1.0 - p * p);
  }
  double ws[4];
  for (int i = 0; i + 2 < n; ++i) {  // cell [p_i, p_{i+1}] over the node hull
    const int j0 = std::min(std::max(i - 1, 0), n - 5);
    cell_weights(&g.p[j0], g.p[i], g.p[i + 1], defaults::grid_weight_tol, ws);
    for (int k = 0; k < 4; ++k) g.w[j0 + k] += ws[k];
  }
  for (double& x : g.w) x *= kFullMeasure;
  return g;
}

double Grid::integrate(const std::vector<double>& vals) const {
  if (static_cast<int>(vals.size()) != n - 1)
    throw std::invalid_argument("Grid::integrate: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] * vals[i];
  return total;
}

double Grid::integrate_window(const std::vector<double>& vals, double a,
                              double b) const {
  if (static_cast<int>(vals.size()) != n - 1)
    throw std::invalid_argument("Grid::integrate_window: size mismatch");
  double total = 0.0;
  double ws[4];
  for (int i = 0; i + 2 < n; ++i) {
    const double lo = std::max(p[i], a);
    const double hi = std::min(p[i + 1], b);
    if (hi <= lo) continue;
    const int j0 = std::min(std::max(i - 1, 0), n - 5);
    cell_weights(&p[j0], lo, hi, defaults::grid_weight_tol, ws);
    for (int k = 0; k < 4; ++k) total += ws[k] * vals[j0 + k];
  }
  return total * kFullMeasure;
}

}  // namespace esflow
