#include "esflow/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>

#include "esflow/defaults.hpp"

namespace esflow::spectral {

BandedSystem BandedSystem::create(int ndof, int bw) {
  BandedSystem s;
  s.ndof = ndof;
  s.bw = bw;
  s.band.assign(static_cast<std::size_t>(2 * bw + 1) * ndof, 0.0);
  s.Bd.assign(ndof, 0.0);
  return s;
}

void BandedSystem::add(int i, int j, double v) {
  if (std::abs(i - j) > bw) throw std::out_of_range("BandedSystem::add: outside band");
  band[static_cast<std::size_t>(j) * (2 * bw + 1) + (bw + i - j)] += v;
}

double BandedSystem::at(int i, int j) const {
  if (std::abs(i - j) > bw) return 0.0;
  return band[static_cast<std::size_t>(j) * (2 * bw + 1) + (bw + i - j)];
}

std::vector<double> BandedSystem::multiply(const std::vector<double>& x) const {
  std::vector<double> y(ndof, 0.0);
  for (int j = 0; j < ndof; ++j) {
    const int lo = std::max(0, j - bw), hi = std::min(ndof - 1, j + bw);
    for (int i = lo; i <= hi; ++i) y[i] += at(i, j) * x[j];
  }
  return y;
}

int dof_index(int node, int c) {
  if (node == 0) return c < 2 ? 0 : 1;
  return 2 + 3 * (node - 1) + c;
}

namespace {

constexpr double kB01[3][3] = {{1, -1, 0}, {-1, 1, 0}, {0, 0, 0}};
constexpr double kB12[3][3] = {{0, 0, 0}, {0, 1, -1}, {0, -1, 1}};
constexpr double kBQ[3][3] = {{0, .5, -.5}, {.5, 0, -.5}, {-.5, -.5, 1}};
constexpr double kMult[3] = {1.0, 1.0, 2.0};

}  // namespace

BandedSystem assemble(int n) {
  const int N = n - 1;
  const double h = 1.0 / n;
  const auto m_c01 = gridfn::node_masses(n, gridfn::F_c01);
  const auto m_c12 = gridfn::node_masses(n, gridfn::F_c12);
  const auto m_cQ = gridfn::node_masses(n, gridfn::F_cQ);
  const auto m_rho = gridfn::node_masses(n, gridfn::F_rho);
  const auto hm = gridfn::horizon_masses(n);
  const auto w_grad = gridfn::grad_cell_weights(n);

  BandedSystem sys = BandedSystem::create(2 + 3 * N, 3);
  for (int c = 0; c < 3; ++c) {
    for (int cell = 0; cell < n; ++cell) {
      const double w = kMult[c] * w_grad[cell] / (h * h);
      const int iL = cell, iR = cell + 1;
      sys.add(dof_index(iL, c), dof_index(iL, c), w);
      if (iR <= N) {
        sys.add(dof_index(iR, c), dof_index(iR, c), w);
        sys.add(dof_index(iL, c), dof_index(iR, c), -w);
        sys.add(dof_index(iR, c), dof_index(iL, c), -w);
      }
    }
  }
  for (int i = 1; i <= N; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int d = 0; d < 3; ++d) {
        const double v = m_c01[i - 1] * kB01[c][d] + m_c12[i - 1] * kB12[c][d] -
                         m_cQ[i - 1] * kBQ[c][d];
        if (v != 0.0) sys.add(dof_index(i, c), dof_index(i, d), v);
      }
    }
  }
  for (int c = 0; c < 3; ++c) {
    for (int d = 0; d < 3; ++d) {
      const double v = hm.c12 * kB12[c][d] - hm.cQ * kBQ[c][d];
      if (v != 0.0) sys.add(dof_index(0, c), dof_index(0, d), v);
    }
  }
  sys.Bd[0] = 2.0 * hm.rho;
  sys.Bd[1] = 2.0 * hm.rho;
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < 3; ++c) sys.Bd[2 + 3 * i + c] = m_rho[i] * kMult[c];
  return sys;
}

namespace {

double b_dot(const BandedSystem& sys, const std::vector<double>& x,
             const std::vector<double>& y) {
  double s = 0.0;
  for (int i = 0; i < sys.ndof; ++i) s += x[i] * sys.Bd[i] * y[i];
  return s;
}

// LU factorization of (A - shift B) in the LAPACK general-band layout
struct BandedFactor {
  int ndof, bw, ldab;
  std::vector<double> ab;
  std::vector<lapack_int> ipiv;

  BandedFactor(const BandedSystem& sys, double shift)
      : ndof(sys.ndof), bw(sys.bw), ldab(3 * sys.bw + 1), ab(0), ipiv(sys.ndof) {
    ab.assign(static_cast<std::size_t>(ldab) * ndof, 0.0);
    for (int j = 0; j < ndof; ++j) {
      const int lo = std::max(0, j - bw), hi = std::min(ndof - 1, j + bw);
      for (int i = lo; i <= hi; ++i) {
        double v = sys.at(i, j);
        if (i == j) v -= shift * sys.Bd[i];
        ab[static_cast<std::size_t>(j) * ldab + (2 * bw + i - j)] = v;
      }
    }
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, ndof, ndof, bw, bw,
                                           ab.data(), ldab, ipiv.data());
    if (info != 0) throw std::runtime_error("dgbtrf failed");
  }

  void solve(std::vector<double>& x) const {
    const lapack_int info =
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', ndof, bw, bw, 1, ab.data(), ldab,
                       ipiv.data(), x.data(), ndof);
    if (info != 0) throw std::runtime_error("dgbtrs failed");
  }
};

}  // namespace

IterationResult inverse_iteration(const BandedSystem& sys, double shift,
                                  std::vector<double> start,
                                  const std::vector<double>* deflate,
                                  double tol, int max_iter) {
  if (static_cast<int>(start.size()) != sys.ndof)
    throw std::invalid_argument("inverse_iteration: start size mismatch");
  const BandedFactor fac(sys, shift);

  IterationResult out;
  std::vector<double> x = std::move(start);
  double nrm = std::sqrt(b_dot(sys, x, x));
  for (double& xi : x) xi /= nrm;
  double lam_old = HUGE_VAL;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> y(sys.ndof);
    for (int i = 0; i < sys.ndof; ++i) y[i] = sys.Bd[i] * x[i];
    fac.solve(y);
    if (deflate) {
      const double proj = b_dot(sys, y, *deflate);
      for (int i = 0; i < sys.ndof; ++i) y[i] -= proj * (*deflate)[i];
    }
    nrm = std::sqrt(b_dot(sys, y, y));
    for (double& yi : y) yi /= nrm;
    const std::vector<double> Ay = sys.multiply(y);
    double lam = 0.0;
    for (int i = 0; i < sys.ndof; ++i) lam += y[i] * Ay[i];
    x = std::move(y);
    out.iterations = it;
    out.lambda = lam;
    if (std::fabs(lam - lam_old) <= tol) {
      out.converged = true;
      break;
    }
    lam_old = lam;
  }
  out.v = std::move(x);
  return out;
}

EigenResult solve_min(int n) {
  const BandedSystem sys = assemble(n);
  std::vector<double> start(sys.ndof);
  start[0] = 1.0;
  start[1] = -1.0;
  const double h = 1.0 / n;
  for (int i = 1; i < n; ++i) {
    const double p = i * h;
    const double w = 1.0 - p * p;
    start[dof_index(i, 0)] = w;
    start[dof_index(i, 1)] = w;
    start[dof_index(i, 2)] = -w;
  }
  IterationResult it =
      inverse_iteration(sys, defaults::eigen_shift, std::move(start), nullptr,
                        defaults::eigen_tol, defaults::eigen_max_iter);
  EigenResult out;
  out.n = n;
  out.lambda = it.lambda;
  out.iterations = it.iterations;
  out.converged = it.converged;
  out.v = std::move(it.v);
  if (out.v[0] < 0.0)
    for (double& x : out.v) x = -x;
  out.a = out.v[0];
  out.b = out.v[1];
  return out;
}

double second_ritz_value(const BandedSystem& sys, const EigenResult& ground) {
  const int n = ground.n;
  std::vector<double> start(sys.ndof);
  start[0] = 1.0;
  start[1] = 1.0;
  const double h = 1.0 / n;
  for (int i = 1; i < n; ++i) {
    const double w = 1.0 - (i * h) * (i * h);
    start[dof_index(i, 0)] = w;
    start[dof_index(i, 1)] = w;
    start[dof_index(i, 2)] = w;
  }
  const IterationResult it =
      inverse_iteration(sys, defaults::eigen_shift, std::move(start), &ground.v,
                        defaults::eigen_tol, defaults::eigen_max_iter);
  return it.lambda;
}

double rayleigh(const BandedSystem& sys, const std::vector<double>& x) {
  const std::vector<double> Ax = sys.multiply(x);
  double num = 0.0;
  for (int i = 0; i < sys.ndof; ++i) num += x[i] * Ax[i];
  return num / b_dot(sys, x, x);
}

RadialSymTensor EigenResult::mode() const {
  RadialSymTensor t = RadialSymTensor::zeros(n);
  t.has_horizon = true;
  t.a = a;
  t.b = b;
  for (int i = 1; i < n; ++i)
    for (int c = 0; c < 3; ++c) t.comp(c)[i - 1] = v[dof_index(i, c)];
  return t;
}

RadialSymTensor lichnerowicz_apply(const RadialSymTensor& t) {
  const int n = t.n;
  const double h = 1.0 / n;
  auto at = [&](int node, int c) -> double {
    if (node == n) return 0.0;
    if (node == 0) {
      if (!t.has_horizon) return 0.0;
      return c == 2 ? t.b : t.a;
    }
    return t.comp(c)[node - 1];
  };
  RadialSymTensor out = RadialSymTensor::zeros(n);
  out.has_horizon = false;
  for (int i = 1; i < n; ++i) {
    const double p = i * h;
    const double q = 1.0 - p * p;
    const double wg = p / 2.0;
    const double c01 = 1.0 / p;
    const double c12 = 8.0 * p * p * p / (q * q);
    const double cQ = 8.0 * p / q;
    const double rho = 2.0 * p / (q * q * q * q);
    double D[3];
    for (int c = 0; c < 3; ++c) {
      const double up = (at(i + 1, c) - at(i - 1, c)) / (2.0 * h);
      const double upp = (at(i + 1, c) - 2.0 * at(i, c) + at(i - 1, c)) / (h * h);
      D[c] = -(wg * upp + 0.5 * up);
    }
    const double u0 = at(i, 0), u1 = at(i, 1), u2 = at(i, 2);
    const double S0 = D[0] + c01 * (u0 - u1) - 0.5 * cQ * (u1 - u2);
    const double S1 = D[1] - c01 * (u0 - u1) + c12 * (u1 - u2) - 0.5 * cQ * (u0 - u2);
    const double S2 = D[2] - 0.5 * c12 * (u1 - u2) - 0.25 * cQ * (2.0 * u2 - u0 - u1);
    out.u0[i - 1] = -S0 / rho;
    out.u1[i - 1] = -S1 / rho;
    out.u2[i - 1] = -S2 / rho;
  }
  return out;
}

double strong_residual(const RadialSymTensor& t, double lambda) {
  const int n = t.n;
  const auto m_rho = gridfn::node_masses(n, gridfn::F_rho);
  const RadialSymTensor DL = lichnerowicz_apply(t);
  double acc = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double R = DL.comp(c)[i] + lambda * t.comp(c)[i];
      acc += R * R * m_rho[i] * kMult[c];
    }
  }
  return std::sqrt(acc);
}

DecayFit decay_fits(const RadialSymTensor& t) {
  const int n = t.n;
  const double h = 1.0 / n;
  double num0 = 0.0, den0 = 0.0, num1 = 0.0, den1 = 0.0;
  for (int i = 1; i < n; ++i) {
    const double p = i * h;
    const double absh =
        std::sqrt(t.u0[i - 1] * t.u0[i - 1] + t.u1[i - 1] * t.u1[i - 1] +
                  2.0 * t.u2[i - 1] * t.u2[i - 1]);
    if (p <= 0.1) {
      num0 += absh * p;
      den0 += p * p;
    }
    if (p >= 0.9) {
      const double w = 1.0 - p * p;
      num1 += absh * w;
      den1 += w * w;
    }
  }
  return {num0 / den0, num1 / den1};
}

}  // namespace esflow::spectral
