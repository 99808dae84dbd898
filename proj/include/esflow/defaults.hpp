#pragma once
#include <cstdint>

// Single home for every default and tolerance; commands override via config,
// nothing below is duplicated at call sites.
namespace esflow::defaults {

// geometry verification
inline constexpr int    parity_samples = 50;
inline constexpr double parity_r_min = 1.05;
inline constexpr double parity_r_max = 50.0;
inline constexpr std::uint64_t parity_seed = 0x47454F4Dull;
inline constexpr double parity_rel_tol = 1e-6;
inline constexpr double ricci_flat_tol = 1e-9;
inline constexpr double sectional_ratio_tol = 1e-12;
inline constexpr double fd_metric_step = 1e-5;   // first-derivative oracle
inline constexpr double fd_gamma_step_scale = 1e-2;  // curvature oracle, scaled by min(r-1,1)

// quadrature
inline constexpr double quad_rel_tol = 1e-12;
inline constexpr double grid_weight_tol = 1e-13;
inline constexpr int    quad_max_depth = 24;
inline constexpr double window_exactness_tol = 1e-10;

// functional
inline constexpr int    certificate_n = 1000;
inline constexpr int    hardy_grid_n = 2048;
inline constexpr int    hardy_count = 100;
inline constexpr std::uint64_t hardy_seed = 0x48415244ull;
inline constexpr double hardy_margin_tol = 1e-8;   // lhs >= rhs - tol*(1+lhs)
inline constexpr double bump_support_max = 0.92;
inline constexpr double certificate_group_a = -0.7;    // J2+J4+J7 bound
inline constexpr double certificate_group_b = 0.5695;  // J3+J5+J8 bound
inline constexpr double certificate_total_max = -0.1;

// spectral
inline constexpr int    eigen_grid_n = 4096;
inline constexpr double eigen_shift = -2.1;
inline constexpr double eigen_tol = 1e-13;         // |d lambda| per iteration
inline constexpr int    eigen_max_iter = 200;
inline constexpr double eigen_residual_tol = 1e-4;
inline constexpr double eigen_lambda_lo = -2.0;
inline constexpr double eigen_lambda_hi = 0.0;

// flow
inline constexpr int    flow_grid_n = 2048;        // s-cells; nodes 0..n
inline constexpr double flow_s_max = 50.0;
inline constexpr double flow_epsilon = 1e-3;
inline constexpr double flow_dt_max = 1e-3;
inline constexpr double flow_cfl = 0.25;
inline constexpr double flow_pos_lo = 0.5;         // frame-ratio positivity window
inline constexpr double flow_pos_hi = 2.0;
inline constexpr double flow_iota = 0.1;           // epsilon cap (warning above)
inline constexpr double linear_eps_max = 0.01;     // slope check applies below this
inline constexpr double slope_rel_tol = 0.05;      // slope CI half-width, relative
inline constexpr int    flow_eigen_n = 4096;       // mode resolution feeding the flow
inline constexpr double drift_tol = 1e-8;          // eps=0 drift per unit time
inline constexpr double farfield_tol = 1e-3;

// ancient limit / de Turck
inline constexpr int    ancient_grid_n = 1024;
inline constexpr int    ancient_pow_min = 4;       // epsilons 2^-pow_min .. 2^-pow_max
inline constexpr int    ancient_pow_max = 8;
inline constexpr double cone_bound_M = 0.02;
inline constexpr int    deturck_grid_n = 1024;
inline constexpr int    deturck_eps_pow = 6;       // standalone recovery run eps = 2^-6
inline constexpr double deturck_snap_interval = 0.02;
inline constexpr double deturck_ratio_max = 10.0;
inline constexpr int    deturck_analysis_pts = 600;
inline constexpr double deturck_r_lo = 1.5;
inline constexpr double deturck_r_hi = 40.0;
inline constexpr int    deturck_presteps = 40;     // characteristic substeps on [0, delta_0]

}  // namespace esflow::defaults
