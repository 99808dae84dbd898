#pragma once
#include <string>
#include <vector>

#include "esflow/flow.hpp"

// recovery of the radial diffeomorphism that undoes the de Turck gauge:
// the gauge field c(s, delta) is integrated along characteristics in delta
// starting from the identity at delta = 0, and the pulled-back metrics are
// checked against the ungauged evolution equation on an analysis grid
namespace esflow::deturck {

struct Report {
  int steps = 0;
  int snapshots = 0;
  double dt = 0.0;
  bool blown = false;
  bool crossing = false;
  bool monotone = false;
  double max_abs_shift = 0.0;  // max |X - r| over the final map
  double ricci_residual = 0.0;
  double rdt_self_residual = 0.0;
  double ratio = 0.0;  // ricci_residual / rdt_self_residual

  std::vector<double> r_grid;             // analysis radii
  std::vector<double> snap_t;             // snapshot times
  std::vector<double> deltas;             // amplitudes at snapshots
  std::vector<std::vector<double>> maps;  // maps[k] pairs with snapshot k;
                                          // maps[0] is the identity at delta 0
};

Report recover(const flow::Mode& mode, int m, double s_max, double eps,
               const std::string& background, double delta_stop = 0.0625);

}  // namespace esflow::deturck
