// Headline comparison at a singular group argument: along a wall-parallel
// spectral ray the classical per-root bound loses its decay rate while the
// uniform bound keeps tracking the measured spherical function. Prints a
// table and optionally writes an SVG (pass a path as the only argument).

#include <cstdio>

#include "sl3sph/sl3sph.hpp"

int main(int argc, char** argv) {
  using namespace sl3sph;

  CartanVector wall_dir = CartanVector::project(1.0, 1.0, -2.0);
  wall_dir = (1.0 / lie_norm(wall_dir)) * wall_dir;

  ScanConfig sc;
  sc.h_points = {0.8 * wall_dir, CartanVector()};
  sc.lam_directions = {wall_dir};
  for (int t = 1; t <= 20; t += 2) sc.t_values.push_back(t);
  sc.n_beta = 64;
  sc.n_ag = 96;

  BoundReport rep = bound_scan(sc);

  std::printf("%6s  %12s  %12s  %12s  %9s\n", "t", "|phi|", "uniform", "classical",
              "gate");
  for (const ScanRow& row : rep.rows) {
    if (row.h_index != 0) continue;
    std::printf("%6.1f  %12.5e  %12.5e  %12.5e  %9s\n", row.t, std::abs(row.phi),
                row.bound_new, row.bound_old, row.converged ? "ok" : "FAILED");
  }
  for (const RayFit& fit : rep.fits)
    if (fit.h_index == 0)
      std::printf("\nfitted log-log slopes (t >= 10): |phi| %.3f, uniform %.3f, "
                  "classical %.3f\n",
                  fit.slope_phi, fit.slope_new, fit.slope_old);
  std::printf("empirical constant over the scan: %.6f\n", rep.empirical_constant);

  if (argc > 1) {
    emit_plot(rep, argv[1]);
    std::printf("wrote %s\n", argv[1]);
  }
  return rep.unconverged_count == 0 ? 0 : 1;
}
