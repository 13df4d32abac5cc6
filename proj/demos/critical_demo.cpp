// Critical structure of the pairing phase B(H, Ad(k) H'): for regular
// arguments the critical set is the 24 signed permutations; put H on a wall
// and the set grows into one-dimensional families whose Hessians pick up a
// null direction.

#include <cstdio>

#include "sl3sph/sl3sph.hpp"

namespace {

void report(const char* label, const sl3sph::CartanVector& h,
            const sl3sph::CartanVector& hp) {
  using namespace sl3sph;
  CriticalPointSet set = find_critical_points(PhaseContext(h, hp));
  int by_dim[3] = {0, 0, 0};
  double worst_residual = 0.0;
  for (const CriticalPointRecord& rec : set.points) {
    ++by_dim[rec.manifold_dim];
    if (rec.residual > worst_residual) worst_residual = rec.residual;
  }
  std::printf("%s: %zu located points (dim 0/1/2: %d/%d/%d), worst gradient %.2e\n",
              label, set.points.size(), by_dim[0], by_dim[1], by_dim[2],
              worst_residual);
  for (const CriticalPointRecord& rec : set.points) {
    if (!rec.in_m_prime) continue;
    std::printf("  signed permutation, class %d%d%d, eigenvalues % .4f % .4f % .4f\n",
                rec.weyl_tag.sigma[0], rec.weyl_tag.sigma[1], rec.weyl_tag.sigma[2],
                rec.hessian_eigenvalues.x[0], rec.hessian_eigenvalues.x[1],
                rec.hessian_eigenvalues.x[2]);
  }
}

}  // namespace

int main() {
  using namespace sl3sph;
  CartanVector regular = CartanVector::project(0.8, 0.1, -0.9);
  CartanVector other = CartanVector::project(0.6, -0.1, -0.5);
  CartanVector wall = CartanVector::project(0.5, 0.5, -1.0);

  report("regular x regular", regular, other);
  report("wall x regular   ", wall, other);
  return 0;
}
