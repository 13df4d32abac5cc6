#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sl3sph/phase.hpp"
#include "sl3sph/sampling.hpp"

using namespace sl3sph;
using Catch::Approx;

namespace {

const CartanVector kRegH(0.8, 0.1, -0.9);
const CartanVector kRegHp(0.6, -0.1, -0.5);

Rotation step_along(const Rotation& k, int axis, double t) {
  return k * exp_so3(t * k_basis()[axis]);
}

// Series exponential with scaling and squaring, independent of the
// eigen-decomposition route used by the library.
Mat3 series_exp(const Mat3& a) {
  Mat3 x = std::ldexp(1.0, -20) * a;
  Mat3 sum = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int n = 1; n <= 12; ++n) {
    term = (1.0 / n) * (term * x);
    sum = sum + term;
  }
  for (int s = 0; s < 20; ++s) sum = sum * sum;
  return sum;
}

}  // namespace

TEST_CASE("phase gradient matches finite differences") {
  PhaseContext ctx(kRegH, kRegHp);
  GaussianSampler sampler(41);
  const double t = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Rotation k = sampler.rotation();
    Vec3 g = phase_gradient(ctx, k);
    for (int i = 0; i < 3; ++i) {
      double fd = (phase_value(ctx, step_along(k, i, t)) -
                   phase_value(ctx, step_along(k, i, -t))) /
                  (2.0 * t);
      REQUIRE(g[i] == Approx(fd).margin(1e-8));
    }
  }
}

TEST_CASE("gradient jacobian matches finite differences") {
  PhaseContext ctx(kRegH, kRegHp);
  GaussianSampler sampler(42);
  const double t = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    Rotation k = sampler.rotation();
    Mat3 jmat = phase_gradient_jacobian(ctx, k);
    for (int j = 0; j < 3; ++j) {
      Vec3 gp = phase_gradient(ctx, step_along(k, j, t));
      Vec3 gm = phase_gradient(ctx, step_along(k, j, -t));
      for (int i = 0; i < 3; ++i)
        REQUIRE(jmat.m[i][j] == Approx((gp[i] - gm[i]) / (2.0 * t)).margin(1e-8));
    }
  }
}

TEST_CASE("phase value at signed permutations is a permuted pairing") {
  PhaseContext ctx(kRegH, kRegHp);
  for (const WeylElement& s : weyl_elements()) {
    double want = killing_form(weyl_act(s.inverse(), kRegH), kRegHp);
    REQUIRE(phase_value(ctx, Rotation::unchecked(s.rep)) ==
            Approx(want).margin(1e-13));
  }
}

TEST_CASE("phase is invariant under sign matrices on both sides") {
  PhaseContext ctx(kRegH, kRegHp);
  GaussianSampler sampler(43);
  for (int trial = 0; trial < 5; ++trial) {
    Rotation k = sampler.rotation();
    double base = phase_value(ctx, k);
    for (const Rotation& m : m_elements())
      for (const Rotation& m2 : m_elements()) {
        Rotation moved = Rotation::unchecked(m.r * k.r * m2.r);
        REQUIRE(phase_value(ctx, moved) == Approx(base).margin(1e-13));
      }
  }
}

TEST_CASE("hessian forms agree at critical points and reject others") {
  PhaseContext ctx(kRegH, kRegHp);
  for (const Rotation& mp : m_prime_elements()) {
    Mat3 analytic = phase_hessian(ctx, mp);
    REQUIRE(max_abs_entry(analytic - transpose(analytic)) < 1e-14);
    Mat3 fd = phase_hessian_fd(ctx, mp);
    REQUIRE(max_abs_entry(analytic - fd) < 1e-5);
  }
  GaussianSampler sampler(44);
  Rotation generic = sampler.rotation();
  REQUIRE_THROWS_AS(phase_hessian(ctx, generic), std::domain_error);
  // The finite-difference form stays defined and symmetric off the critical set.
  Mat3 fd = phase_hessian_fd(ctx, generic);
  REQUIRE(max_abs_entry(fd - transpose(fd)) < 1e-14);
}

TEST_CASE("predicted spectrum at signed permutations") {
  PhaseContext ctx(kRegH, kRegHp);
  for (const WeylElement& s : weyl_elements())
    for (const Rotation& m : m_elements()) {
      Rotation rep = Rotation::unchecked(s.rep * m.r);
      Vec3 want = predicted_m_prime_eigenvalues(kRegH, kRegHp, s);
      std::sort(want.x, want.x + 3);
      Vec3 got = symmetric_eigen(phase_hessian(ctx, rep)).values;
      for (int i = 0; i < 3; ++i) REQUIRE(got[i] == Approx(want[i]).margin(1e-10));
    }
}

TEST_CASE("critical dimension prediction by case") {
  CartanVector wall12(1.0, 1.0, -2.0);
  CartanVector wall13(1.0, -2.0, 1.0);
  const auto& ws = weyl_elements();

  for (const WeylElement& s : ws) {
    REQUIRE(predicted_critical_dimension(kRegH, kRegHp, s) == 0);
    REQUIRE(predicted_critical_dimension(wall12, kRegHp, s) == 1);
    REQUIRE(predicted_critical_dimension(kRegH, wall12, s) == 1);
  }
  // Both on walls: parallel images give 1, transverse images give 2.
  REQUIRE(predicted_critical_dimension(wall12, wall12, ws[0]) == 1);
  WeylElement rev = WeylElement::from_permutation({2, 1, 0});
  REQUIRE(predicted_critical_dimension(wall12, wall12, rev) == 2);
  REQUIRE(predicted_critical_dimension(wall13, wall12, ws[0]) == 2);

  REQUIRE_THROWS_AS(predicted_critical_dimension(CartanVector(), kRegHp, ws[0]),
                    std::invalid_argument);
}

TEST_CASE("coset classification tags signed permutations and neighbors") {
  PhaseContext ctx(kRegH, kRegHp);
  for (const WeylElement& s : weyl_elements()) {
    CosetMatch match = classify_coset(ctx, Rotation::unchecked(s.rep));
    REQUIRE(match.weyl_tag == s);
    REQUIRE(match.distance < 1e-6);

    Rotation nearby = Rotation::unchecked(s.rep) * exp_so3(0.05 * k_basis()[1]);
    CosetMatch moved = classify_coset(ctx, nearby);
    REQUIRE(moved.weyl_tag == s);
    REQUIRE(moved.distance > 1e-3);
    REQUIRE(moved.distance < 0.1);
  }
  PhaseContext degenerate(CartanVector(), kRegHp);
  REQUIRE_THROWS_AS(classify_coset(degenerate, Rotation()), std::invalid_argument);
}

TEST_CASE("critical point search on a regular pair") {
  PhaseContext ctx(kRegH, kRegHp);
  CriticalPointConfig cfg;
  cfg.extra_seeds = 48;
  CriticalPointSet set = find_critical_points(ctx, cfg);
  REQUIRE_FALSE(set.degenerate);
  REQUIRE(set.points.size() == 24);
  REQUIRE(set.nonconverged_seeds == 0);
  for (const CriticalPointRecord& rec : set.points) {
    REQUIRE(rec.residual < 1e-9);
    REQUIRE(rec.in_m_prime);
    REQUIRE(rec.m_prime_distance < 1e-6);
    REQUIRE(rec.manifold_dim == 0);
    REQUIRE(rec.coset_distance < 1e-6);
  }
  // Records arrive sorted by distance to the signed permutations.
  for (std::size_t i = 1; i < set.points.size(); ++i)
    REQUIRE(set.points[i - 1].m_prime_distance <= set.points[i].m_prime_distance);

  CriticalPointSet degenerate = find_critical_points(PhaseContext(CartanVector(), kRegHp), cfg);
  REQUIRE(degenerate.degenerate);
  REQUIRE(degenerate.points.empty());
}

TEST_CASE("critical families appear on a wall configuration") {
  CartanVector wall = (0.7 / lie_norm(CartanVector(1.0, 1.0, -2.0))) *
                      CartanVector(1.0, 1.0, -2.0);
  PhaseContext ctx(wall, kRegHp);
  CriticalPointConfig cfg;
  cfg.extra_seeds = 48;
  CriticalPointSet set = find_critical_points(ctx, cfg);
  REQUIRE_FALSE(set.degenerate);
  std::size_t flat = 0;
  for (const CriticalPointRecord& rec : set.points) {
    REQUIRE(rec.residual < 1e-9);
    REQUIRE(rec.manifold_dim ==
            predicted_critical_dimension(wall, kRegHp, rec.weyl_tag));
    if (rec.manifold_dim >= 1) ++flat;
  }
  REQUIRE(flat > 0);
}

TEST_CASE("orthogonality identities on a wall") {
  CartanVector wall = 0.8 * CartanVector(1.0, 1.0, -2.0);
  OrthogonalityReport rep = lemma42_check(wall);
  REQUIRE(rep.wall == Root(0, 1));
  REQUIRE(rep.max_orthogonal_abs < 1e-12);
  REQUIRE(rep.min_generic_inplane > 1e-3);
  REQUIRE_THROWS_AS(lemma42_check(kRegH), std::invalid_argument);
  REQUIRE_THROWS_AS(lemma42_check(CartanVector()), std::invalid_argument);
}

TEST_CASE("circle zeros sit at the signed permutations") {
  CartanVector wall = 0.9 * CartanVector(1.0, -2.0, 1.0);
  CircleZeroReport rep = lemma45_check(wall);
  REQUIRE(rep.wall == Root(0, 2));
  REQUIRE(rep.zero_count == rep.predicted_count);
  REQUIRE(rep.zero_count == 4);
  REQUIRE(rep.max_zero_deviation < 1e-8);
  REQUIRE(rep.max_m_prime_angle < 1e-6);
  REQUIRE_THROWS_AS(lemma45_check(kRegH), std::invalid_argument);
}

TEST_CASE("diagonal projection of symmetric matrices") {
  GaussianSampler sampler(45);
  Mat3 y = sampler.symmetric_traceless(1.0);
  CartanVector d = pr_p_a(y);
  for (int i = 0; i < 3; ++i) REQUIRE(d[i] == Approx(y.m[i][i]).margin(1e-14));
  REQUIRE_THROWS_AS(pr_p_a(Mat3::unit(0, 1)), std::invalid_argument);
  REQUIRE_THROWS_AS(pr_p_a(Mat3::identity()), std::invalid_argument);
}

TEST_CASE("substitution solver fixes diagonal input at the identity") {
  CartanVector h(0.9, -0.2, -0.7);
  DuistermaatSolution sol = duistermaat_solve(h.diag());
  REQUIRE(sol.converged);
  REQUIRE(sol.residual < 1e-10);
  REQUIRE(rotation_angle_between(sol.psi, Rotation()) < 1e-8);
  REQUIRE(sol.max_step_angle < 1e-8);
}

TEST_CASE("substitution solver satisfies its defining identity") {
  GaussianSampler sampler(46);
  for (int trial = 0; trial < 10; ++trial) {
    Mat3 y = sampler.symmetric_traceless(1.5);
    DuistermaatSolution sol = duistermaat_solve(y, 1e-11);
    REQUIRE(sol.converged);
    REQUIRE(sol.residual < 1e-10);
    REQUIRE(sol.last_good_scale == 1.0);
    REQUIRE(sol.max_step_angle < 1.0);
    // Recompute the defining identity through an independent exponential,
    // renormalizing the determinant drift of the squaring steps.
    Mat3 w = adjoint(inverse(sol.psi), y);
    CartanVector target = pr_p_a(y);
    Mat3 e = series_exp(w);
    e = (1.0 / std::cbrt(det(e))) * e;
    CartanVector got = iwasawa_projection(GroupElement(e));
    for (int i = 0; i < 3; ++i) REQUIRE(got[i] == Approx(target[i]).margin(1e-9));
  }
  REQUIRE_THROWS_AS(duistermaat_solve(Mat3::unit(0, 1)), std::invalid_argument);
}

TEST_CASE("pushforward identity on samples") {
  CartanVector h(0.5, 0.2, -0.7);
  SpectralParam lam = SpectralParam::from_dual(
      1.3 * CartanVector(1.0, 0.0, -1.0));
  PushforwardReport rep = pushforward_identity_check(h, lam, 10, 5);
  REQUIRE(rep.samples == 10);
  REQUIRE(rep.max_residual < 1e-10);
  REQUIRE(rep.max_abs_error < 1e-8);

  PushforwardReport zero = pushforward_identity_check(CartanVector(), lam, 4, 6);
  REQUIRE(zero.max_abs_error < 1e-12);
}
