#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sl3sph/group.hpp"
#include "sl3sph/sampling.hpp"

// Analysis of the phase function f(k) = B(H, Ad(k) H') on the rotation group:
// derivatives in the left-invariant frame, critical-point location and
// classification, tangency identities on centralizer orbits, and the
// substitution map that straightens the Iwasawa projection.
namespace sl3sph {

struct PhaseContext {
  CartanVector h;
  CartanVector hp;
  Mat3 hd;
  Mat3 hpd;
  std::array<Mat3, 3> br1;                  // [X_i, H'd]
  std::array<std::array<Mat3, 3>, 3> br2;   // br2[j][i] = [X_j, [X_i, H'd]]

  PhaseContext(const CartanVector& h_, const CartanVector& hp_)
      : h(h_), hp(hp_), hd(h_.diag()), hpd(hp_.diag()) {
    const auto& basis = k_basis();
    for (int i = 0; i < 3; ++i) br1[i] = commutator(basis[i], hpd);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) br2[j][i] = commutator(basis[j], br1[i]);
  }
};

inline double phase_value(const PhaseContext& ctx, const Rotation& k) {
  return killing_form(ctx.hd, adjoint(k, ctx.hpd));
}

// Left-invariant frame derivative: moving k along k exp(t X_i) differentiates
// the phase into the same pairing with [X_i, H'] in place of H'.
inline Vec3 phase_gradient(const PhaseContext& ctx, const Rotation& k) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) g.x[i] = killing_form(ctx.hd, adjoint(k, ctx.br1[i]));
  return g;
}

// Jacobian of the gradient in the same frame: J_ij = X_j X_i f. Symmetric
// exactly at critical points; the antisymmetric part is first-order data.
inline Mat3 phase_gradient_jacobian(const PhaseContext& ctx, const Rotation& k) {
  Mat3 jmat;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      jmat.m[i][j] = killing_form(ctx.hd, adjoint(k, ctx.br2[j][i]));
  return jmat;
}

inline double phase_scale(const PhaseContext& ctx) {
  return std::max(1.0, lie_norm(ctx.h) * lie_norm(ctx.hp));
}

// Second-derivative matrix in the left-invariant frame. Only tensorial at
// critical points, so non-critical inputs are rejected.
inline Mat3 phase_hessian(const PhaseContext& ctx, const Rotation& k,
                          double tol = 1e-6) {
  Vec3 g = phase_gradient(ctx, k);
  if (euclid_norm(g) > tol * phase_scale(ctx))
    throw std::domain_error("phase_hessian: k is not a critical point");
  Mat3 jmat = phase_gradient_jacobian(ctx, k);
  return 0.5 * (jmat + transpose(jmat));
}

// Finite-difference second-derivative matrix in the same frame, for checking
// the analytic Hessian: second central differences of the phase along pairs of
// left-invariant directions. Meaningful at critical points only.
inline Mat3 phase_hessian_fd(const PhaseContext& ctx, const Rotation& k,
                             double step = 1e-3) {
  const auto& basis = k_basis();
  auto at = [&](const Mat3& x) { return phase_value(ctx, k * exp_so3(x)); };
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double pp = at(step * (basis[i] + basis[j]));
      double pm = at(step * (basis[i] - basis[j]));
      double mp = at(step * (basis[j] - basis[i]));
      double mm = at(-step * (basis[i] + basis[j]));
      out.m[i][j] = (pp - pm - mp + mm) / (4.0 * step * step);
    }
  return 0.5 * (out + transpose(out));
}

// Predicted dimension of the critical manifold through the double coset tagged
// by s: 0 when both arguments are regular, 2 when both are singular on
// different walls after moving H by s^-1, and 1 in the remaining cases.
inline int predicted_critical_dimension(const CartanVector& h, const CartanVector& hp,
                                        const WeylElement& s, double tol = 1e-9) {
  if (lie_norm(h) < 1e-12 || lie_norm(hp) < 1e-12)
    throw std::invalid_argument("predicted_critical_dimension: arguments must be nonzero");
  bool sing_h = !singular_roots(h, tol).empty();
  bool sing_hp = !singular_roots(hp, tol).empty();
  if (!sing_h && !sing_hp) return 0;
  if (sing_h != sing_hp) return 1;
  CartanVector hs = weyl_act(s.inverse(), h);
  double cross = hs.h[0] * hp.h[1] - hs.h[1] * hp.h[0];
  bool parallel = std::abs(cross) <= tol * lie_norm(hs) * lie_norm(hp);
  return parallel ? 1 : 2;
}

namespace detail {

// Plane rotation exp(theta (E_ab - E_ba)), the centralizer circle of a wall.
inline Mat3 plane_rotation(const Root& a, double theta) {
  Mat3 r = Mat3::identity();
  double c = std::cos(theta), s = std::sin(theta);
  r.m[a.i][a.i] = c;
  r.m[a.i][a.j] = s;
  r.m[a.j][a.i] = -s;
  r.m[a.j][a.j] = c;
  return r;
}

// max over theta of tr(R_a(theta)^T Z) for the plane rotation above, returned
// with the maximizing angle: the trace is affine in (cos theta, sin theta).
inline std::pair<double, double> max_trace_over_circle(const Root& a, const Mat3& z) {
  int p = a.i, q = a.j, r = 3 - p - q;
  double base = z.m[r][r];
  double ac = z.m[p][p] + z.m[q][q];
  double as = z.m[p][q] - z.m[q][p];
  return {base + std::hypot(ac, as), std::atan2(as, ac)};
}

}  // namespace detail

struct CosetMatch {
  WeylElement weyl_tag;
  double distance = 0.0;  // geodesic angle from k to the tagged double coset
};

// Distance from k to each double coset K_H s K_{H'} (centralizer times Weyl
// representative times centralizer), minimized in closed form over both
// centralizer circles; returns the nearest tag.
inline CosetMatch classify_coset(const PhaseContext& ctx, const Rotation& k,
                                 double singular_tol = 1e-9) {
  auto sing_h = singular_roots(ctx.h, singular_tol);
  auto sing_hp = singular_roots(ctx.hp, singular_tol);
  if (sing_h.size() > 1 || sing_hp.size() > 1)
    throw std::invalid_argument("classify_coset: arguments must be nonzero with at most one wall");
  CosetMatch best;
  double best_trace = -4.0;
  const int theta_grid = sing_h.empty() ? 1 : 192;
  for (const WeylElement& s : weyl_elements()) {
    double s_trace = -4.0;
    for (const Rotation& m : m_elements()) {
      for (const Rotation& mp : m_elements()) {
        // angle(k, m Ra s Rb mp) is decreasing in tr((m Ra s.rep Rb mp)^T k).
        Mat3 d = transpose(m.r) * k.r * transpose(mp.r);
        auto trace_at = [&](double theta) {
          Mat3 z = transpose(detail::plane_rotation(sing_h.empty() ? Root(0, 1) : sing_h[0],
                                                    sing_h.empty() ? 0.0 : theta) *
                             s.rep) *
                   d;
          if (sing_hp.empty()) return trace(z);
          return detail::max_trace_over_circle(sing_hp[0], z).first;
        };
        if (sing_h.empty()) {
          s_trace = std::max(s_trace, trace_at(0.0));
        } else {
          // Coarse scan then golden-section refinement around the best angle.
          const double two_pi = 2.0 * std::acos(-1.0);
          double best_theta = 0.0, best_val = -4.0;
          for (int it = 0; it < theta_grid; ++it) {
            double th = two_pi * it / theta_grid;
            double v = trace_at(th);
            if (v > best_val) {
              best_val = v;
              best_theta = th;
            }
          }
          double lo = best_theta - two_pi / theta_grid;
          double hi = best_theta + two_pi / theta_grid;
          const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
          double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
          double f1 = trace_at(x1), f2 = trace_at(x2);
          for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
              lo = x1;
              x1 = x2;
              f1 = f2;
              x2 = lo + gr * (hi - lo);
              f2 = trace_at(x2);
            } else {
              hi = x2;
              x2 = x1;
              f2 = f1;
              x1 = hi - gr * (hi - lo);
              f1 = trace_at(x1);
            }
          }
          s_trace = std::max(s_trace, std::max(f1, f2));
        }
      }
    }
    if (s_trace > best_trace) {
      best_trace = s_trace;
      best.weyl_tag = s;
    }
  }
  double c = std::min(1.0, std::max(-1.0, 0.5 * (best_trace - 1.0)));
  best.distance = std::acos(c);
  return best;
}

struct CriticalPointRecord {
  Rotation k;
  double residual = 0.0;           // gradient norm at the located point
  WeylElement weyl_tag;
  double coset_distance = 0.0;
  int manifold_dim = 0;
  bool in_m_prime = false;
  double m_prime_distance = 0.0;
  Mat3 hessian;
  Vec3 hessian_eigenvalues;
};

struct CriticalPointConfig {
  std::size_t extra_seeds = 96;    // quasi-random seeds beyond the 24 signed permutations
  int max_iterations = 120;
  double residual_tol = 1e-10;
  double dedup_angle = 1e-4;
  double singular_tol = 1e-9;
  double m_prime_tol = 1e-6;
  double null_tol = 1e-7;          // Hessian eigenvalue cutoff for the dimension tag
  std::uint64_t seed_offset = 0;
};

struct CriticalPointSet {
  bool degenerate = false;         // H or H' vanishes: the phase is constant
  std::vector<CriticalPointRecord> points;
  std::size_t nonconverged_seeds = 0;
};

namespace detail {

// Damped Gauss-Newton on the gradient field with retraction k exp(sum d_i X_i);
// falls back to scaled gradient descent when no Newton decrease is found.
inline bool refine_critical_point(const PhaseContext& ctx, Rotation& k,
                                  const CriticalPointConfig& cfg) {
  const auto& basis = k_basis();
  auto retract = [&](const Rotation& base, const Vec3& d) {
    Mat3 x = d.x[0] * basis[0] + d.x[1] * basis[1] + d.x[2] * basis[2];
    return base * exp_so3(x);
  };
  Vec3 g = phase_gradient(ctx, k);
  double r = euclid_norm(g);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (r < cfg.residual_tol) return true;
    Mat3 jmat = phase_gradient_jacobian(ctx, k);
    Mat3 jtj = transpose(jmat) * jmat;
    Vec3 jtg;
    for (int i = 0; i < 3; ++i)
      jtg.x[i] = jmat.m[0][i] * g.x[0] + jmat.m[1][i] * g.x[1] + jmat.m[2][i] * g.x[2];
    Vec3 step = solve3_least_squares(jtj, -1.0 * jtg, 1e-12);
    bool accepted = false;
    double scale = 1.0;
    for (int bt = 0; bt < 24; ++bt) {
      Rotation trial = retract(k, scale * step);
      Vec3 gt = phase_gradient(ctx, trial);
      double rt = euclid_norm(gt);
      if (rt < r) {
        k = trial;
        g = gt;
        r = rt;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // Gradient descent rescue for nearly singular Jacobians.
      double eta = 1.0 / std::max(1.0, 4.0 * phase_scale(ctx));
      for (int bt = 0; bt < 24; ++bt) {
        Rotation trial = retract(k, -eta * g);
        Vec3 gt = phase_gradient(ctx, trial);
        double rt = euclid_norm(gt);
        if (rt < r) {
          k = trial;
          g = gt;
          r = rt;
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
    }
    if (!accepted) return r < cfg.residual_tol;
  }
  return euclid_norm(phase_gradient(ctx, k)) < cfg.residual_tol;
}

}  // namespace detail

// Locates the critical set from the 24 signed permutations plus quasi-random
// seeds, deduplicates by geodesic angle, and classifies every survivor.
// Non-convergent seeds are counted, never promoted to points.
inline CriticalPointSet find_critical_points(const PhaseContext& ctx,
                                             const CriticalPointConfig& cfg = {}) {
  CriticalPointSet out;
  if (lie_norm(ctx.h) < 1e-12 || lie_norm(ctx.hp) < 1e-12) {
    out.degenerate = true;
    return out;
  }
  std::vector<Rotation> seeds;
  for (const Rotation& m : m_prime_elements()) seeds.push_back(m);
  for (const Rotation& r : halton_rotations(cfg.extra_seeds, cfg.seed_offset))
    seeds.push_back(r);
  std::vector<Rotation> located;
  std::vector<double> residuals;
  for (const Rotation& seed : seeds) {
    Rotation k = seed;
    if (!detail::refine_critical_point(ctx, k, cfg)) {
      ++out.nonconverged_seeds;
      continue;
    }
    double r = euclid_norm(phase_gradient(ctx, k));
    bool duplicate = false;
    for (std::size_t i = 0; i < located.size(); ++i) {
      if (rotation_angle_between(located[i], k) < cfg.dedup_angle) {
        if (r < residuals[i]) {
          located[i] = k;
          residuals[i] = r;
        }
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      located.push_back(k);
      residuals.push_back(r);
    }
  }
  for (std::size_t i = 0; i < located.size(); ++i) {
    CriticalPointRecord rec;
    rec.k = located[i];
    rec.residual = residuals[i];
    double md = 10.0;
    for (const Rotation& m : m_prime_elements())
      md = std::min(md, rotation_angle_between(rec.k, m));
    rec.m_prime_distance = md;
    rec.in_m_prime = md <= cfg.m_prime_tol;
    CosetMatch match = classify_coset(ctx, rec.k, cfg.singular_tol);
    rec.weyl_tag = match.weyl_tag;
    rec.coset_distance = match.distance;
    rec.hessian = phase_hessian(ctx, rec.k, 1e-5);
    rec.hessian_eigenvalues = symmetric_eigen(rec.hessian).values;
    // Empirical dimension tag: null directions of the transverse-nondegenerate
    // Hessian are exactly the tangent space of the critical manifold.
    rec.manifold_dim = 0;
    for (int c = 0; c < 3; ++c)
      if (std::abs(rec.hessian_eigenvalues.x[c]) <= cfg.null_tol * phase_scale(ctx))
        ++rec.manifold_dim;
    out.points.push_back(rec);
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const CriticalPointRecord& a, const CriticalPointRecord& b) {
              return a.m_prime_distance < b.m_prime_distance;
            });
  return out;
}

// Eigenvalues the frame Hessian must take at a signed permutation k0 whose
// class is s: {-(s a_i)(H) * a_i(H')} in positive-root order.
inline Vec3 predicted_m_prime_eigenvalues(const CartanVector& h, const CartanVector& hp,
                                          const WeylElement& s) {
  CartanVector hs = weyl_act(s.inverse(), h);
  Vec3 out;
  auto roots = positive_roots();
  for (int i = 0; i < 3; ++i) out.x[i] = -root_eval(roots[i], hs) * root_eval(roots[i], hp);
  return out;
}

struct OrthogonalityReport {
  Root wall{0, 1};                    // the unique vanishing positive root of H
  double max_orthogonal_abs = 0.0;    // pairing against the two off-wall directions
  double min_generic_inplane = 0.0;   // pairing against the wall direction, generic k
};

// Tangency identity on the centralizer of a subregular H: moving the two
// off-wall symmetric directions by any centralizer rotation keeps them
// B-orthogonal to the Cartan subalgebra, while the in-wall direction pairs
// nontrivially away from the signed permutations.
inline OrthogonalityReport lemma42_check(const CartanVector& h, int theta_samples = 64,
                                         double singular_tol = 1e-9) {
  auto sing = singular_roots(h, singular_tol);
  if (lie_norm(h) < 1e-12 || sing.size() != 1)
    throw std::invalid_argument("lemma42_check: H must be nonzero with exactly one wall");
  OrthogonalityReport rep;
  rep.wall = sing[0];
  auto roots = positive_roots();
  const auto& qb = q_basis();
  std::vector<Mat3> off_wall;
  Mat3 in_wall;
  for (int i = 0; i < 3; ++i) {
    if (roots[i] == rep.wall)
      in_wall = qb[i];
    else
      off_wall.push_back(qb[i]);
  }
  auto basis_a = cartan_basis();
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int it = 0; it < theta_samples; ++it) {
    Mat3 circ = detail::plane_rotation(rep.wall, two_pi * it / theta_samples);
    for (const Rotation& m : m_elements()) {
      Rotation k = Rotation::unchecked(m.r * circ);
      for (const Mat3& x : off_wall)
        for (const CartanVector& h1 : basis_a)
          rep.max_orthogonal_abs = std::max(
              rep.max_orthogonal_abs, std::abs(killing_form(h1.diag(), adjoint(k, x))));
    }
  }
  rep.min_generic_inplane = 1e300;
  for (double theta : {0.37, 1.12, 2.29, 3.95}) {
    Rotation k = Rotation::unchecked(detail::plane_rotation(rep.wall, theta));
    double best = 0.0;
    for (const CartanVector& h1 : basis_a)
      best = std::max(best, std::abs(killing_form(h1.diag(), adjoint(k, in_wall))));
    rep.min_generic_inplane = std::min(rep.min_generic_inplane, best);
  }
  return rep;
}

struct CircleZeroReport {
  Root wall{0, 1};
  int zero_count = 0;
  int predicted_count = 4;           // signed permutations on the centralizer circle
  double max_zero_deviation = 0.0;   // angle distance of zeros to multiples of pi/2
  double max_m_prime_angle = 0.0;    // geodesic distance of zero rotations to M'
};

// Zero set of theta -> B(coroot, Ad(exp(theta X_wall)) P_wall) over one period:
// the zeros must be exactly the four signed permutations on the circle.
inline CircleZeroReport lemma45_check(const CartanVector& h, int grid = 512,
                                      double singular_tol = 1e-9) {
  auto sing = singular_roots(h, singular_tol);
  if (lie_norm(h) < 1e-12 || sing.size() != 1)
    throw std::invalid_argument("lemma45_check: H must be nonzero with exactly one wall");
  CircleZeroReport rep;
  rep.wall = sing[0];
  auto roots = positive_roots();
  Mat3 p_wall;
  for (int i = 0; i < 3; ++i)
    if (roots[i] == rep.wall) p_wall = q_basis()[i];
  Mat3 dual = coroot(rep.wall).diag();
  auto z = [&](double theta) {
    Rotation k = Rotation::unchecked(detail::plane_rotation(rep.wall, theta));
    return killing_form(dual, adjoint(k, p_wall));
  };
  const double two_pi = 2.0 * std::acos(-1.0);
  const double pi_half = 0.25 * two_pi;
  double scale = lie_norm(coroot(rep.wall));
  std::vector<double> zeros;
  auto push_zero = [&](double theta) {
    double t = std::fmod(theta + two_pi, two_pi);
    for (double zt : zeros)
      if (std::abs(zt - t) < 1e-6 || std::abs(std::abs(zt - t) - two_pi) < 1e-6) return;
    zeros.push_back(t);
  };
  for (int i = 0; i < grid; ++i) {
    double t0 = two_pi * i / grid, t1 = two_pi * (i + 1) / grid;
    double z0 = z(t0), z1 = z(t1);
    if (std::abs(z0) <= 1e-13 * scale) {
      push_zero(t0);
      continue;
    }
    if (z0 * z1 < 0.0) {
      double lo = t0, hi = t1;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double zm = z(mid);
        if (zm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (z0 * zm < 0.0)
          hi = mid;
        else
          lo = mid;
      }
      push_zero(0.5 * (lo + hi));
    }
  }
  rep.zero_count = static_cast<int>(zeros.size());
  for (double t : zeros) {
    double nearest = std::round(t / pi_half) * pi_half;
    rep.max_zero_deviation = std::max(rep.max_zero_deviation, std::abs(t - nearest));
    Rotation k = Rotation::unchecked(detail::plane_rotation(rep.wall, t));
    double md = 10.0;
    for (const Rotation& m : m_prime_elements())
      md = std::min(md, rotation_angle_between(k, m));
    rep.max_m_prime_angle = std::max(rep.max_m_prime_angle, md);
  }
  return rep;
}

// Diagonal part of a symmetric traceless matrix (the B-orthogonal projection
// of the symmetric summand onto the Cartan subalgebra).
inline CartanVector pr_p_a(const Mat3& y) {
  double scale = std::max(1.0, max_abs_entry(y));
  if (max_abs_entry(y - transpose(y)) > 1e-12 * scale)
    throw std::invalid_argument("pr_p_a: input must be symmetric");
  if (std::abs(trace(y)) > 1e-12 * scale)
    throw std::invalid_argument("pr_p_a: input must be traceless");
  return CartanVector::project(y.m[0][0], y.m[1][1], y.m[2][2]);
}

struct DuistermaatSolution {
  Rotation psi;
  double residual = 0.0;
  bool converged = false;
  double last_good_scale = 0.0;  // largest homotopy scale solved to tolerance
  double max_step_angle = 0.0;   // largest rotation between consecutive stages
};

namespace detail {

inline CartanVector substitution_residual(const Mat3& y, const Rotation& psi) {
  Mat3 w = adjoint(inverse(psi), y);
  GroupElement g(exp_symmetric(w));
  return iwasawa_projection(g) - pr_p_a(y);
}

}  // namespace detail

// Solves for a rotation psi with H(exp(Ad(psi^-1) Y)) = diagonal part of Y,
// following the homotopy s Y from s = 0 (where the identity solves exactly)
// to s = 1 with minimum-norm Gauss-Newton steps; this pins the branch through
// the identity. Continuation failures report the last scale that converged.
inline DuistermaatSolution duistermaat_solve(const Mat3& y, double tol = 1e-10) {
  double scale = std::max(1.0, max_abs_entry(y));
  if (max_abs_entry(y - transpose(y)) > 1e-12 * scale ||
      std::abs(trace(y)) > 1e-12 * scale)
    throw std::invalid_argument("duistermaat_solve: input must be symmetric traceless");
  DuistermaatSolution sol;
  const auto& basis = k_basis();
  const int stages = 8;
  for (int stage = 1; stage <= stages; ++stage) {
    double s = static_cast<double>(stage) / stages;
    Mat3 ys = s * y;
    Rotation stage_start = sol.psi;
    bool stage_ok = false;
    for (int it = 0; it < 60; ++it) {
      CartanVector r = detail::substitution_residual(ys, sol.psi);
      double rn = lie_norm(r);
      if (rn < tol) {
        stage_ok = true;
        break;
      }
      const double fd = 1e-6;
      Mat3 jmat;
      for (int c = 0; c < 3; ++c) {
        Rotation plus = sol.psi * exp_so3(fd * basis[c]);
        Rotation minus = sol.psi * exp_so3(-fd * basis[c]);
        CartanVector dp = detail::substitution_residual(ys, plus);
        CartanVector dm = detail::substitution_residual(ys, minus);
        for (int rr = 0; rr < 3; ++rr)
          jmat.m[rr][c] = (dp.h[rr] - dm.h[rr]) / (2.0 * fd);
      }
      Mat3 jtj = transpose(jmat) * jmat;
      Vec3 jtr;
      for (int c = 0; c < 3; ++c)
        jtr.x[c] = jmat.m[0][c] * r.h[0] + jmat.m[1][c] * r.h[1] + jmat.m[2][c] * r.h[2];
      Vec3 step = solve3_least_squares(jtj, -1.0 * jtr, 1e-12);
      double damp = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt) {
        Mat3 x = damp * (step.x[0] * basis[0] + step.x[1] * basis[1] + step.x[2] * basis[2]);
        Rotation trial = sol.psi * exp_so3(x);
        double rt = lie_norm(detail::substitution_residual(ys, trial));
        if (rt < rn) {
          sol.psi = trial;
          moved = true;
          break;
        }
        damp *= 0.5;
      }
      if (!moved) break;
    }
    if (!stage_ok) {
      sol.residual = lie_norm(detail::substitution_residual(y, sol.psi));
      sol.converged = false;
      return sol;
    }
    sol.last_good_scale = s;
    sol.max_step_angle =
        std::max(sol.max_step_angle, rotation_angle_between(stage_start, sol.psi));
  }
  sol.residual = lie_norm(detail::substitution_residual(y, sol.psi));
  sol.converged = sol.residual < tol;
  return sol;
}

struct PushforwardReport {
  double max_abs_error = 0.0;   // against the phase function
  double max_residual = 0.0;    // worst substitution-map residual encountered
  std::size_t samples = 0;
};

// Checks that composing exp(H) with k Psi(Ad(k^-1) H) pushes the spectral
// pairing of the Iwasawa projection onto the phase function with H' the dual
// of lambda. Solver failures propagate as exceptions.
inline PushforwardReport pushforward_identity_check(const CartanVector& h,
                                                    const SpectralParam& lam,
                                                    std::size_t k_samples,
                                                    std::uint64_t seed,
                                                    double solver_tol = 1e-10) {
  PushforwardReport rep;
  CartanVector hp = dual_covector(lam);
  PhaseContext ctx(h, hp);
  GaussianSampler sampler(seed);
  for (std::size_t n = 0; n < k_samples; ++n) {
    Rotation k = sampler.rotation();
    Mat3 y = adjoint(inverse(k), h.diag());
    DuistermaatSolution sol = duistermaat_solve(y, solver_tol);
    if (!sol.converged)
      throw std::runtime_error("pushforward_identity_check: substitution solver failed");
    rep.max_residual = std::max(rep.max_residual, sol.residual);
    CartanVector x = iwasawa_projection(cartan_exp_times(h, k * sol.psi));
    double lhs = lam.eval(x).real();
    double rhs = phase_value(ctx, k);
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(lhs - rhs));
    ++rep.samples;
  }
  return rep;
}

}  // namespace sl3sph
