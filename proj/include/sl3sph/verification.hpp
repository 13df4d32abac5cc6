#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sl3sph/phase.hpp"
#include "sl3sph/spherical.hpp"
#include "sl3sph/vdc.hpp"

// End-to-end verification suite: ten checks covering normalization, Weyl
// symmetry, uniformity of the decay bound, the improvement at singular points,
// the critical-point inventory, the Hessian normal form, the model oscillatory
// integral, the substitution map, the orthogonality identities, and the
// quadrature trust gate. Every spherical value used anywhere in the suite goes
// through the refinement gate; a gate failure fails its check and stops the
// run instead of weakening it.
namespace sl3sph {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  bool gate_failed = false;
  std::string detail;
};

struct VerificationConfig {
  int n_beta = 48;        // base rule for pointwise values
  int n_ag = 64;
  int scan_n_beta = 96;   // base rule for the decay scans
  int scan_n_ag = 160;
  double gate_tol = kGateTol;
  std::uint64_t seed = 947251u;
};

namespace detail {

inline std::string strprintf(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return std::string(buf);
}

inline CartanVector unit_cartan(double a, double b, double c) {
  CartanVector v = CartanVector::project(a, b, c);
  return (1.0 / lie_norm(v)) * v;
}

}  // namespace detail

class VerificationSuite {
 public:
  explicit VerificationSuite(const VerificationConfig& cfg = {}) : cfg_(cfg) {}

  static constexpr int kCriteria = 10;

  CriterionResult run_criterion(int index) {
    switch (index) {
      case 1: return normalization();
      case 2: return weyl_symmetry();
      case 3: return bound_uniformity();
      case 4: return wall_improvement();
      case 5: return critical_inventory();
      case 6: return hessian_normal_form();
      case 7: return model_integral_decay();
      case 8: return substitution_map();
      case 9: return orthogonality_identities();
      case 10: return quadrature_trust();
      default: throw std::invalid_argument("run_criterion: index must be 1..10");
    }
  }

  // Runs the checks in order, reporting each as it finishes; a gate failure
  // stops the run after the failing check.
  std::vector<CriterionResult> run_all(
      const std::function<void(const CriterionResult&)>& on_result = {}) {
    std::vector<CriterionResult> out;
    for (int i = 1; i <= kCriteria; ++i) {
      CriterionResult res = run_criterion(i);
      out.push_back(res);
      if (on_result) on_result(res);
      if (res.gate_failed) break;
    }
    return out;
  }

  // Spherical values evaluated: one entry per gated value across the suite.
  std::size_t gate_values() const { return gate_values_; }
  std::size_t gate_failures() const { return gate_failures_; }
  double gate_worst_delta() const { return gate_worst_; }

 private:
  VerificationConfig cfg_;
  std::size_t gate_values_ = 0;
  std::size_t gate_failures_ = 0;
  double gate_worst_ = 0.0;
  std::optional<BoundReport> scan_;

  void absorb(const std::vector<GatedValue>& vals) {
    for (const GatedValue& v : vals) {
      ++gate_values_;
      gate_worst_ = std::max(gate_worst_, v.delta);
      if (!v.converged) ++gate_failures_;
    }
  }

  void absorb(const BoundReport& rep) {
    for (const ScanRow& row : rep.rows) {
      ++gate_values_;
      if (!row.converged) ++gate_failures_;
    }
  }

  static std::vector<CartanVector> spectral_rays() {
    using detail::unit_cartan;
    return {unit_cartan(1, 0, -1), unit_cartan(1, 1, -2), unit_cartan(2, -1, -1),
            unit_cartan(3, 1, -4), unit_cartan(0, 1, -1)};
  }

  // 1. phi_lambda at the identity equals the quadrature weight sum for every
  //    spectral parameter, so the defect is bounded by the weight-sum error.
  CriterionResult normalization() {
    CriterionResult res{1, "normalization", false, false, ""};
    GaussianSampler sampler(cfg_.seed);
    std::vector<SpectralParam> lams;
    for (int i = 0; i < 20; ++i) {
      CartanVector dual = sampler.cartan_vector(1.0);
      dual = ((20.0 / 6.0) * (i + 1) / 20.0 / lie_norm(dual)) * dual;
      lams.push_back(SpectralParam::from_dual(dual));
    }
    QuadratureRule rule = haar_product_rule(16, 24);
    auto vals = spherical_function_batch_gated(CartanVector(), lams, rule, cfg_.gate_tol);
    absorb(vals);
    double worst = 0.0;
    for (const GatedValue& v : vals) worst = std::max(worst, std::abs(v.value - 1.0));
    res.gate_failed = !all_converged(vals);
    res.pass = worst < 1e-12 && !res.gate_failed;
    res.detail = detail::strprintf("max |phi(e)-1| = %.3e over 20 spectral parameters", worst);
    return res;
  }

  static bool all_converged(const std::vector<GatedValue>& vals) {
    for (const GatedValue& v : vals)
      if (!v.converged) return false;
    return true;
  }

  // 2. phi_{s lambda} = phi_lambda for every Weyl element, over a mixed grid
  //    of regular, singular, and zero group arguments.
  CriterionResult weyl_symmetry() {
    using detail::unit_cartan;
    CriterionResult res{2, "weyl-symmetry", false, false, ""};
    std::vector<CartanVector> hs = {CartanVector(), 0.7 * unit_cartan(1, 1, -2),
                                    0.9 * unit_cartan(1, -2, 1), 0.8 * unit_cartan(1, 0, -1),
                                    unit_cartan(3, 1, -4)};
    auto rays = spectral_rays();
    const std::vector<double> ts = {3.0, 10.0};
    const auto& weyl = weyl_elements();
    QuadratureRule rule = haar_product_rule(cfg_.n_beta, cfg_.n_ag);
    double worst = 0.0;
    for (const CartanVector& h : hs) {
      std::vector<SpectralParam> lams;
      for (const CartanVector& ray : rays)
        for (double t : ts) {
          SpectralParam lam = SpectralParam::from_dual(t * ray);
          for (const WeylElement& s : weyl) lams.push_back(weyl_act(s, lam));
        }
      auto vals = spherical_function_batch_gated(h, lams, rule, cfg_.gate_tol);
      absorb(vals);
      if (!all_converged(vals)) res.gate_failed = true;
      for (std::size_t g = 0; g < lams.size(); g += weyl.size())
        for (std::size_t j = 1; j < weyl.size(); ++j)
          worst = std::max(worst, std::abs(vals[g + j].value - vals[g].value));
    }
    res.pass = worst < 1e-6 && !res.gate_failed;
    res.detail = detail::strprintf(
        "max |phi_{s lam} - phi_lam| = %.3e over 6 Weyl x 5 H x 5 rays x t in {3,10}", worst);
    return res;
  }

  const BoundReport& scan_report() {
    if (!scan_) {
      using detail::unit_cartan;
      ScanConfig sc;
      sc.h_points = {CartanVector(),
                     0.8 * unit_cartan(1, 1, -2),
                     unit_cartan(2, -1, -1),
                     0.7 * unit_cartan(1, 0, -1),
                     unit_cartan(3, 1, -4),
                     0.5 * unit_cartan(1, 0, -1),
                     0.9 * unit_cartan(1, -2, 1),
                     0.6 * unit_cartan(4, -1, -3),
                     0.3 * unit_cartan(1, 1, -2)};
      sc.lam_directions = {unit_cartan(1, 1, -2), unit_cartan(1, 0, -1)};
      for (int t = 0; t <= 40; t += 2) sc.t_values.push_back(t);
      sc.n_beta = cfg_.scan_n_beta;
      sc.n_ag = cfg_.scan_n_ag;
      sc.gate_tol = cfg_.gate_tol;
      scan_ = bound_scan(sc);
      absorb(*scan_);
    }
    return *scan_;
  }

  // 3. All ratios against the uniform bound are finite and the empirical
  //    constant is stable when the spectral range doubles from t <= 20 to 40.
  CriterionResult bound_uniformity() {
    CriterionResult res{3, "bound-uniformity", false, false, ""};
    const BoundReport& rep = scan_report();
    res.gate_failed = rep.unconverged_count > 0;
    bool finite = true;
    double c20 = 0.0, c40 = 0.0;
    for (const ScanRow& row : rep.rows) {
      if (!std::isfinite(row.ratio)) finite = false;
      if (!row.converged) continue;
      c40 = std::max(c40, row.ratio);
      if (row.t <= 20.0) c20 = std::max(c20, row.ratio);
    }
    double change = c40 > 0.0 ? (c40 - c20) / c40 : 0.0;
    res.pass = finite && change < 0.10 && !res.gate_failed;
    res.detail = detail::strprintf(
        "empirical constant %.6f (t<=20) vs %.6f (t<=40), change %.2f%%, all ratios finite: %s",
        c20, c40, 100.0 * change, finite ? "yes" : "no");
    return res;
  }

  // 4. At a wall point the classical bound degenerates to the constant 6 as
  //    soon as the position window reaches the origin, while the measured
  //    decay tracks the uniform bound: fitted |phi| slope within 0.1 of it.
  CriterionResult wall_improvement() {
    CriterionResult res{4, "wall-improvement", false, false, ""};
    const BoundReport& rep = scan_report();
    res.gate_failed = rep.unconverged_count > 0;
    const int wall_index = 1;  // 0.8 * unit(1,1,-2) in the scan grid
    double degenerate = 0.0;
    for (double t : {10.0, 25.0, 40.0}) {
      SpectralParam lam =
          SpectralParam::from_dual(t * detail::unit_cartan(1, 1, -2));
      degenerate = std::max(degenerate, std::abs(old_bound(CartanVector(), lam) - 6.0));
    }
    bool slopes_ok = true;
    std::string slopes;
    for (const RayFit& fit : rep.fits) {
      if (fit.h_index != wall_index) continue;
      if (fit.points_used < 2 || fit.slope_phi > fit.slope_new + 0.1) slopes_ok = false;
      slopes += detail::strprintf(" ray %d: slope phi %.3f vs bound %.3f;", fit.ray_index,
                                  fit.slope_phi, fit.slope_new);
    }
    res.pass = degenerate == 0.0 && slopes_ok && !res.gate_failed;
    res.detail = detail::strprintf("classical bound at origin-window: 6 (defect %.1e);%s",
                                   degenerate, slopes.c_str());
    return res;
  }

  // 5. Regular arguments give exactly the 24 signed permutations; singular
  //    configurations give families whose empirical dimensions all match the
  //    prediction.
  CriterionResult critical_inventory() {
    using detail::unit_cartan;
    CriterionResult res{5, "critical-inventory", false, false, ""};
    CartanVector h = CartanVector::project(0.8, 0.1, -0.9);
    CartanVector hp = CartanVector::project(0.6, -0.1, -0.5);
    CriticalPointSet set = find_critical_points(PhaseContext(h, hp));
    bool regular_ok = set.points.size() == 24;
    double worst_mp = 0.0, worst_res = 0.0;
    for (const CriticalPointRecord& rec : set.points) {
      worst_mp = std::max(worst_mp, rec.m_prime_distance);
      worst_res = std::max(worst_res, rec.residual);
      if (!rec.in_m_prime || rec.manifold_dim != 0) regular_ok = false;
    }
    regular_ok = regular_ok && worst_mp < 1e-6 && worst_res < 1e-8;

    CartanVector w12 = unit_cartan(1, 1, -2);
    CartanVector w13 = unit_cartan(1, -2, 1);
    CartanVector w23 = unit_cartan(2, -1, -1);
    CartanVector r1 = unit_cartan(1, 0, -1);
    CartanVector r2 = unit_cartan(3, 1, -4);
    CartanVector r3 = unit_cartan(4, -1, -3);
    std::vector<std::pair<CartanVector, CartanVector>> configs = {
        {w12, r1},           {r1, w12},        {w12, w12},
        {w12, w13},          {w13, r2},        {w23, r3},
        {r2, w23},           {w23, w23},       {w12, w23},
        {w13, w23},          {0.5 * w12, r1},  {w12, 0.9 * r2},
        {r3, w13},           {0.7 * w13, 0.7 * w13},
        {w23, w12},          {0.6 * w23, r1},  {r1, w23},
        {w13, w12},          {0.8 * w12, 0.5 * w23},
        {0.4 * w13, 0.9 * r3}};
    int matched = 0;
    for (const auto& [ha, hb] : configs) {
      CriticalPointSet fam = find_critical_points(PhaseContext(ha, hb));
      bool positive = false, tags_ok = !fam.points.empty();
      for (const CriticalPointRecord& rec : fam.points) {
        if (rec.manifold_dim >= 1) positive = true;
        if (rec.manifold_dim !=
            predicted_critical_dimension(ha, hb, rec.weyl_tag))
          tags_ok = false;
      }
      if (positive && tags_ok) ++matched;
    }
    res.pass = regular_ok && matched == static_cast<int>(configs.size());
    res.detail = detail::strprintf(
        "regular pair: %zu points, max M' distance %.2e, max residual %.2e; "
        "singular dimension tags matched %d/%zu configs",
        set.points.size(), worst_mp, worst_res, matched, configs.size());
    return res;
  }

  // 6. At every signed permutation the analytic Hessian eigenvalues match the
  //    normal form {-(s a)(H) a(H')} and a finite-difference Hessian.
  CriterionResult hessian_normal_form() {
    CriterionResult res{6, "hessian-normal-form", false, false, ""};
    CartanVector h = CartanVector::project(0.8, 0.1, -0.9);
    CartanVector hp = CartanVector::project(0.6, -0.1, -0.5);
    PhaseContext ctx(h, hp);
    double worst_rel = 0.0, worst_fd = 0.0;
    for (const Rotation& m : m_prime_elements()) {
      WeylElement s = weyl_class_of(m);
      Mat3 hess = phase_hessian(ctx, m);
      Vec3 got = symmetric_eigen(hess).values;
      Vec3 want = predicted_m_prime_eigenvalues(h, hp, s);
      std::sort(want.x, want.x + 3);
      for (int i = 0; i < 3; ++i)
        worst_rel = std::max(worst_rel,
                             std::abs(got.x[i] - want.x[i]) / std::abs(want.x[i]));
      Mat3 fd = phase_hessian_fd(ctx, m);
      worst_fd = std::max(worst_fd, max_abs_entry(fd - hess));
    }
    res.pass = worst_rel < 1e-6 && worst_fd < 1e-4;
    res.detail = detail::strprintf(
        "max relative eigenvalue error %.2e, max finite-difference defect %.2e "
        "over 24 signed permutations",
        worst_rel, worst_fd);
    return res;
  }

  // 7. The model-integral ratio |I| prod(1+|t_i|)^{1/2} / ||u||_{C^d} is
  //    finite and its sup over the diagonal stays put when the range
  //    quadruples. The wider sup reuses the narrow grid and only adds tail
  //    points, so it can never sit below the narrow one and the change
  //    measures genuine growth.
  CriterionResult model_integral_decay() {
    CriterionResult res{7, "model-integral-decay", false, false, ""};
    bool ok = true;
    std::string parts;
    for (int d = 1; d <= 3; ++d) {
      VdcAmplitude u = vdc_default_bump(d);
      double cn = vdc_c_norm(u, d);
      auto ratio_at = [&](double tval) {
        std::vector<double> t(d, tval);
        VdcRatio r = vdc_bound_ratio(t, u, cn);
        if (!r.converged || !std::isfinite(r.ratio)) ok = false;
        return r.ratio;
      };
      double s100 = 0.0;
      for (int i = 0; i <= 100; ++i) s100 = std::max(s100, ratio_at(i));
      double s400 = s100;
      for (int i = 104; i <= 400; i += 4) s400 = std::max(s400, ratio_at(i));
      double change = s400 > 0.0 ? (s400 - s100) / s400 : 0.0;
      if (change >= 0.20) ok = false;
      parts += detail::strprintf(" d=%d: sup %.4f -> %.4f (%.1f%%);", d, s100, s400,
                                 100.0 * change);
    }
    res.pass = ok;
    res.detail = "sup ratio over [0,100] vs [0,400] diagonals:" + parts;
    return res;
  }

  // 8. The substitution solver lands below 1e-10 on random symmetric traceless
  //    inputs and the pushforward identity holds below 1e-8.
  CriterionResult substitution_map() {
    using detail::unit_cartan;
    CriterionResult res{8, "substitution-map", false, false, ""};
    GaussianSampler sampler(cfg_.seed + 1);
    double worst_res = 0.0;
    int solved = 0;
    for (int i = 0; i < 100; ++i) {
      Mat3 y = sampler.symmetric_traceless(2.0);
      DuistermaatSolution sol = duistermaat_solve(y, 1e-12);
      if (sol.converged && sol.residual < 1e-10) ++solved;
      worst_res = std::max(worst_res, sol.residual);
    }
    std::vector<std::pair<CartanVector, double>> pairs = {{0.6 * unit_cartan(1, 0, -1), 1.7},
                                                          {0.9 * unit_cartan(1, 1, -2), 4.0},
                                                          {0.8 * unit_cartan(3, 1, -4), 2.5},
                                                          {0.5 * unit_cartan(1, -2, 1), 6.0},
                                                          {unit_cartan(2, -1, -1), 3.3}};
    double worst_push = 0.0;
    for (const auto& [h, mag] : pairs) {
      SpectralParam lam = SpectralParam::from_dual(mag * unit_cartan(1, 0, -1));
      PushforwardReport push = pushforward_identity_check(h, lam, 100, cfg_.seed + 2);
      worst_push = std::max(worst_push, push.max_abs_error);
    }
    res.pass = solved == 100 && worst_push < 1e-8;
    res.detail = detail::strprintf(
        "solver: %d/100 below 1e-10 (max residual %.2e); pushforward max error %.2e",
        solved, worst_res, worst_push);
    return res;
  }

  // 9. Centralizer orthogonality holds to machine precision and the circle
  //    zeros are the signed permutations to 1e-8 in the angle.
  CriterionResult orthogonality_identities() {
    using detail::unit_cartan;
    CriterionResult res{9, "orthogonality-identities", false, false, ""};
    std::vector<CartanVector> walls = {0.8 * unit_cartan(1, 1, -2), 0.9 * unit_cartan(1, -2, 1),
                                       0.7 * unit_cartan(2, -1, -1)};
    double worst_orth = 0.0, worst_zero = 0.0;
    bool counts_ok = true;
    for (const CartanVector& h : walls) {
      OrthogonalityReport orth = lemma42_check(h);
      worst_orth = std::max(worst_orth, orth.max_orthogonal_abs);
      CircleZeroReport circ = lemma45_check(h);
      if (circ.zero_count != circ.predicted_count) counts_ok = false;
      worst_zero = std::max(worst_zero, circ.max_zero_deviation);
    }
    res.pass = worst_orth < 1e-12 && counts_ok && worst_zero < 1e-8;
    res.detail = detail::strprintf(
        "max orthogonal pairing %.2e; circle zeros at multiples of pi/2 within %.2e "
        "on all three walls",
        worst_orth, worst_zero);
    return res;
  }

  // 10. Every spherical value the suite reported passed the 1.5x refinement
  //     gate.
  CriterionResult quadrature_trust() {
    CriterionResult res{10, "quadrature-trust", false, false, ""};
    scan_report();  // make sure the heaviest consumer ran even standalone
    res.gate_failed = gate_failures_ > 0;
    res.pass = !res.gate_failed && gate_values_ > 0;
    res.detail = detail::strprintf(
        "%zu gated values, %zu failures, worst refinement delta %.2e", gate_values_,
        gate_failures_, gate_worst_);
    return res;
  }
};

}  // namespace sl3sph
