#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "sl3sph/quadrature.hpp"
#include "sl3sph/sampling.hpp"

// Spherical functions as oscillatory integrals over the rotation group, the
// decay bounds they are compared against, and the scan driver that produces
// the empirical reports.
namespace sl3sph {

struct Amplitude {
  std::function<std::complex<double>(const Rotation&)> eval;
  std::optional<double> declared_c3_bound;
};

// The amplitude e^{-rho(H(exp(H) k))} that turns the oscillatory integral with
// pure phase i*lambda into the spherical function itself.
inline Amplitude ground_amplitude(const CartanVector& h) {
  return Amplitude{[h](const Rotation& k) -> std::complex<double> {
                     CartanVector x = iwasawa_projection(cartan_exp_times(h, k));
                     return std::exp(-(x.h[0] - x.h[2]));
                   },
                   std::nullopt};
}

namespace detail {

// Per-node Iwasawa logs of exp(H) k, needing only columns 0 and 2 of k:
//   log r1 = log|D k e1|, log r3 = -log|(D k e1) x (D k e2)| = -log|D^-1 k e3|
// using det D = 1, and log r2 balances the sum to zero.
struct IwasawaKernel {
  double a0, a1, a2;  // e^{2 h_i}
  double b0, b1, b2;  // e^{-2 h_i}

  explicit IwasawaKernel(const CartanVector& h)
      : a0(std::exp(2.0 * h.h[0])),
        a1(std::exp(2.0 * h.h[1])),
        a2(std::exp(2.0 * h.h[2])),
        b0(std::exp(-2.0 * h.h[0])),
        b1(std::exp(-2.0 * h.h[1])),
        b2(std::exp(-2.0 * h.h[2])) {}

  // Writes log r1 into x0 and log r3 into x2.
  void logs(const Mat3& k, double& x0, double& x2) const {
    double g11 = a0 * k.m[0][0] * k.m[0][0] + a1 * k.m[1][0] * k.m[1][0] +
                 a2 * k.m[2][0] * k.m[2][0];
    double q = b0 * k.m[0][2] * k.m[0][2] + b1 * k.m[1][2] * k.m[1][2] +
               b2 * k.m[2][2] * k.m[2][2];
    x0 = 0.5 * std::log(g11);
    x2 = -0.5 * std::log(q);
  }
};

// Coefficients so that lambda(x) = cr0*x0 + cr2*x2 + i*(ci0*x0 + ci2*x2) for a
// sum-zero triple x expressed through x0, x2 alone (x1 = -x0 - x2).
struct PhaseCoeffs {
  double cr0, cr2, ci0, ci2;
  bool complex_part;

  explicit PhaseCoeffs(const SpectralParam& lam) {
    cr0 = lam.l[0].real() - lam.l[1].real();
    cr2 = lam.l[2].real() - lam.l[1].real();
    ci0 = lam.l[0].imag() - lam.l[1].imag();
    ci2 = lam.l[2].imag() - lam.l[1].imag();
    complex_part = ci0 != 0.0 || ci2 != 0.0;
  }
};

}  // namespace detail

// Batch of spherical-function values at fixed H: integral over the rotation
// group of e^{(i lambda - rho)(H(exp(H) k))} per spectral parameter, one pass
// over the quadrature nodes, deterministic reduction.
inline std::vector<std::complex<double>> spherical_function_batch(
    const CartanVector& h, const std::vector<SpectralParam>& lams,
    const QuadratureRule& rule) {
  detail::IwasawaKernel kern(h);
  std::vector<detail::PhaseCoeffs> coeffs;
  coeffs.reserve(lams.size());
  for (const auto& lam : lams) coeffs.emplace_back(lam);
  std::vector<PairwiseAccumulator<std::complex<double>>> acc(lams.size());
  for_each_node(rule, [&](const Rotation& k, double w) {
    double x0, x2;
    kern.logs(k.r, x0, x2);
    double base = w * std::exp(x2 - x0);  // weight times e^{-rho(x)}
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      const auto& c = coeffs[m];
      double amp = c.complex_part ? base * std::exp(-(c.ci0 * x0 + c.ci2 * x2)) : base;
      double p = c.cr0 * x0 + c.cr2 * x2;
      acc[m].add({amp * std::cos(p), amp * std::sin(p)});
    }
  });
  std::vector<std::complex<double>> out(lams.size());
  for (std::size_t m = 0; m < lams.size(); ++m) out[m] = acc[m].total();
  return out;
}

inline std::complex<double> spherical_function(const CartanVector& h,
                                               const SpectralParam& lam,
                                               const QuadratureRule& rule) {
  return spherical_function_batch(h, {lam}, rule)[0];
}

// Oscillatory integral with pure phase i*lambda and a caller-supplied
// amplitude; with ground_amplitude(h) this reproduces the spherical function.
inline std::complex<double> iwasawa_oscillatory(const CartanVector& h,
                                                const SpectralParam& lam,
                                                const Amplitude& u,
                                                const QuadratureRule& rule) {
  detail::IwasawaKernel kern(h);
  detail::PhaseCoeffs c(lam);
  PairwiseAccumulator<std::complex<double>> acc;
  for_each_node(rule, [&](const Rotation& k, double w) {
    double x0, x2;
    kern.logs(k.r, x0, x2);
    double amp = c.complex_part ? std::exp(-(c.ci0 * x0 + c.ci2 * x2)) : 1.0;
    double p = c.cr0 * x0 + c.cr2 * x2;
    acc.add(w * amp * std::complex<double>(std::cos(p), std::sin(p)) * u.eval(k));
  });
  return acc.total();
}

// Model oscillatory integral over the rotation group with the pairing phase
// B(diag(h), Ad(k) diag(hp)); this is the integral whose critical points the
// phase-analysis module classifies. Symmetric under swapping h and hp.
inline std::complex<double> phase_integral(const CartanVector& h,
                                           const CartanVector& hp,
                                           const Amplitude& u,
                                           const QuadratureRule& rule) {
  PairwiseAccumulator<std::complex<double>> acc;
  for_each_node(rule, [&](const Rotation& k, double w) {
    double p = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        p += h.h[i] * k.r.m[i][j] * k.r.m[i][j] * hp.h[j];
    p *= kKillingScale;
    acc.add(w * std::complex<double>(std::cos(p), std::sin(p)) * u.eval(k));
  });
  return acc.total();
}

inline constexpr double kGateTol = 1e-8;
inline constexpr double kGateRefineFactor = 1.5;

struct GatedValue {
  std::complex<double> value{0.0, 0.0};  // taken from the refined rule
  bool converged = false;
  double delta = 0.0;  // |refined - base|
};

inline QuadratureRule refine_rule(const QuadratureRule& rule) {
  return haar_product_rule(
      static_cast<int>(std::ceil(kGateRefineFactor * rule.n_beta)),
      static_cast<int>(std::ceil(kGateRefineFactor * rule.n_ag)));
}

// Convergence gate: a value counts only if refining both grid sizes by 1.5x
// moves it by less than gate_tol.
inline std::vector<GatedValue> spherical_function_batch_gated(
    const CartanVector& h, const std::vector<SpectralParam>& lams,
    const QuadratureRule& rule, double gate_tol = kGateTol) {
  QuadratureRule fine = refine_rule(rule);
  auto coarse_vals = spherical_function_batch(h, lams, rule);
  auto fine_vals = spherical_function_batch(h, lams, fine);
  std::vector<GatedValue> out(lams.size());
  for (std::size_t m = 0; m < lams.size(); ++m) {
    double d = std::abs(fine_vals[m] - coarse_vals[m]);
    out[m] = {fine_vals[m], d < gate_tol, d};
  }
  return out;
}

inline GatedValue spherical_function_gated(const CartanVector& h,
                                           const SpectralParam& lam,
                                           const QuadratureRule& rule,
                                           double gate_tol = kGateTol) {
  return spherical_function_batch_gated(h, {lam}, rule, gate_tol)[0];
}

// Uniform decay bound: sum over the Weyl group of omega(s^-1 H, lambda_dual)^(-1/2).
inline double new_bound(const CartanVector& h, const SpectralParam& lam) {
  CartanVector ld = dual_covector(lam);
  double s = 0.0;
  for (const WeylElement& w : weyl_elements())
    s += 1.0 / std::sqrt(omega(weyl_act(w.inverse(), h), ld));
  return s;
}

// Classical bound: per Weyl element, the product runs only over positive roots
// not vanishing on s^-1 H, and each factor sees the spectral parameter alone.
inline double old_bound(const CartanVector& h, const SpectralParam& lam,
                        double tol = 1e-9) {
  CartanVector ld = dual_covector(lam);
  double scale = std::max(1.0, lie_norm(h));
  double s = 0.0;
  for (const WeylElement& w : weyl_elements()) {
    CartanVector hw = weyl_act(w.inverse(), h);
    double p = 1.0;
    for (const Root& a : positive_roots())
      if (std::abs(root_eval(a, hw)) > tol * scale)
        p *= 1.0 / std::sqrt(1.0 + std::abs(root_eval(a, ld)));
    s += p;
  }
  return s;
}

struct C3Config {
  std::size_t samples = 128;
  double step = 1e-2;
};

// Sampled estimate of the C^3 norm of an amplitude: max over sample rotations
// and derivative words of length at most 3 (left-invariant frame, central
// differences). Deterministic for a fixed sample count.
inline double c3_norm_estimate(const Amplitude& u, const C3Config& cfg = {}) {
  std::vector<Rotation> samples = halton_rotations(cfg.samples);
  samples.push_back(Rotation());
  const auto& basis = k_basis();
  std::array<std::array<Rotation, 2>, 3> steps;
  for (int i = 0; i < 3; ++i) {
    steps[i][0] = exp_so3(cfg.step * basis[i]);
    steps[i][1] = exp_so3(-cfg.step * basis[i]);
  }
  // Derivative along word w at k, by recursion on the leading letter.
  std::function<std::complex<double>(const Rotation&, const std::vector<int>&, std::size_t)>
      deriv = [&](const Rotation& k, const std::vector<int>& word,
                  std::size_t pos) -> std::complex<double> {
    if (pos == word.size()) return u.eval(k);
    int i = word[pos];
    return (deriv(k * steps[i][0], word, pos + 1) -
            deriv(k * steps[i][1], word, pos + 1)) /
           (2.0 * cfg.step);
  };
  std::vector<std::vector<int>> words{{}};
  for (int len = 1; len <= 3; ++len) {
    std::size_t start = 0, stop = words.size();
    for (std::size_t w = start; w < stop; ++w)
      if (static_cast<int>(words[w].size()) == len - 1)
        for (int i = 0; i < 3; ++i) {
          auto next = words[w];
          next.push_back(i);
          words.push_back(next);
        }
  }
  double best = 0.0;
  for (const Rotation& k : samples)
    for (const auto& word : words)
      best = std::max(best, std::abs(deriv(k, word, 0)));
  return best;
}

enum class BoundKind { uniform, classical };

struct ScanConfig {
  std::vector<CartanVector> h_points;
  std::vector<CartanVector> lam_directions;  // unit-norm dual vectors
  std::vector<double> t_values;              // nonnegative magnitudes
  int n_beta = 128;
  int n_ag = 256;
  double gate_tol = kGateTol;
  double singular_tol = 1e-9;
  double slope_t_min = 10.0;  // log-log fits use rows with t >= this
  BoundKind ratio_bound = BoundKind::uniform;  // bound the ratio column divides by
};

struct ScanRow {
  int h_index = 0;
  int ray_index = 0;
  double t = 0.0;
  CartanVector h;
  CartanVector lam_dual;
  std::complex<double> phi{0.0, 0.0};
  bool converged = false;
  double bound_new = 0.0;
  double bound_old = 0.0;
  double ratio = 0.0;  // |phi| over the configured bound
};

struct RayFit {
  int h_index = 0;
  int ray_index = 0;
  int points_used = 0;
  double slope_phi = 0.0;
  double slope_new = 0.0;
  double slope_old = 0.0;
};

struct BoundReport {
  ScanConfig config;
  std::vector<ScanRow> rows;
  std::vector<RayFit> fits;
  double empirical_constant = 0.0;  // max ratio over converged rows
  std::size_t unconverged_count = 0;
  double worst_gate_delta = 0.0;
};

namespace detail {

inline double regression_slope(const std::vector<double>& xs,
                               const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  return denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace detail

// Evaluates the spherical function over the (H, ray, t) grid with the
// convergence gate, tabulates both decay bounds, and fits log-log slopes per
// (H, ray) over the converged tail rows.
inline BoundReport bound_scan(const ScanConfig& cfg) {
  BoundReport rep;
  rep.config = cfg;
  QuadratureRule rule = haar_product_rule(cfg.n_beta, cfg.n_ag);
  for (int hi = 0; hi < static_cast<int>(cfg.h_points.size()); ++hi) {
    const CartanVector& h = cfg.h_points[hi];
    std::vector<SpectralParam> lams;
    for (const CartanVector& dir : cfg.lam_directions)
      for (double t : cfg.t_values) lams.push_back(SpectralParam::from_dual(t * dir));
    auto vals = spherical_function_batch_gated(h, lams, rule, cfg.gate_tol);
    std::size_t m = 0;
    for (int ri = 0; ri < static_cast<int>(cfg.lam_directions.size()); ++ri) {
      for (double t : cfg.t_values) {
        const GatedValue& gv = vals[m++];
        ScanRow row;
        row.h_index = hi;
        row.ray_index = ri;
        row.t = t;
        row.h = h;
        row.lam_dual = t * cfg.lam_directions[ri];
        row.phi = gv.value;
        row.converged = gv.converged;
        rep.worst_gate_delta = std::max(rep.worst_gate_delta, gv.delta);
        SpectralParam lam = SpectralParam::from_dual(row.lam_dual);
        row.bound_new = new_bound(h, lam);
        row.bound_old = old_bound(h, lam, cfg.singular_tol);
        row.ratio = std::abs(row.phi) / (cfg.ratio_bound == BoundKind::uniform
                                             ? row.bound_new
                                             : row.bound_old);
        if (!row.converged) ++rep.unconverged_count;
        rep.rows.push_back(row);
      }
      RayFit fit;
      fit.h_index = hi;
      fit.ray_index = ri;
      std::vector<double> lt, lphi, lnew, lold;
      for (const ScanRow& row : rep.rows) {
        if (row.h_index != hi || row.ray_index != ri) continue;
        if (!row.converged || row.t < cfg.slope_t_min || row.t <= 0.0) continue;
        if (std::abs(row.phi) <= 0.0) continue;
        lt.push_back(std::log(row.t));
        lphi.push_back(std::log(std::abs(row.phi)));
        lnew.push_back(std::log(row.bound_new));
        lold.push_back(std::log(row.bound_old));
      }
      fit.points_used = static_cast<int>(lt.size());
      if (fit.points_used >= 2) {
        fit.slope_phi = detail::regression_slope(lt, lphi);
        fit.slope_new = detail::regression_slope(lt, lnew);
        fit.slope_old = detail::regression_slope(lt, lold);
      }
      rep.fits.push_back(fit);
    }
  }
  for (const ScanRow& row : rep.rows)
    if (row.converged) rep.empirical_constant = std::max(rep.empirical_constant, row.ratio);
  return rep;
}

}  // namespace sl3sph
