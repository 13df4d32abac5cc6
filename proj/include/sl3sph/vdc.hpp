#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sl3sph/quadrature.hpp"

// Model oscillatory integral with diagonal quadratic phase on a box:
//   I(t) = integral over [-L, L]^d of e^{i (t_1 x_1^2 + ... + t_d x_d^2)/2} u(x) dx
// together with the scale-normalized ratio |I(t)| prod (1+|t_i|)^{1/2} / ||u||_{C^d}
// that the decay lemma bounds uniformly.
namespace sl3sph {

struct VdcAmplitude {
  int dim = 1;
  double support = 1.0;  // half-width L of the box
  bool separable = false;
  std::function<double(double)> axis;                      // set when separable
  std::function<double(const std::array<double, 3>&)> eval;  // always set
};

inline double bump_profile(double x, double L) {
  double r = x / L;
  double d = 1.0 - r * r;
  if (d <= 0.0) return 0.0;
  return std::exp(-1.0 / d);  // underflows to 0 smoothly at the edge
}

// Default amplitude: tensor product of the standard one-dimensional bump.
inline VdcAmplitude vdc_default_bump(int dim, double L = 1.0) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("vdc_default_bump: dim must be 1..3");
  VdcAmplitude u;
  u.dim = dim;
  u.support = L;
  u.separable = true;
  u.axis = [L](double x) { return bump_profile(x, L); };
  u.eval = [dim, L](const std::array<double, 3>& x) {
    double p = 1.0;
    for (int i = 0; i < dim; ++i) p *= bump_profile(x[i], L);
    return p;
  };
  return u;
}

// Radial bump, exercising the dense tensor-grid path.
inline VdcAmplitude vdc_radial_bump(int dim, double L = 1.0) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("vdc_radial_bump: dim must be 1..3");
  VdcAmplitude u;
  u.dim = dim;
  u.support = L;
  u.separable = false;
  u.eval = [dim, L](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
    return bump_profile(std::sqrt(r2), L);
  };
  return u;
}

namespace detail {

// Gauss-Legendre sized to the oscillation budget |t| L^2 / 2 of the axis.
inline int vdc_axis_nodes(double t, double L, double node_scale) {
  double budget = 96.0 + 0.6 * std::abs(t) * L * L;
  return static_cast<int>(std::ceil(node_scale * budget));
}

struct VdcAxisRule {
  std::vector<double> x;                       // nodes in [-L, L]
  std::vector<std::complex<double>> wp;        // weight times e^{i t x^2 / 2}
};

inline VdcAxisRule vdc_axis_rule(double t, double L, double node_scale) {
  GaussLegendre gl = gauss_legendre(vdc_axis_nodes(t, L, node_scale));
  VdcAxisRule rule;
  rule.x.resize(gl.nodes.size());
  rule.wp.resize(gl.nodes.size());
  for (std::size_t n = 0; n < gl.nodes.size(); ++n) {
    double x = L * gl.nodes[n];
    double w = L * gl.weights[n];
    double p = 0.5 * t * x * x;
    rule.x[n] = x;
    rule.wp[n] = {w * std::cos(p), w * std::sin(p)};
  }
  return rule;
}

}  // namespace detail

// Evaluates the model integral. node_scale scales the automatic per-axis node
// counts and is how the refinement gate probes convergence.
inline std::complex<double> vdc_model_integral(const std::vector<double>& t,
                                               const VdcAmplitude& u,
                                               double node_scale = 1.0) {
  int d = static_cast<int>(t.size());
  if (d != u.dim || d < 1 || d > 3)
    throw std::invalid_argument("vdc_model_integral: dimension mismatch");
  std::array<detail::VdcAxisRule, 3> axes;
  for (int i = 0; i < d; ++i) axes[i] = detail::vdc_axis_rule(t[i], u.support, node_scale);
  if (u.separable) {
    std::complex<double> out{1.0, 0.0};
    for (int i = 0; i < d; ++i) {
      PairwiseAccumulator<std::complex<double>> acc;
      for (std::size_t n = 0; n < axes[i].x.size(); ++n)
        acc.add(axes[i].wp[n] * u.axis(axes[i].x[n]));
      out *= acc.total();
    }
    return out;
  }
  PairwiseAccumulator<std::complex<double>> acc;
  std::array<double, 3> x{0.0, 0.0, 0.0};
  std::size_t n0 = axes[0].x.size();
  std::size_t n1 = d > 1 ? axes[1].x.size() : 1;
  std::size_t n2 = d > 2 ? axes[2].x.size() : 1;
  for (std::size_t i0 = 0; i0 < n0; ++i0) {
    x[0] = axes[0].x[i0];
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      if (d > 1) x[1] = axes[1].x[i1];
      std::complex<double> w01 = axes[0].wp[i0];
      if (d > 1) w01 *= axes[1].wp[i1];
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        if (d > 2) x[2] = axes[2].x[i2];
        std::complex<double> w = w01;
        if (d > 2) w *= axes[2].wp[i2];
        acc.add(w * u.eval(x));
      }
    }
  }
  return acc.total();
}

// Sampled sup norm of all partial derivatives of total order <= max_order
// (central differences on a dense grid; separable amplitudes factor axiswise).
inline double vdc_c_norm(const VdcAmplitude& u, int max_order) {
  if (max_order < 0 || max_order > 3)
    throw std::invalid_argument("vdc_c_norm: order must be 0..3");
  const double L = u.support;
  if (u.separable) {
    // sup of the m-th axis derivative, m = 0..max_order, on a dense grid.
    std::array<double, 4> sup{0.0, 0.0, 0.0, 0.0};
    const int grid = 4001;
    const double h = 1e-3 * L;
    std::function<double(double, int)> deriv = [&](double x, int m) -> double {
      if (m == 0) return u.axis(x);
      return (deriv(x + h, m - 1) - deriv(x - h, m - 1)) / (2.0 * h);
    };
    for (int g = 0; g < grid; ++g) {
      double x = -L + 2.0 * L * g / (grid - 1);
      for (int m = 0; m <= max_order; ++m)
        sup[m] = std::max(sup[m], std::abs(deriv(x, m)));
    }
    double best = 0.0;
    std::array<int, 3> beta{0, 0, 0};
    std::function<void(int, int)> walk = [&](int axis, int left) {
      if (axis == u.dim) {
        double p = 1.0;
        for (int i = 0; i < u.dim; ++i) p *= sup[beta[i]];
        best = std::max(best, p);
        return;
      }
      for (int m = 0; m <= left; ++m) {
        beta[axis] = m;
        walk(axis + 1, left - m);
      }
    };
    walk(0, max_order);
    return best;
  }
  const int grid = 33;
  const double h = 1e-2 * L;
  std::function<double(std::array<double, 3>, std::array<int, 3>)> deriv =
      [&](std::array<double, 3> x, std::array<int, 3> beta) -> double {
    for (int i = 0; i < 3; ++i)
      if (beta[i] > 0) {
        auto bm = beta;
        --bm[i];
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        return (deriv(xp, bm) - deriv(xm, bm)) / (2.0 * h);
      }
    return u.eval(x);
  };
  double best = 0.0;
  std::array<int, 3> steps{grid, u.dim > 1 ? grid : 1, u.dim > 2 ? grid : 1};
  for (int g0 = 0; g0 < steps[0]; ++g0)
    for (int g1 = 0; g1 < steps[1]; ++g1)
      for (int g2 = 0; g2 < steps[2]; ++g2) {
        std::array<double, 3> x{-L + 2.0 * L * g0 / (grid - 1),
                                u.dim > 1 ? -L + 2.0 * L * g1 / (grid - 1) : 0.0,
                                u.dim > 2 ? -L + 2.0 * L * g2 / (grid - 1) : 0.0};
        std::array<int, 3> beta{0, 0, 0};
        std::function<void(int, int)> walk = [&](int axis, int left) {
          if (axis == u.dim) {
            best = std::max(best, std::abs(deriv(x, beta)));
            return;
          }
          for (int m = 0; m <= left; ++m) {
            beta[axis] = m;
            walk(axis + 1, left - m);
          }
        };
        walk(0, max_order);
      }
  return best;
}

struct VdcRatio {
  std::complex<double> value{0.0, 0.0};  // refined integral value
  double ratio = 0.0;                    // |I| prod (1+|t_i|)^{1/2} / ||u||_{C^d}
  double delta = 0.0;
  bool converged = false;
};

inline VdcRatio vdc_bound_ratio(const std::vector<double>& t, const VdcAmplitude& u,
                                double c_norm, double gate_tol = 1e-8) {
  std::complex<double> base = vdc_model_integral(t, u, 1.0);
  std::complex<double> fine = vdc_model_integral(t, u, 1.5);
  VdcRatio out;
  out.value = fine;
  out.delta = std::abs(fine - base);
  out.converged = out.delta < gate_tol;
  double decay = 1.0;
  for (double ti : t) decay *= std::sqrt(1.0 + std::abs(ti));
  out.ratio = std::abs(fine) * decay / c_norm;
  return out;
}

inline VdcRatio vdc_bound_ratio(const std::vector<double>& t, const VdcAmplitude& u) {
  return vdc_bound_ratio(t, u, vdc_c_norm(u, u.dim));
}

}  // namespace sl3sph
