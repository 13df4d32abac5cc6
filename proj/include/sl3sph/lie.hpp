#pragma once

#include <array>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "sl3sph/mat3.hpp"

// Lie-algebra layer for sl(3, R) with the Cartan involution X -> -X^T.
// Conventions fixed across the library:
//   * Killing form B(X, Y) = 6 tr(XY).
//   * The split Cartan subalgebra is the diagonal, stored as sum-zero triples.
//   * Positive roots are indexed (0,1), (1,2), (0,2) in that order.
//   * norm(X) = sqrt(-B(X, theta X)), so norm(diag(1,0,-1)/sqrt(12)) = 1.
namespace sl3sph {

inline constexpr double kKillingScale = 6.0;

inline double killing_form(const Mat3& x, const Mat3& y) {
  return kKillingScale * trace_product(x, y);
}

inline Mat3 theta(const Mat3& x) { return -1.0 * transpose(x); }

struct CartanSplit {
  Mat3 k_part;  // antisymmetric, fixed by theta
  Mat3 p_part;  // symmetric, negated by theta
};

inline CartanSplit cartan_split(const Mat3& x) {
  Mat3 xt = transpose(x);
  return {0.5 * (x - xt), 0.5 * (x + xt)};
}

// sqrt(-B(X, theta X)) = sqrt(6 tr(X X^T)); positive definite on sl(3, R).
inline double lie_norm(const Mat3& x) {
  return std::sqrt(kKillingScale * trace_product(x, transpose(x)));
}

// Validated carrier for sl(3, R) elements at API boundaries.
struct TracelessMatrix {
  Mat3 mat;

  explicit TracelessMatrix(const Mat3& m) : mat(m) {
    if (std::abs(trace(m)) > 1e-12 * std::max(1.0, max_abs_entry(m)))
      throw std::invalid_argument("TracelessMatrix: trace not zero");
  }
  operator const Mat3&() const { return mat; }
};

// Sum-zero diagonal triple (element of the split Cartan subalgebra).
struct CartanVector {
  double h[3]{0.0, 0.0, 0.0};

  CartanVector() = default;
  CartanVector(double h1, double h2, double h3) : h{h1, h2, h3} {
    double scale = std::max({1.0, std::abs(h1), std::abs(h2), std::abs(h3)});
    if (std::abs(h1 + h2 + h3) > 1e-12 * scale)
      throw std::invalid_argument("CartanVector: components must sum to zero");
  }
  // Projects the triple onto the sum-zero hyperplane; for inputs that are
  // sum-zero up to roundoff this just removes the drift.
  static CartanVector project(double a, double b, double c) {
    double m = (a + b + c) / 3.0;
    return CartanVector(a - m, b - m, c - m);
  }
  double operator[](int i) const { return h[i]; }

  Mat3 diag() const { return Mat3::diagonal(h[0], h[1], h[2]); }
};

inline CartanVector operator+(const CartanVector& a, const CartanVector& b) {
  return CartanVector::project(a.h[0] + b.h[0], a.h[1] + b.h[1], a.h[2] + b.h[2]);
}
inline CartanVector operator-(const CartanVector& a, const CartanVector& b) {
  return CartanVector::project(a.h[0] - b.h[0], a.h[1] - b.h[1], a.h[2] - b.h[2]);
}
inline CartanVector operator*(double c, const CartanVector& a) {
  return CartanVector::project(c * a.h[0], c * a.h[1], c * a.h[2]);
}

inline double killing_form(const CartanVector& a, const CartanVector& b) {
  return kKillingScale * (a.h[0] * b.h[0] + a.h[1] * b.h[1] + a.h[2] * b.h[2]);
}
inline double lie_norm(const CartanVector& a) {
  return std::sqrt(killing_form(a, a));
}

// Root alpha_{ij}(H) = h_i - h_j, indices zero-based.
struct Root {
  int i = 0;
  int j = 1;

  Root() = default;
  Root(int i_, int j_) : i(i_), j(j_) {
    if (i < 0 || i > 2 || j < 0 || j > 2 || i == j)
      throw std::invalid_argument("Root: indices must be distinct in {0,1,2}");
  }
  bool positive() const { return i < j; }
  Root negated() const { return Root(j, i); }
  bool operator==(const Root& o) const { return i == o.i && j == o.j; }
};

inline double root_eval(const Root& a, const CartanVector& h) {
  return h.h[a.i] - h.h[a.j];
}

inline std::array<Root, 3> positive_roots() {
  return {Root(0, 1), Root(1, 2), Root(0, 2)};
}

// Coroot normalization: B(coroot(a), H) = a(H), so coroot(a_{ij}) = (e_i - e_j)/6
// and B(coroot, coroot) = 1/3.
inline CartanVector coroot(const Root& a) {
  double h[3] = {0.0, 0.0, 0.0};
  h[a.i] += 1.0 / kKillingScale;
  h[a.j] -= 1.0 / kKillingScale;
  return CartanVector(h[0], h[1], h[2]);
}

inline constexpr double kDefaultImagBound = 256.0;

// Spectral parameter: a complex-valued functional on the Cartan subalgebra,
// stored through its values l_i on the coordinate axes with sum zero. The
// imaginary part must stay inside a caller-declared bound.
struct SpectralParam {
  std::complex<double> l[3];
  double imag_bound = kDefaultImagBound;

  SpectralParam() : l{0.0, 0.0, 0.0} {}
  SpectralParam(std::complex<double> l1, std::complex<double> l2,
                std::complex<double> l3, double imag_bound_ = kDefaultImagBound)
      : l{l1, l2, l3}, imag_bound(imag_bound_) {
    double scale = std::max({1.0, std::abs(l1), std::abs(l2), std::abs(l3)});
    if (std::abs(l1 + l2 + l3) > 1e-14 * scale)
      throw std::invalid_argument("SpectralParam: components must sum to zero");
    for (const auto& c : l)
      if (std::abs(c.imag()) > imag_bound)
        throw std::invalid_argument("SpectralParam: imaginary part exceeds declared bound");
  }

  // Functional determined by B(dual, .): l = 6 * dual componentwise.
  static SpectralParam from_dual(const CartanVector& dual) {
    return SpectralParam(kKillingScale * dual.h[0], kKillingScale * dual.h[1],
                         kKillingScale * dual.h[2]);
  }
  // The half-sum of positive roots: rho(H) = h1 - h3.
  static SpectralParam rho() { return SpectralParam(1.0, 0.0, -1.0); }

  std::complex<double> eval(const CartanVector& h) const {
    return l[0] * h.h[0] + l[1] * h.h[1] + l[2] * h.h[2];
  }
  bool is_real(double tol = 1e-12) const {
    double scale = std::max({1.0, std::abs(l[0]), std::abs(l[1]), std::abs(l[2])});
    return std::abs(l[0].imag()) <= tol * scale &&
           std::abs(l[1].imag()) <= tol * scale && std::abs(l[2].imag()) <= tol * scale;
  }
};

// Unique H' with B(H', H) = lambda(H) for all H; requires a real parameter.
inline CartanVector dual_covector(const SpectralParam& lam) {
  if (!lam.is_real())
    throw std::invalid_argument("dual_covector: spectral parameter must be real");
  return CartanVector::project(lam.l[0].real() / kKillingScale,
                               lam.l[1].real() / kKillingScale,
                               lam.l[2].real() / kKillingScale);
}

inline std::complex<double> root_eval(const Root& a, const SpectralParam& lam) {
  return lam.l[a.i] - lam.l[a.j];
}

// Weyl group element: a permutation sigma of {0,1,2} together with the fixed
// signed-permutation representative in SO(3). Representative entries are +1,
// except that an odd permutation has the nonzero entry of column 0 negated to
// force determinant +1. The action on a diagonal triple is (sH)_i = h_{sigma^-1(i)}.
struct WeylElement {
  std::array<int, 3> sigma{0, 1, 2};  // images: sigma[i] is where index i goes
  Mat3 rep;

  static WeylElement from_permutation(const std::array<int, 3>& s) {
    WeylElement w;
    w.sigma = s;
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (s[i] > s[j]) ++inversions;
    for (int j = 0; j < 3; ++j) w.rep.m[s[j]][j] = 1.0;
    if (inversions % 2 == 1) w.rep.m[s[0]][0] = -1.0;
    return w;
  }

  std::array<int, 3> inverse_sigma() const {
    std::array<int, 3> inv{0, 0, 0};
    for (int i = 0; i < 3; ++i) inv[sigma[i]] = i;
    return inv;
  }
  WeylElement inverse() const { return from_permutation(inverse_sigma()); }
  WeylElement compose(const WeylElement& other) const {
    // (this * other)(i) = this(other(i))
    return from_permutation({sigma[other.sigma[0]], sigma[other.sigma[1]],
                             sigma[other.sigma[2]]});
  }
  bool is_identity() const { return sigma[0] == 0 && sigma[1] == 1 && sigma[2] == 2; }
  bool operator==(const WeylElement& o) const { return sigma == o.sigma; }
};

// All six elements, identity first, ordered lexicographically by one-line notation.
inline const std::array<WeylElement, 6>& weyl_elements() {
  static const std::array<WeylElement, 6> elems = {
      WeylElement::from_permutation({0, 1, 2}), WeylElement::from_permutation({0, 2, 1}),
      WeylElement::from_permutation({1, 0, 2}), WeylElement::from_permutation({1, 2, 0}),
      WeylElement::from_permutation({2, 0, 1}), WeylElement::from_permutation({2, 1, 0})};
  return elems;
}

inline CartanVector weyl_act(const WeylElement& s, const CartanVector& h) {
  auto inv = s.inverse_sigma();
  return CartanVector(h.h[inv[0]], h.h[inv[1]], h.h[inv[2]]);
}

inline SpectralParam weyl_act(const WeylElement& s, const SpectralParam& lam) {
  auto inv = s.inverse_sigma();
  return SpectralParam(lam.l[inv[0]], lam.l[inv[1]], lam.l[inv[2]], lam.imag_bound);
}

// Positive roots vanishing on H, relative to the scale of H.
inline std::vector<Root> singular_roots(const CartanVector& h, double tol = 1e-9) {
  double scale = std::max(1.0, lie_norm(h));
  std::vector<Root> out;
  for (const Root& a : positive_roots())
    if (std::abs(root_eval(a, h)) <= tol * scale) out.push_back(a);
  return out;
}

inline bool is_regular(const CartanVector& h, double tol = 1e-9) {
  return singular_roots(h, tol).empty();
}

// Decay-governing product over positive roots: prod (1 + |a(H) a(H')|).
inline double omega(const CartanVector& h, const CartanVector& hp) {
  double p = 1.0;
  for (const Root& a : positive_roots())
    p *= 1.0 + std::abs(root_eval(a, h) * root_eval(a, hp));
  return p;
}

// Orthonormal basis of the Cartan subalgebra under the Killing form.
inline std::array<CartanVector, 2> cartan_basis() {
  double c1 = 1.0 / std::sqrt(12.0);
  return {CartanVector(c1, 0.0, -c1), CartanVector(1.0 / 6.0, -2.0 / 6.0, 1.0 / 6.0)};
}

// Orthonormal basis of the rotation subalgebra: X_i = (E_ab - E_ba)/sqrt(12)
// for the positive roots in order; -B(X_i, theta X_j) = delta_ij.
inline const std::array<Mat3, 3>& k_basis() {
  static const std::array<Mat3, 3> basis = [] {
    std::array<Mat3, 3> out;
    double c = 1.0 / std::sqrt(12.0);
    auto roots = positive_roots();
    for (int n = 0; n < 3; ++n)
      out[n] = c * (Mat3::unit(roots[n].i, roots[n].j) - Mat3::unit(roots[n].j, roots[n].i));
    return out;
  }();
  return basis;
}

// Orthonormal basis of the off-diagonal symmetric part (the orthocomplement of
// the Cartan subalgebra inside the symmetric matrices), same root order.
inline const std::array<Mat3, 3>& q_basis() {
  static const std::array<Mat3, 3> basis = [] {
    std::array<Mat3, 3> out;
    double c = 1.0 / std::sqrt(12.0);
    auto roots = positive_roots();
    for (int n = 0; n < 3; ++n)
      out[n] = c * (Mat3::unit(roots[n].i, roots[n].j) + Mat3::unit(roots[n].j, roots[n].i));
    return out;
  }();
  return basis;
}

}  // namespace sl3sph
