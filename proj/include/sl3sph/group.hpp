#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "sl3sph/lie.hpp"
#include "sl3sph/mat3.hpp"

// Group layer: rotations, the unimodular ambient group, Iwasawa factorization.
namespace sl3sph {

struct Rotation {
  Mat3 r = Mat3::identity();

  Rotation() = default;

  static Rotation from_matrix(const Mat3& m) {
    Mat3 g = transpose(m) * m;
    Mat3 e = Mat3::identity();
    if (max_abs_entry(g - e) > 1e-12)
      throw std::invalid_argument("Rotation: matrix is not orthogonal");
    if (std::abs(det(m) - 1.0) > 1e-12)
      throw std::invalid_argument("Rotation: determinant must be +1");
    Rotation out;
    out.r = m;
    return out;
  }
  // For rotations produced internally by exact constructions; skips checks.
  static Rotation unchecked(const Mat3& m) {
    Rotation out;
    out.r = m;
    return out;
  }

  operator const Mat3&() const { return r; }
};

inline Rotation operator*(const Rotation& a, const Rotation& b) {
  return Rotation::unchecked(a.r * b.r);
}
inline Rotation inverse(const Rotation& a) { return Rotation::unchecked(transpose(a.r)); }

// Geodesic distance on the rotation group: the rotation angle of a^-1 b.
inline double rotation_angle_between(const Rotation& a, const Rotation& b) {
  double c = 0.5 * (trace_product(transpose(a.r), b.r) - 1.0);
  c = std::min(1.0, std::max(-1.0, c));
  return std::acos(c);
}

// ZYZ Euler angles: R_z(alpha) R_y(beta) R_z(gamma).
inline Rotation rotation_from_euler(double alpha, double beta, double gamma) {
  double ca = std::cos(alpha), sa = std::sin(alpha);
  double cb = std::cos(beta), sb = std::sin(beta);
  double cg = std::cos(gamma), sg = std::sin(gamma);
  Mat3 m;
  m.m[0][0] = ca * cb * cg - sa * sg;
  m.m[0][1] = -ca * cb * sg - sa * cg;
  m.m[0][2] = ca * sb;
  m.m[1][0] = sa * cb * cg + ca * sg;
  m.m[1][1] = -sa * cb * sg + ca * cg;
  m.m[1][2] = sa * sb;
  m.m[2][0] = -sb * cg;
  m.m[2][1] = sb * sg;
  m.m[2][2] = cb;
  return Rotation::unchecked(m);
}

// Rodrigues formula; input must be antisymmetric.
inline Rotation exp_so3(const Mat3& x) {
  if (max_abs_entry(x + transpose(x)) > 1e-12 * std::max(1.0, max_abs_entry(x)))
    throw std::invalid_argument("exp_so3: generator must be antisymmetric");
  double w1 = x.m[2][1], w2 = x.m[0][2], w3 = x.m[1][0];
  double th2 = w1 * w1 + w2 * w2 + w3 * w3;
  double th = std::sqrt(th2);
  double a, b;  // sin(th)/th and (1-cos(th))/th^2
  if (th < 1e-4) {
    a = 1.0 - th2 / 6.0 * (1.0 - th2 / 20.0);
    b = 0.5 * (1.0 - th2 / 12.0 * (1.0 - th2 / 30.0));
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  Mat3 out = Mat3::identity() + a * x + b * (x * x);
  return Rotation::unchecked(out);
}

inline Mat3 adjoint(const Rotation& k, const Mat3& x) {
  return k.r * x * transpose(k.r);
}

// Validated carrier for elements of the ambient unimodular group.
struct GroupElement {
  Mat3 g = Mat3::identity();

  GroupElement() = default;
  explicit GroupElement(const Mat3& m) : g(m) {
    double d = det(m);
    if (std::abs(d - 1.0) > 1e-10 * std::max(1.0, std::abs(d)))
      throw std::invalid_argument("GroupElement: determinant must be 1");
  }
  operator const Mat3&() const { return g; }
};

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  return GroupElement(a.g * b.g);
}

struct IwasawaFactors {
  Rotation k;
  CartanVector a_log;  // logs of the positive diagonal of the triangular factor
  Mat3 n;              // unipotent upper triangular
};

// Factor g = k a n by modified Gram-Schmidt on the columns of g. The
// triangular factor gets a positive diagonal, which pins the decomposition.
inline IwasawaFactors iwasawa_decomposition(const GroupElement& g) {
  Vec3 c[3];
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) c[j].x[i] = g.g.m[i][j];
  double r[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  Vec3 q[3];
  for (int j = 0; j < 3; ++j) {
    Vec3 v = c[j];
    for (int i = 0; i < j; ++i) {
      r[i][j] = dot(q[i], v);
      v = v - r[i][j] * q[i];
      // One reorthogonalization pass keeps the factor orthogonal to 1e-14.
      double corr = dot(q[i], v);
      v = v - corr * q[i];
      r[i][j] += corr;
    }
    r[j][j] = euclid_norm(v);
    if (r[j][j] <= 0.0)
      throw std::domain_error("iwasawa_decomposition: rank-deficient input");
    q[j] = (1.0 / r[j][j]) * v;
  }
  IwasawaFactors out;
  Mat3 km;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) km.m[i][j] = q[j].x[i];
  out.k = Rotation::unchecked(km);
  out.a_log = CartanVector::project(std::log(r[0][0]), std::log(r[1][1]), std::log(r[2][2]));
  out.n = Mat3::identity();
  out.n.m[0][1] = r[0][1] / r[0][0];
  out.n.m[0][2] = r[0][2] / r[0][0];
  out.n.m[1][2] = r[1][2] / r[1][1];
  return out;
}

inline CartanVector iwasawa_projection(const GroupElement& g) {
  return iwasawa_decomposition(g).a_log;
}

// exp of a Cartan vector followed by a rotation: the g = exp(H) k elements the
// oscillatory integrals run over.
inline GroupElement cartan_exp_times(const CartanVector& h, const Rotation& k) {
  Mat3 d = Mat3::diagonal(std::exp(h.h[0]), std::exp(h.h[1]), std::exp(h.h[2]));
  return GroupElement(d * k.r);
}

// The four diagonal sign matrices with determinant +1 (the group M).
inline const std::array<Rotation, 4>& m_elements() {
  static const std::array<Rotation, 4> elems = {
      Rotation::unchecked(Mat3::diagonal(1, 1, 1)),
      Rotation::unchecked(Mat3::diagonal(1, -1, -1)),
      Rotation::unchecked(Mat3::diagonal(-1, 1, -1)),
      Rotation::unchecked(Mat3::diagonal(-1, -1, 1))};
  return elems;
}

// The 24 signed permutation matrices with determinant +1 (the group M'),
// enumerated as Weyl representative times M element, deterministic order.
inline const std::array<Rotation, 24>& m_prime_elements() {
  static const std::array<Rotation, 24> elems = [] {
    std::array<Rotation, 24> out;
    int n = 0;
    for (const WeylElement& w : weyl_elements())
      for (const Rotation& m : m_elements())
        out[n++] = Rotation::unchecked(w.rep * m.r);
    return out;
  }();
  return elems;
}

// Weyl class of a signed permutation rotation (nearest M' element's class).
inline WeylElement weyl_class_of(const Rotation& k, double tol = 1e-6) {
  for (const WeylElement& w : weyl_elements())
    for (const Rotation& m : m_elements())
      if (rotation_angle_between(k, Rotation::unchecked(w.rep * m.r)) <= tol) return w;
  throw std::domain_error("weyl_class_of: rotation is not near a signed permutation");
}

}  // namespace sl3sph
