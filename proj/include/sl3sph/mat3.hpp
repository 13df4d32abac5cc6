#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace sl3sph {

struct Vec3 {
  double x[3]{0.0, 0.0, 0.0};

  double& operator[](std::size_t i) { return x[i]; }
  double operator[](std::size_t i) const { return x[i]; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x[0] + b.x[0], a.x[1] + b.x[1], a.x[2] + b.x[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x[0] - b.x[0], a.x[1] - b.x[1], a.x[2] - b.x[2]};
}
inline Vec3 operator*(double c, const Vec3& a) {
  return {c * a.x[0], c * a.x[1], c * a.x[2]};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2];
}
inline double euclid_norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Row-major dense 3x3 real matrix. Small enough that everything stays by value.
struct Mat3 {
  double m[3][3]{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

  double* operator[](std::size_t r) { return m[r]; }
  const double* operator[](std::size_t r) const { return m[r]; }

  static Mat3 identity() {
    Mat3 e;
    e.m[0][0] = e.m[1][1] = e.m[2][2] = 1.0;
    return e;
  }
  static Mat3 diagonal(double a, double b, double c) {
    Mat3 d;
    d.m[0][0] = a;
    d.m[1][1] = b;
    d.m[2][2] = c;
    return d;
  }
  // Elementary matrix with a single 1 at (i, j), zero-based.
  static Mat3 unit(std::size_t i, std::size_t j) {
    Mat3 e;
    e.m[i][j] = 1.0;
    return e;
  }
};

inline Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
  return r;
}
inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
  return r;
}
inline Mat3 operator*(double c, const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = c * a.m[i][j];
  return r;
}
inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
      r.m[i][j] = s;
    }
  return r;
}
inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r.x[i] = a.m[i][0] * v.x[0] + a.m[i][1] * v.x[1] + a.m[i][2] * v.x[2];
  return r;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
  return r;
}
inline double trace(const Mat3& a) { return a.m[0][0] + a.m[1][1] + a.m[2][2]; }
inline double det(const Mat3& a) {
  return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
         a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
         a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}
inline double trace_product(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a.m[i][j] * b.m[j][i];
  return s;
}
inline Mat3 commutator(const Mat3& a, const Mat3& b) { return a * b - b * a; }

inline double max_abs_entry(const Mat3& a) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a.m[i][j]));
  return m;
}
inline double frobenius(const Mat3& a) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a.m[i][j] * a.m[i][j];
  return std::sqrt(s);
}

struct SymmetricEigen {
  Vec3 values;  // ascending
  Mat3 vectors; // columns are eigenvectors, orthonormal
};

// Cyclic Jacobi for symmetric 3x3. Converges to machine precision in a few
// sweeps; deterministic sweep order keeps results reproducible.
inline SymmetricEigen symmetric_eigen(const Mat3& a_in) {
  Mat3 a = a_in;
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(a.m[0][1]) + std::abs(a.m[0][2]) + std::abs(a.m[1][2]);
    if (off == 0.0) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        double apq = a.m[p][q];
        if (apq == 0.0) continue;
        double theta = (a.m[q][q] - a.m[p][p]) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < 3; ++k) {
          double akp = a.m[k][p], akq = a.m[k][q];
          a.m[k][p] = c * akp - s * akq;
          a.m[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          double apk = a.m[p][k], aqk = a.m[q][k];
          a.m[p][k] = c * apk - s * aqk;
          a.m[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          double vkp = v.m[k][p], vkq = v.m[k][q];
          v.m[k][p] = c * vkp - s * vkq;
          v.m[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::array<int, 3> order{0, 1, 2};
  for (int i = 0; i < 2; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (a.m[order[j]][order[j]] < a.m[order[i]][order[i]]) std::swap(order[i], order[j]);
  SymmetricEigen out;
  for (int i = 0; i < 3; ++i) {
    out.values.x[i] = a.m[order[i]][order[i]];
    for (int k = 0; k < 3; ++k) out.vectors.m[k][i] = v.m[k][order[i]];
  }
  return out;
}

// exp of a symmetric matrix through its eigendecomposition.
inline Mat3 exp_symmetric(const Mat3& a) {
  SymmetricEigen e = symmetric_eigen(a);
  Mat3 d = Mat3::diagonal(std::exp(e.values.x[0]), std::exp(e.values.x[1]),
                          std::exp(e.values.x[2]));
  return e.vectors * d * transpose(e.vectors);
}

// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
// Throws if the pivot collapses; callers that expect near-singular systems
// should use solve3_least_squares instead.
inline Vec3 solve3(Mat3 a, Vec3 b) {
  int piv[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int best = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a.m[r][col]) > std::abs(a.m[best][col])) best = r;
    if (best != col) {
      for (int j = 0; j < 3; ++j) std::swap(a.m[col][j], a.m[best][j]);
      std::swap(b.x[col], b.x[best]);
      std::swap(piv[col], piv[best]);
    }
    if (std::abs(a.m[col][col]) < 1e-300)
      throw std::domain_error("solve3: singular system");
    for (int r = col + 1; r < 3; ++r) {
      double f = a.m[r][col] / a.m[col][col];
      for (int j = col; j < 3; ++j) a.m[r][j] -= f * a.m[col][j];
      b.x[r] -= f * b.x[col];
    }
  }
  Vec3 x;
  for (int r = 2; r >= 0; --r) {
    double s = b.x[r];
    for (int j = r + 1; j < 3; ++j) s -= a.m[r][j] * x.x[j];
    x.x[r] = s / a.m[r][r];
  }
  return x;
}

// Minimum-norm least-squares solution of a (possibly rank-deficient) symmetric
// system, used by solvers that walk along positive-dimensional solution sets.
inline Vec3 solve3_least_squares(const Mat3& a, const Vec3& b, double rel_cutoff) {
  SymmetricEigen e = symmetric_eigen(a);
  double scale = std::max({std::abs(e.values.x[0]), std::abs(e.values.x[1]),
                           std::abs(e.values.x[2])});
  double cut = rel_cutoff * std::max(scale, 1e-300);
  Vec3 bt;
  for (int i = 0; i < 3; ++i) {
    bt.x[i] = 0.0;
    for (int k = 0; k < 3; ++k) bt.x[i] += e.vectors.m[k][i] * b.x[k];
  }
  Vec3 y;
  for (int i = 0; i < 3; ++i)
    y.x[i] = std::abs(e.values.x[i]) > cut ? bt.x[i] / e.values.x[i] : 0.0;
  Vec3 x;
  for (int k = 0; k < 3; ++k) {
    x.x[k] = 0.0;
    for (int i = 0; i < 3; ++i) x.x[k] += e.vectors.m[k][i] * y.x[i];
  }
  return x;
}

}  // namespace sl3sph
