#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sl3sph/group.hpp"
#include "sl3sph/sampling.hpp"

using namespace sl3sph;
using Catch::Approx;

namespace {

const double kPi = std::acos(-1.0);

// Unimodular matrix with normal entries; rejects near-singular draws.
GroupElement random_unimodular(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Mat3 g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g.m[i][j] = n(rng);
    double d = det(g);
    if (std::abs(d) < 0.05) continue;
    return GroupElement((1.0 / std::cbrt(d)) * g);
  }
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return rotation_from_euler(2.0 * kPi * u(rng), std::acos(2.0 * u(rng) - 1.0),
                             2.0 * kPi * u(rng));
}

}  // namespace

TEST_CASE("rotation exponential closed forms") {
  Mat3 l01 = Mat3::unit(0, 1) - Mat3::unit(1, 0);
  Rotation quarter = exp_so3((kPi / 2.0) * l01);
  Mat3 want;
  want.m[0][1] = 1.0;
  want.m[1][0] = -1.0;
  want.m[2][2] = 1.0;
  REQUIRE(max_abs_entry(quarter.r - want) < 1e-15);

  // Small angles against the truncated series.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Mat3 x;
    x.m[0][1] = 1e-5 * n(rng);
    x.m[0][2] = 1e-5 * n(rng);
    x.m[1][2] = 1e-5 * n(rng);
    x.m[1][0] = -x.m[0][1];
    x.m[2][0] = -x.m[0][2];
    x.m[2][1] = -x.m[1][2];
    Mat3 series = Mat3::identity() + x + 0.5 * (x * x) + (1.0 / 6.0) * (x * x * x);
    REQUIRE(max_abs_entry(exp_so3(x).r - series) < 1e-15);
  }

  // One-parameter group property along a fixed axis.
  Rotation a = exp_so3(0.3 * l01);
  Rotation b = exp_so3(1.1 * l01);
  Rotation ab = exp_so3(1.4 * l01);
  REQUIRE(max_abs_entry((a * b).r - ab.r) < 1e-14);

  REQUIRE_THROWS_AS(exp_so3(Mat3::unit(0, 1)), std::invalid_argument);
}

TEST_CASE("euler angles compose three axis rotations") {
  Mat3 lz = Mat3::unit(1, 0) - Mat3::unit(0, 1);
  Mat3 ly = Mat3::unit(0, 2) - Mat3::unit(2, 0);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 10; ++trial) {
    double alpha = u(rng), beta = 0.5 * u(rng), gamma = u(rng);
    Rotation r = rotation_from_euler(alpha, beta, gamma);
    Mat3 want = exp_so3(alpha * lz).r * exp_so3(beta * ly).r * exp_so3(gamma * lz).r;
    REQUIRE(max_abs_entry(r.r - want) < 1e-14);
    REQUIRE(max_abs_entry(transpose(r.r) * r.r - Mat3::identity()) < 1e-14);
    REQUIRE(det(r.r) == Approx(1.0).margin(1e-14));
  }
}

TEST_CASE("rotation carrier validates") {
  REQUIRE_THROWS_AS(Rotation::from_matrix(Mat3::diagonal(1, 1, 2)), std::invalid_argument);
  REQUIRE_THROWS_AS(Rotation::from_matrix(Mat3::diagonal(1, 1, -1)), std::invalid_argument);
  REQUIRE_NOTHROW(Rotation::from_matrix(Mat3::identity()));
  REQUIRE_THROWS_AS(GroupElement(Mat3::diagonal(1, 1, 2)), std::invalid_argument);
}

TEST_CASE("iwasawa factors reconstruct the group element") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    GroupElement g = random_unimodular(rng);
    IwasawaFactors f = iwasawa_decomposition(g);
    Mat3 a = Mat3::diagonal(std::exp(f.a_log[0]), std::exp(f.a_log[1]),
                            std::exp(f.a_log[2]));
    double scale = std::max(1.0, max_abs_entry(g.g));
    REQUIRE(max_abs_entry(f.k.r * a * f.n - g.g) < 1e-12 * scale);
    REQUIRE(max_abs_entry(transpose(f.k.r) * f.k.r - Mat3::identity()) < 1e-13);
    REQUIRE(det(f.k.r) == Approx(1.0).margin(1e-12));
    // Unipotent upper triangular factor: exact unit diagonal, zero below.
    REQUIRE(f.n.m[0][0] == 1.0);
    REQUIRE(f.n.m[1][1] == 1.0);
    REQUIRE(f.n.m[2][2] == 1.0);
    REQUIRE(f.n.m[1][0] == 0.0);
    REQUIRE(f.n.m[2][0] == 0.0);
    REQUIRE(f.n.m[2][1] == 0.0);
    REQUIRE(std::abs(f.a_log[0] + f.a_log[1] + f.a_log[2]) < 1e-14);
  }

  // Strongly anisotropic input keeps the factorization backward stable.
  CartanVector h(6.0, 0.0, -6.0);
  std::mt19937_64 rng2(24);
  for (int trial = 0; trial < 20; ++trial) {
    GroupElement g = cartan_exp_times(h, random_rotation(rng2));
    IwasawaFactors f = iwasawa_decomposition(g);
    Mat3 a = Mat3::diagonal(std::exp(f.a_log[0]), std::exp(f.a_log[1]),
                            std::exp(f.a_log[2]));
    REQUIRE(max_abs_entry(f.k.r * a * f.n - g.g) < 1e-11 * max_abs_entry(g.g));
  }
}

TEST_CASE("projection is invariant under left rotations") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    GroupElement g = random_unimodular(rng);
    Rotation k = random_rotation(rng);
    CartanVector base = iwasawa_projection(g);
    CartanVector moved = iwasawa_projection(GroupElement(k.r * g.g));
    double scale = std::max(1.0, lie_norm(base));
    for (int i = 0; i < 3; ++i)
      REQUIRE(std::abs(moved[i] - base[i]) < 1e-12 * scale);
  }
}

TEST_CASE("sign matrices pass through the projection") {
  CartanVector h(0.4, 0.1, -0.5);
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 25; ++trial) {
    Rotation k = random_rotation(rng);
    CartanVector base = iwasawa_projection(cartan_exp_times(h, k));
    for (const Rotation& m : m_elements()) {
      Rotation mk = Rotation::unchecked(m.r * k.r);
      CartanVector moved = iwasawa_projection(cartan_exp_times(h, mk));
      for (int i = 0; i < 3; ++i) REQUIRE(std::abs(moved[i] - base[i]) < 1e-13);
    }
  }
}

TEST_CASE("projection round trips on pure factors") {
  CartanVector h(1.2, -0.3, -0.9);
  CartanVector back = iwasawa_projection(cartan_exp_times(h, Rotation()));
  for (int i = 0; i < 3; ++i) REQUIRE(back[i] == Approx(h[i]).margin(1e-14));
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    CartanVector zero = iwasawa_projection(GroupElement(random_rotation(rng).r));
    REQUIRE(lie_norm(zero) < 1e-13);
  }
}

TEST_CASE("adjoint action is orthogonal for the killing form") {
  std::mt19937_64 rng(28);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Rotation a = random_rotation(rng);
    Rotation b = random_rotation(rng);
    Mat3 x;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) x.m[i][j] = n(rng);
    double t = trace(x) / 3.0;
    for (int i = 0; i < 3; ++i) x.m[i][i] -= t;
    Mat3 y;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) y.m[i][j] = n(rng);
    t = trace(y) / 3.0;
    for (int i = 0; i < 3; ++i) y.m[i][i] -= t;

    REQUIRE(max_abs_entry(adjoint(a, adjoint(b, x)) - adjoint(a * b, x)) < 1e-13);
    REQUIRE(killing_form(adjoint(a, x), adjoint(a, y)) ==
            Approx(killing_form(x, y)).margin(1e-11));
    Mat3 anti = 0.5 * (x - transpose(x));
    Mat3 moved = adjoint(a, anti);
    REQUIRE(max_abs_entry(moved + transpose(moved)) < 1e-14);
  }
}

TEST_CASE("geodesic angle between rotations") {
  Mat3 l01 = Mat3::unit(0, 1) - Mat3::unit(1, 0);
  Rotation r = exp_so3(1.0 * l01);
  REQUIRE(rotation_angle_between(r, r) < 1e-7);
  REQUIRE(rotation_angle_between(Rotation(), r) == Approx(1.0).margin(1e-7));
  REQUIRE(rotation_angle_between(r, Rotation()) == Approx(1.0).margin(1e-7));
  Rotation half = exp_so3(kPi * l01);
  REQUIRE(rotation_angle_between(Rotation(), half) == Approx(kPi).margin(1e-6));
}

TEST_CASE("sign subgroup and signed permutations") {
  const auto& ms = m_elements();
  REQUIRE(ms.size() == 4);
  for (const Rotation& m : ms) {
    REQUIRE(det(m.r) == 1.0);
    REQUIRE(max_abs_entry(m.r * m.r - Mat3::identity()) == 0.0);
    // Closure: every product is again one of the four.
    for (const Rotation& m2 : ms) {
      bool found = false;
      for (const Rotation& m3 : ms)
        if (max_abs_entry(m.r * m2.r - m3.r) == 0.0) found = true;
      REQUIRE(found);
    }
  }

  const auto& mp = m_prime_elements();
  REQUIRE(mp.size() == 24);
  for (std::size_t i = 0; i < mp.size(); ++i) {
    REQUIRE(det(mp[i].r) == Approx(1.0).margin(1e-15));
    REQUIRE(max_abs_entry(transpose(mp[i].r) * mp[i].r - Mat3::identity()) < 1e-15);
    for (std::size_t j = i + 1; j < mp.size(); ++j)
      REQUIRE(max_abs_entry(mp[i].r - mp[j].r) > 0.5);
  }

  for (const WeylElement& w : weyl_elements())
    for (const Rotation& m : ms) {
      WeylElement got = weyl_class_of(Rotation::unchecked(w.rep * m.r));
      REQUIRE(got == w);
    }
  REQUIRE_THROWS_AS(weyl_class_of(rotation_from_euler(0.4, 0.7, 1.1)),
                    std::domain_error);
}
