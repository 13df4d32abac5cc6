#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "sl3sph/group.hpp"

// Haar-measure quadrature on the rotation group: Gauss-Legendre in cos(beta)
// tensored with uniform periodic grids in the two Euler z-angles.
namespace sl3sph {

// Deterministic pairwise summation: the reduction tree depends only on the
// number of addends, never on blocking or thread count.
template <typename T>
class PairwiseAccumulator {
 public:
  void add(T v) {
    std::size_t lvl = 0;
    while (lvl < slots_.size() && occupied_[lvl]) {
      v = slots_[lvl] + v;
      occupied_[lvl] = false;
      ++lvl;
    }
    if (lvl == slots_.size()) {
      slots_.push_back(v);
      occupied_.push_back(true);
    } else {
      slots_[lvl] = v;
      occupied_[lvl] = true;
    }
  }
  T total() const {
    T s{};
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (occupied_[i]) s = s + slots_[i];
    return s;
  }

 private:
  std::vector<T> slots_;
  std::vector<bool> occupied_;
};

struct GaussLegendre {
  std::vector<double> nodes;    // ascending in (-1, 1)
  std::vector<double> weights;  // sum to 2 exactly up to roundoff
};

// Newton iteration on the Legendre recurrence; standard and deterministic.
inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // One final refinement after convergence, then recompute dp.
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;  // initial guesses start from the +1 end; mirror to ascending
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

inline constexpr int kQuadratureCacheVersion = 1;

// Product rule for normalized Haar measure in ZYZ Euler coordinates:
// dk = sin(beta)/(8 pi^2) dalpha dbeta dgamma. Gauss-Legendre in u = cos(beta)
// (n_beta points) and uniform periodic grids of n_ag points in alpha and gamma.
// Node weights are u_weight/(2 n_ag^2), so the total mass is exactly 1.
struct QuadratureRule {
  int n_beta = 0;
  int n_ag = 0;
  std::vector<double> u_nodes;
  std::vector<double> u_weights;

  std::size_t node_count() const {
    return static_cast<std::size_t>(n_beta) * n_ag * n_ag;
  }
  // Linear index layout: ((i_beta * n_ag) + i_alpha) * n_ag + i_gamma.
  Rotation node(std::size_t idx) const {
    const double two_pi = 2.0 * std::acos(-1.0);
    std::size_t ig = idx % n_ag;
    std::size_t ia = (idx / n_ag) % n_ag;
    std::size_t ib = idx / (static_cast<std::size_t>(n_ag) * n_ag);
    double beta = std::acos(std::min(1.0, std::max(-1.0, u_nodes[ib])));
    return rotation_from_euler(two_pi * ia / n_ag, beta, two_pi * ig / n_ag);
  }
  double weight(std::size_t idx) const {
    std::size_t ib = idx / (static_cast<std::size_t>(n_ag) * n_ag);
    return u_weights[ib] / (2.0 * n_ag * n_ag);
  }
  double weight_sum() const {
    PairwiseAccumulator<double> acc;
    for (double w : u_weights) acc.add(w * n_ag * n_ag / (2.0 * n_ag * n_ag));
    return acc.total();
  }
};

inline QuadratureRule haar_product_rule(int n_beta, int n_ag) {
  if (n_beta < 2 || n_ag < 2)
    throw std::invalid_argument("haar_product_rule: grid sizes must be at least 2");
  GaussLegendre gl = gauss_legendre(n_beta);
  QuadratureRule rule;
  rule.n_beta = n_beta;
  rule.n_ag = n_ag;
  rule.u_nodes = std::move(gl.nodes);
  rule.u_weights = std::move(gl.weights);
  return rule;
}

// Visits nodes in linear-index order with per-axis trig precomputed. The
// callback receives the rotation and its weight.
template <typename F>
void for_each_node(const QuadratureRule& rule, F&& f) {
  const double two_pi = 2.0 * std::acos(-1.0);
  const int nag = rule.n_ag;
  std::vector<double> ca(nag), sa(nag);
  for (int i = 0; i < nag; ++i) {
    ca[i] = std::cos(two_pi * i / nag);
    sa[i] = std::sin(two_pi * i / nag);
  }
  for (int ib = 0; ib < rule.n_beta; ++ib) {
    double cb = std::min(1.0, std::max(-1.0, rule.u_nodes[ib]));
    double sb = std::sqrt(std::max(0.0, 1.0 - cb * cb));
    double w = rule.u_weights[ib] / (2.0 * nag * nag);
    for (int ia = 0; ia < nag; ++ia) {
      for (int ig = 0; ig < nag; ++ig) {
        Mat3 m;
        m.m[0][0] = ca[ia] * cb * ca[ig] - sa[ia] * sa[ig];
        m.m[0][1] = -ca[ia] * cb * sa[ig] - sa[ia] * ca[ig];
        m.m[0][2] = ca[ia] * sb;
        m.m[1][0] = sa[ia] * cb * ca[ig] + ca[ia] * sa[ig];
        m.m[1][1] = -sa[ia] * cb * sa[ig] + ca[ia] * ca[ig];
        m.m[1][2] = sa[ia] * sb;
        m.m[2][0] = -sb * ca[ig];
        m.m[2][1] = sb * sa[ig];
        m.m[2][2] = cb;
        f(Rotation::unchecked(m), w);
      }
    }
  }
}

// Haar integral of f over the rotation group with deterministic reduction.
template <typename F>
auto integrate(F&& f, const QuadratureRule& rule)
    -> std::decay_t<decltype(f(std::declval<const Rotation&>()))> {
  using R = std::decay_t<decltype(f(std::declval<const Rotation&>()))>;
  PairwiseAccumulator<R> acc;
  for_each_node(rule, [&](const Rotation& k, double w) { acc.add(w * f(k)); });
  return acc.total();
}

inline nlohmann::json quadrature_rule_to_json(const QuadratureRule& rule) {
  nlohmann::json j;
  j["version"] = kQuadratureCacheVersion;
  j["kind"] = "so3-haar-product";
  j["n_beta"] = rule.n_beta;
  j["n_ag"] = rule.n_ag;
  j["u_nodes"] = rule.u_nodes;
  j["u_weights"] = rule.u_weights;
  return j;
}

inline QuadratureRule quadrature_rule_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j["version"].get<int>() != kQuadratureCacheVersion)
    throw std::runtime_error("quadrature cache: version mismatch");
  if (j.value("kind", "") != std::string("so3-haar-product"))
    throw std::runtime_error("quadrature cache: unknown kind");
  QuadratureRule rule;
  rule.n_beta = j.at("n_beta").get<int>();
  rule.n_ag = j.at("n_ag").get<int>();
  rule.u_nodes = j.at("u_nodes").get<std::vector<double>>();
  rule.u_weights = j.at("u_weights").get<std::vector<double>>();
  if (static_cast<int>(rule.u_nodes.size()) != rule.n_beta ||
      static_cast<int>(rule.u_weights.size()) != rule.n_beta)
    throw std::runtime_error("quadrature cache: inconsistent array sizes");
  if (std::abs(rule.weight_sum() - 1.0) > 1e-13)
    throw std::runtime_error("quadrature cache: weights do not sum to 1");
  return rule;
}

// Disk cache keyed by the grid sizes; a hit must match version and key.
inline QuadratureRule load_or_build_rule(int n_beta, int n_ag,
                                         const std::filesystem::path& cache_dir) {
  namespace fs = std::filesystem;
  fs::path file = cache_dir / ("haar_" + std::to_string(n_beta) + "_" +
                               std::to_string(n_ag) + ".json");
  if (fs::exists(file)) {
    std::ifstream in(file);
    nlohmann::json j;
    in >> j;
    QuadratureRule rule = quadrature_rule_from_json(j);
    if (rule.n_beta != n_beta || rule.n_ag != n_ag)
      throw std::runtime_error("quadrature cache: key mismatch in " + file.string());
    return rule;
  }
  QuadratureRule rule = haar_product_rule(n_beta, n_ag);
  fs::create_directories(cache_dir);
  std::ofstream out(file);
  out << quadrature_rule_to_json(rule).dump();
  return rule;
}

}  // namespace sl3sph
