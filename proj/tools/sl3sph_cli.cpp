// Command-line front end: spherical-function evaluation, decay-bound scans,
// critical-point inventories, Hessian tables, the model oscillatory integral,
// the substitution solver, the orthogonality checks, and the full verification
// suite. Reports are CSV or JSON plus optional SVG decay plots; outputs are
// byte-identical for identical configuration.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sl3sph/sl3sph.hpp"

namespace {

using nlohmann::json;
using namespace sl3sph;

constexpr int kConfigVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand = "scan";
  std::vector<std::array<double, 3>> h_dirs = {{1.0, 0.0, -1.0}};
  std::vector<double> h_mags = {0.5};
  std::vector<std::array<double, 3>> lam_dirs = {{1.0, 0.0, -1.0}};
  std::vector<double> lam_mags = {0.0, 1.0, 2.0, 5.0, 10.0};
  int n_beta = 128;
  int n_ag = 256;
  double gate_tol = 1e-8;
  double singular_tol = 1e-9;
  double solver_tol = 1e-10;
  std::uint64_t seed = 947251u;
  int samples = 20;
  std::vector<int> dims = {1, 2, 3};
  std::string out = "report";
  std::string format = "csv";
  std::string plot;

  bool operator==(const RunConfig&) const = default;
};

json config_to_json(const RunConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  j["subcommand"] = cfg.subcommand;
  j["h_directions"] = cfg.h_dirs;
  j["h_magnitudes"] = cfg.h_mags;
  j["lam_directions"] = cfg.lam_dirs;
  j["lam_magnitudes"] = cfg.lam_mags;
  j["n_beta"] = cfg.n_beta;
  j["n_ag"] = cfg.n_ag;
  j["gate_tol"] = cfg.gate_tol;
  j["singular_tol"] = cfg.singular_tol;
  j["solver_tol"] = cfg.solver_tol;
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["dims"] = cfg.dims;
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  j["plot"] = cfg.plot;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  if (!j.contains("version") || j.at("version").get<int>() != kConfigVersion)
    throw ConfigError("config: missing or unsupported version (expected 1)");
  RunConfig cfg;
  try {
    j.at("subcommand").get_to(cfg.subcommand);
    j.at("h_directions").get_to(cfg.h_dirs);
    j.at("h_magnitudes").get_to(cfg.h_mags);
    j.at("lam_directions").get_to(cfg.lam_dirs);
    j.at("lam_magnitudes").get_to(cfg.lam_mags);
    j.at("n_beta").get_to(cfg.n_beta);
    j.at("n_ag").get_to(cfg.n_ag);
    j.at("gate_tol").get_to(cfg.gate_tol);
    j.at("singular_tol").get_to(cfg.singular_tol);
    j.at("solver_tol").get_to(cfg.solver_tol);
    j.at("seed").get_to(cfg.seed);
    j.at("samples").get_to(cfg.samples);
    j.at("dims").get_to(cfg.dims);
    j.at("out").get_to(cfg.out);
    j.at("format").get_to(cfg.format);
    j.at("plot").get_to(cfg.plot);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

const std::vector<std::string>& known_subcommands() {
  static const std::vector<std::string> subs = {"eval",       "scan",   "critical",
                                                "hessian",    "vdc",    "duistermaat",
                                                "lemmas",     "all"};
  return subs;
}

void validate(const RunConfig& cfg) {
  bool known = false;
  for (const std::string& s : known_subcommands()) known = known || s == cfg.subcommand;
  if (!known) throw ConfigError("config: unknown subcommand '" + cfg.subcommand + "'");
  if (cfg.h_dirs.empty() || cfg.h_mags.empty() || cfg.lam_dirs.empty() ||
      cfg.lam_mags.empty())
    throw ConfigError("config: grids must be nonempty");
  if (cfg.n_beta < 2 || cfg.n_ag < 2)
    throw ConfigError("config: rule sizes must be at least 2");
  if (!(cfg.gate_tol > 0.0) || !(cfg.singular_tol > 0.0) || !(cfg.solver_tol > 0.0))
    throw ConfigError("config: tolerances must be positive");
  if (cfg.samples < 1) throw ConfigError("config: samples must be positive");
  if (cfg.dims.empty()) throw ConfigError("config: dims must be nonempty");
  for (int d : cfg.dims)
    if (d < 1 || d > 3) throw ConfigError("config: dims entries must be 1, 2, or 3");
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("config: format must be csv or json");
  if (!cfg.plot.empty() && cfg.subcommand != "scan")
    throw ConfigError("config: --plot is only supported by the scan subcommand");
  for (const auto& d : cfg.h_dirs)
    if (std::abs(d[0] + d[1] + d[2]) > 1e-9 * std::max(1.0, std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2])))
      throw ConfigError("config: H directions must sum to zero");
  for (const auto& d : cfg.lam_dirs)
    if (std::abs(d[0] + d[1] + d[2]) > 1e-9 * std::max(1.0, std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2])))
      throw ConfigError("config: spectral directions must sum to zero");
}

CartanVector to_cartan(const std::array<double, 3>& d, double mag) {
  return CartanVector::project(mag * d[0], mag * d[1], mag * d[2]);
}

std::vector<CartanVector> h_grid(const RunConfig& cfg) {
  std::vector<CartanVector> out;
  for (const auto& d : cfg.h_dirs)
    for (double m : cfg.h_mags) out.push_back(to_cartan(d, m));
  return out;
}

std::vector<CartanVector> lam_grid(const RunConfig& cfg) {
  std::vector<CartanVector> out;
  for (const auto& d : cfg.lam_dirs)
    for (double m : cfg.lam_mags) out.push_back(to_cartan(d, m));
  return out;
}

std::string weyl_name(const WeylElement& s) {
  std::string out;
  for (int i = 0; i < 3; ++i) out += static_cast<char>('0' + s.sigma[i]);
  return out;
}

std::filesystem::path out_path(const RunConfig& cfg) {
  return cfg.out + (cfg.format == "csv" ? ".csv" : ".json");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

void print_status(const RunConfig& cfg, std::size_t rows) {
  json j;
  j["status"] = "ok";
  j["subcommand"] = cfg.subcommand;
  j["rows"] = rows;
  j["out"] = out_path(cfg).string();
  std::cout << j.dump() << "\n";
}

int gate_failure(const RunConfig& cfg, std::size_t unconverged, double worst_delta) {
  json j;
  j["status"] = "gate-failure";
  j["subcommand"] = cfg.subcommand;
  j["unconverged"] = unconverged;
  j["worst_delta"] = worst_delta;
  j["gate_tol"] = cfg.gate_tol;
  j["out"] = out_path(cfg).string();
  std::cout << j.dump() << "\n";
  return 2;
}

json cartan_json(const CartanVector& v) { return json::array({v.h[0], v.h[1], v.h[2]}); }

// Shared JSON report shell. Embedding the effective configuration makes any
// JSON report reproducible by feeding its run_config block back via --config.
json report_shell(const RunConfig& cfg) {
  json j;
  j["version"] = kReportVersion;
  j["subcommand"] = cfg.subcommand;
  j["run_config"] = config_to_json(cfg);
  return j;
}

// ---- eval ------------------------------------------------------------------

int run_eval(const RunConfig& cfg) {
  QuadratureRule rule = haar_product_rule(cfg.n_beta, cfg.n_ag);
  std::vector<CartanVector> hs = h_grid(cfg);
  std::vector<CartanVector> duals = lam_grid(cfg);
  std::vector<SpectralParam> lams;
  for (const CartanVector& d : duals) lams.push_back(SpectralParam::from_dual(d));

  std::size_t unconverged = 0;
  double worst_delta = 0.0;
  std::ostringstream csv;
  csv << "h1,h2,h3,l1,l2,l3,re_phi,im_phi,delta,converged\n";
  json rows = json::array();
  for (const CartanVector& h : hs) {
    auto vals = spherical_function_batch_gated(h, lams, rule, cfg.gate_tol);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const GatedValue& v = vals[i];
      if (!v.converged) ++unconverged;
      worst_delta = std::max(worst_delta, v.delta);
      csv << format_double(h.h[0]) << ',' << format_double(h.h[1]) << ','
          << format_double(h.h[2]) << ',' << format_double(duals[i].h[0]) << ','
          << format_double(duals[i].h[1]) << ',' << format_double(duals[i].h[2]) << ','
          << format_double(v.value.real()) << ',' << format_double(v.value.imag()) << ','
          << format_double(v.delta) << ',' << (v.converged ? 1 : 0) << "\n";
      json row;
      row["h"] = cartan_json(h);
      row["lam_dual"] = cartan_json(duals[i]);
      row["re_phi"] = v.value.real();
      row["im_phi"] = v.value.imag();
      row["delta"] = v.delta;
      row["converged"] = v.converged;
      rows.push_back(row);
    }
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["rows"] = rows;
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  if (unconverged > 0) return gate_failure(cfg, unconverged, worst_delta);
  print_status(cfg, hs.size() * lams.size());
  return 0;
}

// ---- scan ------------------------------------------------------------------

int run_scan(const RunConfig& cfg) {
  ScanConfig sc;
  sc.h_points = h_grid(cfg);
  for (const auto& d : cfg.lam_dirs)
    sc.lam_directions.push_back(to_cartan(d, 1.0));
  sc.t_values = cfg.lam_mags;
  sc.n_beta = cfg.n_beta;
  sc.n_ag = cfg.n_ag;
  sc.gate_tol = cfg.gate_tol;
  sc.singular_tol = cfg.singular_tol;
  BoundReport rep = bound_scan(sc);
  if (cfg.format == "csv") {
    std::ostringstream os;
    write_bound_report_csv(rep, os);
    write_text(out_path(cfg), os.str());
  } else {
    json j = bound_report_to_json(rep);
    j["run_config"] = config_to_json(cfg);
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  // Gate status first: a failed gate must not be shadowed by the plot
  // refusing an all-unconverged report.
  if (rep.unconverged_count > 0)
    return gate_failure(cfg, rep.unconverged_count, rep.worst_gate_delta);
  if (!cfg.plot.empty()) emit_plot(rep, cfg.plot);
  print_status(cfg, rep.rows.size());
  return 0;
}

// ---- critical --------------------------------------------------------------

int run_critical(const RunConfig& cfg) {
  CriticalPointConfig pc;
  pc.singular_tol = cfg.singular_tol;
  pc.seed_offset = cfg.seed;
  std::ostringstream csv;
  csv << "h1,h2,h3,hp1,hp2,hp3,k11,k12,k13,k21,k22,k23,k31,k32,k33,"
         "residual,mprime_dist,in_mprime,weyl,coset_dist,dim,ev1,ev2,ev3\n";
  json blocks = json::array();
  std::size_t rows = 0;
  for (const CartanVector& h : h_grid(cfg)) {
    for (const CartanVector& hp : lam_grid(cfg)) {
      json block;
      block["h"] = cartan_json(h);
      block["hp"] = cartan_json(hp);
      if (lie_norm(h) < 1e-12 || lie_norm(hp) < 1e-12) {
        block["degenerate"] = true;
        block["points"] = json::array();
        blocks.push_back(block);
        continue;
      }
      CriticalPointSet set = find_critical_points(PhaseContext(h, hp), pc);
      block["degenerate"] = set.degenerate;
      json pts = json::array();
      for (const CriticalPointRecord& rec : set.points) {
        ++rows;
        for (int c = 0; c < 6; ++c)
          csv << format_double(c < 3 ? h.h[c] : hp.h[c - 3]) << ',';
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) csv << format_double(rec.k.r.m[r][c]) << ',';
        csv << format_double(rec.residual) << ',' << format_double(rec.m_prime_distance)
            << ',' << (rec.in_m_prime ? 1 : 0) << ',' << weyl_name(rec.weyl_tag) << ','
            << format_double(rec.coset_distance) << ',' << rec.manifold_dim << ','
            << format_double(rec.hessian_eigenvalues.x[0]) << ','
            << format_double(rec.hessian_eigenvalues.x[1]) << ','
            << format_double(rec.hessian_eigenvalues.x[2]) << "\n";
        json p;
        p["k"] = json::array();
        for (int r = 0; r < 3; ++r)
          p["k"].push_back(json::array(
              {rec.k.r.m[r][0], rec.k.r.m[r][1], rec.k.r.m[r][2]}));
        p["residual"] = rec.residual;
        p["m_prime_distance"] = rec.m_prime_distance;
        p["in_m_prime"] = rec.in_m_prime;
        p["weyl"] = weyl_name(rec.weyl_tag);
        p["coset_distance"] = rec.coset_distance;
        p["dim"] = rec.manifold_dim;
        p["hessian_eigenvalues"] = json::array({rec.hessian_eigenvalues.x[0],
                                                rec.hessian_eigenvalues.x[1],
                                                rec.hessian_eigenvalues.x[2]});
        pts.push_back(p);
      }
      block["points"] = pts;
      block["nonconverged_seeds"] = set.nonconverged_seeds;
      blocks.push_back(block);
    }
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["pairs"] = blocks;
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  print_status(cfg, rows);
  return 0;
}

// ---- hessian ---------------------------------------------------------------

int run_hessian(const RunConfig& cfg) {
  std::ostringstream csv;
  csv << "h1,h2,h3,hp1,hp2,hp3,weyl,ev1,ev2,ev3,pred1,pred2,pred3,"
         "max_rel_err,fd_defect\n";
  json rows = json::array();
  std::size_t count = 0;
  for (const CartanVector& h : h_grid(cfg)) {
    for (const CartanVector& hp : lam_grid(cfg)) {
      PhaseContext ctx(h, hp);
      for (const Rotation& m : m_prime_elements()) {
        WeylElement s = weyl_class_of(m);
        Mat3 hess = phase_hessian(ctx, m);
        Vec3 got = symmetric_eigen(hess).values;
        Vec3 want = predicted_m_prime_eigenvalues(h, hp, s);
        std::sort(want.x, want.x + 3);
        double rel = 0.0;
        for (int i = 0; i < 3; ++i)
          rel = std::max(rel, std::abs(got.x[i] - want.x[i]) /
                                  std::max(1e-12, std::abs(want.x[i])));
        double fd = max_abs_entry(phase_hessian_fd(ctx, m) - hess);
        ++count;
        for (int c = 0; c < 6; ++c)
          csv << format_double(c < 3 ? h.h[c] : hp.h[c - 3]) << ',';
        csv << weyl_name(s) << ',';
        for (int i = 0; i < 3; ++i) csv << format_double(got.x[i]) << ',';
        for (int i = 0; i < 3; ++i) csv << format_double(want.x[i]) << ',';
        csv << format_double(rel) << ',' << format_double(fd) << "\n";
        json row;
        row["h"] = cartan_json(h);
        row["hp"] = cartan_json(hp);
        row["weyl"] = weyl_name(s);
        row["eigenvalues"] = json::array({got.x[0], got.x[1], got.x[2]});
        row["predicted"] = json::array({want.x[0], want.x[1], want.x[2]});
        row["max_rel_err"] = rel;
        row["fd_defect"] = fd;
        rows.push_back(row);
      }
    }
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["rows"] = rows;
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  print_status(cfg, count);
  return 0;
}

// ---- vdc -------------------------------------------------------------------

int run_vdc(const RunConfig& cfg) {
  std::ostringstream csv;
  csv << "dim,t,re,im,ratio,delta,converged\n";
  json rows = json::array();
  std::size_t unconverged = 0;
  double worst_delta = 0.0;
  for (int d : cfg.dims) {
    VdcAmplitude u = vdc_default_bump(d);
    double cn = vdc_c_norm(u, d);
    for (double t : cfg.lam_mags) {
      std::vector<double> tv(static_cast<std::size_t>(d), t);
      VdcRatio r = vdc_bound_ratio(tv, u, cn, cfg.gate_tol);
      if (!r.converged) ++unconverged;
      worst_delta = std::max(worst_delta, r.delta);
      csv << d << ',' << format_double(t) << ',' << format_double(r.value.real()) << ','
          << format_double(r.value.imag()) << ',' << format_double(r.ratio) << ','
          << format_double(r.delta) << ',' << (r.converged ? 1 : 0) << "\n";
      json row;
      row["dim"] = d;
      row["t"] = t;
      row["re"] = r.value.real();
      row["im"] = r.value.imag();
      row["ratio"] = r.ratio;
      row["delta"] = r.delta;
      row["converged"] = r.converged;
      rows.push_back(row);
    }
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["rows"] = rows;
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  if (unconverged > 0) return gate_failure(cfg, unconverged, worst_delta);
  print_status(cfg, rows.size());
  return 0;
}

// ---- duistermaat -----------------------------------------------------------

int run_duistermaat(const RunConfig& cfg) {
  GaussianSampler sampler(cfg.seed);
  std::ostringstream csv;
  csv << "y11,y22,y33,y12,y13,y23,residual,converged,last_scale,step_angle\n";
  json rows = json::array();
  std::size_t failures = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    Mat3 y = sampler.symmetric_traceless(2.0);
    DuistermaatSolution sol = duistermaat_solve(y, cfg.solver_tol);
    if (!sol.converged) ++failures;
    csv << format_double(y.m[0][0]) << ',' << format_double(y.m[1][1]) << ','
        << format_double(y.m[2][2]) << ',' << format_double(y.m[0][1]) << ','
        << format_double(y.m[0][2]) << ',' << format_double(y.m[1][2]) << ','
        << format_double(sol.residual) << ',' << (sol.converged ? 1 : 0) << ','
        << format_double(sol.last_good_scale) << ','
        << format_double(sol.max_step_angle) << "\n";
    json row;
    row["y"] = json::array({y.m[0][0], y.m[1][1], y.m[2][2], y.m[0][1], y.m[0][2],
                            y.m[1][2]});
    row["residual"] = sol.residual;
    row["converged"] = sol.converged;
    row["last_scale"] = sol.last_good_scale;
    row["step_angle"] = sol.max_step_angle;
    rows.push_back(row);
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["rows"] = rows;
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  if (failures > 0) {
    json j;
    j["status"] = "solver-failure";
    j["subcommand"] = cfg.subcommand;
    j["failures"] = failures;
    j["out"] = out_path(cfg).string();
    std::cout << j.dump() << "\n";
    return 2;
  }
  print_status(cfg, rows.size());
  return 0;
}

// ---- lemmas ----------------------------------------------------------------

int run_lemmas(const RunConfig& cfg) {
  std::ostringstream csv;
  csv << "h1,h2,h3,wall,max_orthogonal,min_inplane,zero_count,zero_deviation,"
         "mprime_angle\n";
  json rows = json::array();
  for (const CartanVector& h : h_grid(cfg)) {
    OrthogonalityReport orth = lemma42_check(h, 64, cfg.singular_tol);
    CircleZeroReport circ = lemma45_check(h, 512, cfg.singular_tol);
    std::string wall = std::to_string(orth.wall.i + 1) + std::to_string(orth.wall.j + 1);
    csv << format_double(h.h[0]) << ',' << format_double(h.h[1]) << ','
        << format_double(h.h[2]) << ',' << wall << ','
        << format_double(orth.max_orthogonal_abs) << ','
        << format_double(orth.min_generic_inplane) << ',' << circ.zero_count << ','
        << format_double(circ.max_zero_deviation) << ','
        << format_double(circ.max_m_prime_angle) << "\n";
    json row;
    row["h"] = cartan_json(h);
    row["wall"] = wall;
    row["max_orthogonal"] = orth.max_orthogonal_abs;
    row["min_inplane"] = orth.min_generic_inplane;
    row["zero_count"] = circ.zero_count;
    row["zero_deviation"] = circ.max_zero_deviation;
    row["mprime_angle"] = circ.max_m_prime_angle;
    rows.push_back(row);
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["rows"] = rows;
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  print_status(cfg, rows.size());
  return 0;
}

// ---- all (verification suite) ----------------------------------------------

int run_all(const RunConfig& cfg, bool nbeta_set, bool nag_set) {
  VerificationConfig vc;
  vc.seed = cfg.seed;
  vc.gate_tol = cfg.gate_tol;
  if (nbeta_set) vc.n_beta = vc.scan_n_beta = cfg.n_beta;
  if (nag_set) vc.n_ag = vc.scan_n_ag = cfg.n_ag;
  VerificationSuite suite(vc);
  std::ostringstream csv;
  csv << "index,name,pass,detail\n";
  json rows = json::array();
  bool all_pass = true;
  auto results = suite.run_all([&](const CriterionResult& res) {
    std::cout << "criterion " << (res.index < 10 ? "0" : "") << res.index << " "
              << res.name << ": " << (res.pass ? "PASS" : "FAIL") << " - " << res.detail
              << "\n";
    std::cout.flush();
  });
  for (const CriterionResult& res : results) {
    all_pass = all_pass && res.pass;
    std::string detail = res.detail;
    for (char& c : detail)
      if (c == ',') c = ';';
    csv << res.index << ',' << res.name << ',' << (res.pass ? 1 : 0) << ',' << detail
        << "\n";
    json row;
    row["index"] = res.index;
    row["name"] = res.name;
    row["pass"] = res.pass;
    row["gate_failed"] = res.gate_failed;
    row["detail"] = res.detail;
    rows.push_back(row);
  }
  if (cfg.format == "csv") {
    write_text(out_path(cfg), csv.str());
  } else {
    json j = report_shell(cfg);
    j["criteria"] = rows;
    j["gate_values"] = suite.gate_values();
    j["gate_failures"] = suite.gate_failures();
    write_text(out_path(cfg), j.dump(2) + "\n");
  }
  if (suite.gate_failures() > 0)
    return gate_failure(cfg, suite.gate_failures(), suite.gate_worst_delta());
  if (!all_pass) {
    json j;
    j["status"] = "verification-failure";
    j["subcommand"] = "all";
    j["out"] = out_path(cfg).string();
    std::cout << j.dump() << "\n";
    return 2;
  }
  print_status(cfg, results.size());
  return 0;
}

int dispatch(const RunConfig& cfg, bool nbeta_set, bool nag_set) {
  if (cfg.subcommand == "eval") return run_eval(cfg);
  if (cfg.subcommand == "scan") return run_scan(cfg);
  if (cfg.subcommand == "critical") return run_critical(cfg);
  if (cfg.subcommand == "hessian") return run_hessian(cfg);
  if (cfg.subcommand == "vdc") return run_vdc(cfg);
  if (cfg.subcommand == "duistermaat") return run_duistermaat(cfg);
  if (cfg.subcommand == "lemmas") return run_lemmas(cfg);
  if (cfg.subcommand == "all") return run_all(cfg, nbeta_set, nag_set);
  throw ConfigError("unknown subcommand " + cfg.subcommand);
}

std::array<double, 3> parse_triple(const std::string& s) {
  std::array<double, 3> out{};
  std::istringstream is(s);
  std::string tok;
  int n = 0;
  while (std::getline(is, tok, ',')) {
    if (n >= 3) throw ConfigError("direction needs exactly three components: " + s);
    try {
      out[static_cast<std::size_t>(n++)] = std::stod(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad direction component '" + tok + "'");
    }
  }
  if (n != 3) throw ConfigError("direction needs exactly three components: " + s);
  return out;
}

int config_error(const std::string& message) {
  json j;
  j["status"] = "config-error";
  j["message"] = message;
  std::cout << j.dump() << "\n";
  return 3;
}

int io_error(const std::string& message) {
  json j;
  j["status"] = "io-error";
  j["message"] = message;
  std::cout << j.dump() << "\n";
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical-function decay toolkit for the 3x3 special linear group"};
  app.require_subcommand(1);

  std::vector<std::string> h_dir_flags, lam_dir_flags;
  std::vector<double> h_mags_flag, lam_mags_flag;
  std::vector<int> dims_flag;
  int nbeta_flag = 0, nag_flag = 0, samples_flag = 0;
  double tol_flag = 0.0;
  std::uint64_t seed_flag = 0;
  std::string out_flag, format_flag, plot_flag, config_path;

  auto* o_hdir = app.add_option("--h-dir", h_dir_flags,
                                "group-argument direction a,b,c (repeatable, sums to 0)");
  auto* o_hmag = app.add_option("--h-mags", h_mags_flag, "group-argument magnitudes")
                     ->delimiter(',');
  auto* o_ldir = app.add_option("--lam-dir", lam_dir_flags,
                                "spectral direction a,b,c (repeatable, sums to 0)");
  auto* o_lmag = app.add_option("--lam-mags", lam_mags_flag,
                                "spectral magnitudes (scan/vdc range)")
                     ->delimiter(',');
  auto* o_nbeta = app.add_option("--nbeta", nbeta_flag, "Gauss-Legendre nodes in beta");
  auto* o_nag = app.add_option("--nag", nag_flag, "periodic nodes in alpha and gamma");
  auto* o_tol = app.add_option("--tol", tol_flag, "refinement gate tolerance");
  auto* o_out = app.add_option("--out", out_flag, "output path stem");
  auto* o_seed = app.add_option("--seed", seed_flag, "sampling seed");
  auto* o_fmt = app.add_option("--format", format_flag, "report format: csv or json");
  auto* o_plot = app.add_option("--plot", plot_flag, "SVG decay plot path (scan only)");
  auto* o_samp = app.add_option("--samples", samples_flag, "random sample count");
  auto* o_dims = app.add_option("--dims", dims_flag, "model-integral dimensions")
                     ->delimiter(',');
  app.add_option("--config", config_path, "versioned JSON config file");

  static const std::map<std::string, std::string> sub_help = {
      {"eval", "gated spherical-function values on the H x lambda grid"},
      {"scan", "decay scan: |phi| against the uniform and classical bounds"},
      {"critical", "critical points of the pairing phase per H x H' pair"},
      {"hessian", "Hessian eigenvalues at the signed permutations"},
      {"vdc", "model oscillatory integral and its normalized ratio"},
      {"duistermaat", "substitution-map solves on random symmetric inputs"},
      {"lemmas", "centralizer orthogonality and circle-zero checks at a wall"},
      {"all", "full verification suite, one line per criterion"}};
  for (const std::string& name : known_subcommands())
    app.add_subcommand(name, sub_help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_error(e.what());
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot read config file " + config_path);
      json j;
      try {
        j = json::parse(is);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
      }
      cfg = config_from_json(j);
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (o_hdir->count() > 0) {
      cfg.h_dirs.clear();
      for (const std::string& s : h_dir_flags) cfg.h_dirs.push_back(parse_triple(s));
    }
    if (o_hmag->count() > 0) cfg.h_mags = h_mags_flag;
    if (o_ldir->count() > 0) {
      cfg.lam_dirs.clear();
      for (const std::string& s : lam_dir_flags) cfg.lam_dirs.push_back(parse_triple(s));
    }
    if (o_lmag->count() > 0) cfg.lam_mags = lam_mags_flag;
    if (o_nbeta->count() > 0) cfg.n_beta = nbeta_flag;
    if (o_nag->count() > 0) cfg.n_ag = nag_flag;
    if (o_tol->count() > 0) cfg.gate_tol = tol_flag;
    if (o_out->count() > 0) cfg.out = out_flag;
    if (o_seed->count() > 0) cfg.seed = seed_flag;
    if (o_fmt->count() > 0) cfg.format = format_flag;
    if (o_plot->count() > 0) cfg.plot = plot_flag;
    if (o_samp->count() > 0) cfg.samples = samples_flag;
    if (o_dims->count() > 0) cfg.dims = dims_flag;
    validate(cfg);
    return dispatch(cfg, o_nbeta->count() > 0, o_nag->count() > 0);
  } catch (const ConfigError& e) {
    return config_error(e.what());
  } catch (const std::invalid_argument& e) {
    return config_error(e.what());
  } catch (const std::exception& e) {
    return io_error(e.what());
  }
}
