#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sl3sph/report.hpp"

using namespace sl3sph;
using cd = std::complex<double>;

namespace {

BoundReport sample_report() {
  BoundReport rep;
  rep.config.h_points = {CartanVector(0.25, 0.25, -0.5)};
  rep.config.lam_directions = {CartanVector(0.5, 0.0, -0.5)};
  rep.config.t_values = {1.0, 10.0};
  rep.config.n_beta = 8;
  rep.config.n_ag = 8;
  for (int n = 0; n < 2; ++n) {
    ScanRow row;
    row.h_index = 0;
    row.ray_index = 0;
    row.t = rep.config.t_values[n];
    row.h = rep.config.h_points[0];
    row.lam_dual = row.t * rep.config.lam_directions[0];
    row.phi = cd(0.191 / (n + 1.0), -0.013 * (n + 1.0));
    row.converged = true;
    row.bound_new = 1.25 / (n + 1.0);
    row.bound_old = 2.5 / (n + 1.0);
    row.ratio = std::abs(row.phi) / row.bound_new;
    rep.rows.push_back(row);
  }
  RayFit fit;
  fit.points_used = 2;
  fit.slope_phi = -1.43;
  fit.slope_new = -1.0;
  fit.slope_old = -1.5;
  rep.fits.push_back(fit);
  rep.empirical_constant = rep.rows[0].ratio;
  rep.unconverged_count = 0;
  rep.worst_gate_delta = 3.5e-10;
  return rep;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scan csv column order is pinned") {
  REQUIRE(std::string(kScanCsvHeader) ==
          "h1,h2,h3,l1,l2,l3,re_phi,im_phi,new_bound,old_bound,ratio,converged");
}

TEST_CASE("doubles are printed with round-trip precision") {
  for (double v : {1.0 / 3.0, 3.5e-10, -0.0017, 6.0, 1e300}) {
    std::string s = format_double(v);
    REQUIRE(std::stod(s) == v);
  }
}

TEST_CASE("csv emission is stable and parseable") {
  BoundReport rep = sample_report();
  std::ostringstream first, second;
  write_bound_report_csv(rep, first);
  write_bound_report_csv(rep, second);
  REQUIRE(first.str() == second.str());

  std::istringstream in(first.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == kScanCsvHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    REQUIRE(count_occurrences(line, ",") == 11);
    ++rows;
  }
  REQUIRE(rows == rep.rows.size());

  // First data field round-trips to the stored coordinate.
  std::istringstream again(first.str());
  std::getline(again, line);
  std::getline(again, line);
  REQUIRE(std::stod(line.substr(0, line.find(','))) == rep.rows[0].h[0]);
}

TEST_CASE("json report carries version, rows, fits, and gate data") {
  BoundReport rep = sample_report();
  nlohmann::json j = bound_report_to_json(rep);
  REQUIRE(j["version"].get<int>() == kReportVersion);
  REQUIRE(j["rows"].size() == rep.rows.size());
  REQUIRE(j["fits"].size() == rep.fits.size());
  REQUIRE(j["rows"][0]["re_phi"].get<double>() == rep.rows[0].phi.real());
  REQUIRE(j["rows"][1]["im_phi"].get<double>() == rep.rows[1].phi.imag());
  REQUIRE(j["rows"][0]["converged"].get<bool>());
  REQUIRE(j["worst_gate_delta"].get<double>() == rep.worst_gate_delta);
  REQUIRE(j["unconverged_count"].get<std::size_t>() == 0);
  REQUIRE(j["config"]["n_beta"].get<int>() == 8);
  REQUIRE(j["config"]["h_points"].size() == 1);
  REQUIRE(j["fits"][0]["slope_phi"].get<double>() == rep.fits[0].slope_phi);
  // Serialized text is deterministic.
  REQUIRE(j.dump() == bound_report_to_json(rep).dump());
}

TEST_CASE("plot emission writes svg and refuses empty reports") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "sl3sph_report_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  BoundReport empty;
  fs::path missing = dir / "empty.svg";
  REQUIRE_THROWS_AS(emit_plot(empty, missing), std::invalid_argument);
  REQUIRE_FALSE(fs::exists(missing));

  BoundReport rep = sample_report();
  fs::path out = dir / "plot.svg";
  emit_plot(rep, out);
  REQUIRE(fs::exists(out));
  std::string svg = read_file(out);
  REQUIRE(svg.rfind("<?xml", 0) == 0);
  REQUIRE(count_occurrences(svg, "<svg") == 1);
  REQUIRE(count_occurrences(svg, "</svg>") == 1);
  // One series triple per (position, ray) group: value and both bounds.
  REQUIRE(count_occurrences(svg, "<polyline") == 3);

  emit_plot(rep, dir / "plot2.svg");
  REQUIRE(read_file(dir / "plot2.svg") == svg);
  fs::remove_all(dir);
}
