#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sl3sph/spherical.hpp"

// Serialization of scan reports: CSV rows, a versioned JSON document, and a
// static SVG log-log decay plot. All emitters format deterministically so
// identical inputs produce byte-identical files.
namespace sl3sph {

inline constexpr int kReportVersion = 1;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* kScanCsvHeader =
    "h1,h2,h3,l1,l2,l3,re_phi,im_phi,new_bound,old_bound,ratio,converged";

inline void write_bound_report_csv(const BoundReport& rep, std::ostream& os) {
  os << kScanCsvHeader << "\n";
  for (const ScanRow& row : rep.rows) {
    os << format_double(row.h[0]) << ',' << format_double(row.h[1]) << ','
       << format_double(row.h[2]) << ',' << format_double(row.lam_dual[0]) << ','
       << format_double(row.lam_dual[1]) << ',' << format_double(row.lam_dual[2]) << ','
       << format_double(row.phi.real()) << ',' << format_double(row.phi.imag()) << ','
       << format_double(row.bound_new) << ',' << format_double(row.bound_old) << ','
       << format_double(row.ratio) << ',' << (row.converged ? 1 : 0) << "\n";
  }
}

inline nlohmann::json cartan_to_json(const CartanVector& v) {
  return nlohmann::json::array({v[0], v[1], v[2]});
}

inline nlohmann::json bound_report_to_json(const BoundReport& rep) {
  nlohmann::json j;
  j["version"] = kReportVersion;
  nlohmann::json cfg;
  cfg["n_beta"] = rep.config.n_beta;
  cfg["n_ag"] = rep.config.n_ag;
  cfg["gate_tol"] = rep.config.gate_tol;
  cfg["singular_tol"] = rep.config.singular_tol;
  cfg["slope_t_min"] = rep.config.slope_t_min;
  cfg["t_values"] = rep.config.t_values;
  cfg["h_points"] = nlohmann::json::array();
  for (const auto& h : rep.config.h_points) cfg["h_points"].push_back(cartan_to_json(h));
  cfg["lam_directions"] = nlohmann::json::array();
  for (const auto& d : rep.config.lam_directions)
    cfg["lam_directions"].push_back(cartan_to_json(d));
  j["config"] = cfg;
  j["rows"] = nlohmann::json::array();
  for (const ScanRow& row : rep.rows) {
    nlohmann::json r;
    r["h_index"] = row.h_index;
    r["ray_index"] = row.ray_index;
    r["t"] = row.t;
    r["h"] = cartan_to_json(row.h);
    r["lam_dual"] = cartan_to_json(row.lam_dual);
    r["re_phi"] = row.phi.real();
    r["im_phi"] = row.phi.imag();
    r["new_bound"] = row.bound_new;
    r["old_bound"] = row.bound_old;
    r["ratio"] = row.ratio;
    r["converged"] = row.converged;
    j["rows"].push_back(r);
  }
  j["fits"] = nlohmann::json::array();
  for (const RayFit& f : rep.fits) {
    nlohmann::json r;
    r["h_index"] = f.h_index;
    r["ray_index"] = f.ray_index;
    r["points_used"] = f.points_used;
    r["slope_phi"] = f.slope_phi;
    r["slope_new"] = f.slope_new;
    r["slope_old"] = f.slope_old;
    j["fits"].push_back(r);
  }
  j["empirical_constant"] = rep.empirical_constant;
  j["unconverged_count"] = rep.unconverged_count;
  j["worst_gate_delta"] = rep.worst_gate_delta;
  return j;
}

namespace detail {

struct PlotSeries {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;  // (log10 t, log10 y)
};

}  // namespace detail

// Static log-log SVG of |phi| against both bounds, one curve set per (H, ray).
// Refuses empty reports; no file is created in that case.
inline void emit_plot(const BoundReport& rep, const std::filesystem::path& path) {
  static const char* palette[] = {"#1b6ca8", "#c03a2b", "#1e8449", "#8e44ad",
                                  "#b7950b", "#34495e"};
  std::vector<detail::PlotSeries> series;
  std::map<std::pair<int, int>, std::vector<const ScanRow*>> groups;
  for (const ScanRow& row : rep.rows)
    if (row.t > 0.0 && row.converged && std::abs(row.phi) > 0.0)
      groups[{row.h_index, row.ray_index}].push_back(&row);
  int color_idx = 0;
  for (const auto& [key, rows] : groups) {
    if (rows.size() < 2) continue;
    std::string color = palette[color_idx++ % 6];
    std::string tag = "h" + std::to_string(key.first) + "r" + std::to_string(key.second);
    detail::PlotSeries phi{"|phi| " + tag, color, false, {}};
    detail::PlotSeries nb{"uniform " + tag, color, true, {}};
    detail::PlotSeries ob{"classical " + tag, color, true, {}};
    for (const ScanRow* row : rows) {
      double lt = std::log10(row->t);
      phi.pts.emplace_back(lt, std::log10(std::abs(row->phi)));
      nb.pts.emplace_back(lt, std::log10(row->bound_new));
      ob.pts.emplace_back(lt, std::log10(row->bound_old));
    }
    series.push_back(phi);
    series.push_back(nb);
    series.push_back(ob);
  }
  if (series.empty())
    throw std::invalid_argument("emit_plot: report has no plottable rows");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
  const double w = 860.0, h = 560.0, ml = 70.0, mr = 220.0, mt = 30.0, mb = 50.0;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
  std::ofstream os(path);
  if (!os) throw std::runtime_error("emit_plot: cannot open " + path.string());
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr)
     << "\" height=\"" << (h - mt - mb)
     << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    os << "<line x1=\"" << px(d) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(d)
       << "\" y2=\"" << py(ymax) << "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
    os << "<text x=\"" << px(d) << "\" y=\"" << h - mb + 18
       << "\" font-size=\"11\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    os << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(d) << "\" x2=\"" << px(xmax)
       << "\" y2=\"" << py(d) << "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << py(d) + 4
       << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  os << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << h - 10
     << "\" font-size=\"12\" text-anchor=\"middle\">spectral magnitude t</text>\n";
  double ly = mt + 14;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
       << (s.dashed ? "1" : "1.8") << "\"";
    if (s.dashed) os << " stroke-dasharray=\"5,4\"";
    os << " points=\"";
    for (const auto& [x, y] : s.pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    os << "<line x1=\"" << w - mr + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << w - mr + 40
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\""
       << (s.dashed ? "1" : "1.8") << "\"";
    if (s.dashed) os << " stroke-dasharray=\"5,4\"";
    os << "/>\n";
    os << "<text x=\"" << w - mr + 46 << "\" y=\"" << ly
       << "\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
}

}  // namespace sl3sph
