#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sl3sph_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path capture = work_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
  std::string cmd = std::string(SL3SPH_CLI_PATH) + " " + args + " > " +
                    capture.string() + " 2>&1";
  int ret = std::system(cmd.c_str());
  CmdResult res;
  if (ret != -1 && WIFEXITED(ret)) res.code = WEXITSTATUS(ret);
  std::ifstream in(capture, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  res.out = ss.str();
  return res;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

std::string status_of(const CmdResult& res) {
  auto ls = lines_of(res.out);
  if (ls.empty()) return "";
  json j = json::parse(ls.back(), nullptr, false);
  if (j.is_discarded() || !j.contains("status")) return "";
  return j["status"].get<std::string>();
}

json default_config() {
  json j;
  j["version"] = 1;
  j["subcommand"] = "eval";
  j["h_directions"] = json::array({json::array({1.0, 0.0, -1.0})});
  j["h_magnitudes"] = json::array({0.0});
  j["lam_directions"] = json::array({json::array({1.0, 0.0, -1.0})});
  j["lam_magnitudes"] = json::array({0.0, 1.0});
  j["n_beta"] = 8;
  j["n_ag"] = 8;
  j["gate_tol"] = 1e-8;
  j["singular_tol"] = 1e-9;
  j["solver_tol"] = 1e-10;
  j["seed"] = 947251;
  j["samples"] = 5;
  j["dims"] = json::array({1});
  j["out"] = (work_dir() / "from_config").string();
  j["format"] = "csv";
  j["plot"] = "";
  return j;
}

}  // namespace

TEST_CASE("help and malformed invocations") {
  REQUIRE(run_cli("--help").code == 0);
  REQUIRE(run_cli("--help").out.find("--h-dir") != std::string::npos);

  CmdResult none = run_cli("");
  REQUIRE(none.code == 3);
  REQUIRE(status_of(none) == "config-error");

  REQUIRE(run_cli("bogus-subcommand").code == 3);
  REQUIRE(run_cli("eval --no-such-flag 3").code == 3);

  CmdResult bad_dir = run_cli("eval --h-dir 1,1,1");
  REQUIRE(bad_dir.code == 3);
  REQUIRE(status_of(bad_dir) == "config-error");
  REQUIRE(run_cli("eval --h-dir 1,2").code == 3);
  REQUIRE(run_cli("eval --nbeta 1").code == 3);
  REQUIRE(run_cli("eval --tol 0").code == 3);
  REQUIRE(run_cli("eval --format yaml").code == 3);

  // The decay plot only attaches to the scan tabulation.
  REQUIRE(run_cli("eval --plot " + (work_dir() / "x.svg").string()).code == 3);
}

TEST_CASE("eval writes unit values at the group identity") {
  fs::path stem = work_dir() / "eval_origin";
  CmdResult res = run_cli(
      "eval --h-dir 1,0,-1 --h-mags 0 --lam-dir 1,0,-1 --lam-mags 0,1,2 "
      "--nbeta 8 --nag 8 --out " + stem.string());
  REQUIRE(res.code == 0);
  REQUIRE(status_of(res) == "ok");
  std::string csv = read_file(stem.string() + ".csv");
  auto ls = lines_of(csv);
  REQUIRE(ls.size() == 4);
  REQUIRE(ls[0] == "h1,h2,h3,l1,l2,l3,re_phi,im_phi,delta,converged");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::istringstream row(ls[i]);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 10);
    REQUIRE(std::stod(fields[6]) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::stod(fields[7]) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(fields[9] == "1");
  }
}

TEST_CASE("identical configurations produce identical bytes") {
  std::string common =
      " --h-dir 1,0,-1 --h-mags 0.5 --lam-dir 1,0,-1 --lam-mags 0,1 "
      "--nbeta 32 --nag 48 --format csv --out ";
  fs::path a = work_dir() / "det_a";
  fs::path b = work_dir() / "det_b";
  REQUIRE(run_cli("eval" + common + a.string()).code == 0);
  REQUIRE(run_cli("eval" + common + b.string()).code == 0);
  REQUIRE(read_file(a.string() + ".csv") == read_file(b.string() + ".csv"));

  fs::path sa = work_dir() / "det_scan_a";
  fs::path sb = work_dir() / "det_scan_b";
  REQUIRE(run_cli("scan" + common + sa.string()).code == 0);
  REQUIRE(run_cli("scan" + common + sb.string()).code == 0);
  std::string scan_csv = read_file(sa.string() + ".csv");
  REQUIRE(scan_csv == read_file(sb.string() + ".csv"));
  REQUIRE(lines_of(scan_csv)[0] ==
          "h1,h2,h3,l1,l2,l3,re_phi,im_phi,new_bound,old_bound,ratio,converged");
}

TEST_CASE("scan emits json reports and svg plots") {
  fs::path stem = work_dir() / "scan_json";
  fs::path plot = work_dir() / "scan_plot.svg";
  CmdResult res = run_cli(
      "scan --h-dir 1,0,-1 --h-mags 0.5 --lam-dir 1,0,-1 --lam-mags 0.3,0.6,1 "
      "--nbeta 32 --nag 48 --format json --plot " + plot.string() +
      " --out " + stem.string());
  REQUIRE(res.code == 0);
  json j = json::parse(read_file(stem.string() + ".json"));
  REQUIRE(j["version"].get<int>() == 1);
  REQUIRE(j["rows"].size() == 3);
  REQUIRE(j.contains("worst_gate_delta"));
  REQUIRE(j["unconverged_count"].get<int>() == 0);
  std::string svg = read_file(plot);
  REQUIRE(svg.rfind("<?xml", 0) == 0);
  REQUIRE(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("gate failures exit with code two and a machine-readable reason") {
  fs::path stem = work_dir() / "gate_fail";
  CmdResult res = run_cli(
      "eval --h-dir 1,0,-1 --h-mags 0.8 --lam-dir 1,0,-1 --lam-mags 25 "
      "--nbeta 4 --nag 6 --out " + stem.string());
  REQUIRE(res.code == 2);
  auto ls = lines_of(res.out);
  REQUIRE_FALSE(ls.empty());
  json j = json::parse(ls.back());
  REQUIRE(j["status"].get<std::string>() == "gate-failure");
  REQUIRE(j["unconverged"].get<int>() >= 1);
  REQUIRE(j["worst_delta"].get<double>() > j["gate_tol"].get<double>());

  // A failed gate wins over the plot's complaint about unconverged rows.
  fs::path plot = work_dir() / "gate_fail_plot.svg";
  CmdResult scan_res = run_cli(
      "scan --h-dir 1,0,-1 --h-mags 0.8 --lam-dir 1,0,-1 --lam-mags 25 "
      "--nbeta 4 --nag 6 --plot " + plot.string() + " --out " + stem.string());
  REQUIRE(scan_res.code == 2);
  REQUIRE(status_of(scan_res) == "gate-failure");
  REQUIRE_FALSE(fs::exists(plot));
}

TEST_CASE("config file supplies defaults and flags take precedence") {
  fs::path cfg_path = work_dir() / "run_config.json";
  {
    std::ofstream os(cfg_path);
    os << default_config().dump(2);
  }
  CmdResult from_cfg = run_cli("eval --config " + cfg_path.string());
  REQUIRE(from_cfg.code == 0);
  auto ls = lines_of(read_file(work_dir() / "from_config.csv"));
  REQUIRE(ls.size() == 3);

  fs::path stem2 = work_dir() / "cfg_override";
  CmdResult overridden = run_cli("eval --config " + cfg_path.string() +
                                 " --lam-mags 3 --out " + stem2.string());
  REQUIRE(overridden.code == 0);
  auto ls2 = lines_of(read_file(stem2.string() + ".csv"));
  REQUIRE(ls2.size() == 2);

  json bad = default_config();
  bad["version"] = 2;
  fs::path bad_path = work_dir() / "bad_config.json";
  {
    std::ofstream os(bad_path);
    os << bad.dump();
  }
  CmdResult rejected = run_cli("eval --config " + bad_path.string());
  REQUIRE(rejected.code == 3);
  REQUIRE(status_of(rejected) == "config-error");
  REQUIRE(run_cli("eval --config " + (work_dir() / "missing.json").string()).code == 3);
}

TEST_CASE("json reports embed a run_config that reproduces the run") {
  fs::path stem_a = work_dir() / "rt_a";
  REQUIRE(run_cli("eval --h-dir 1,0,-1 --h-mags 0.4 --lam-dir 1,0,-1 "
                  "--lam-mags 0,0.5 --nbeta 32 --nag 48 --format json --out " +
                  stem_a.string())
              .code == 0);
  json a = json::parse(read_file(stem_a.string() + ".json"));
  REQUIRE(a.contains("run_config"));

  fs::path cfg_path = work_dir() / "rt_config.json";
  fs::path stem_b = work_dir() / "rt_b";
  {
    std::ofstream os(cfg_path);
    os << a["run_config"].dump();
  }
  REQUIRE(run_cli("eval --config " + cfg_path.string() + " --out " + stem_b.string())
              .code == 0);
  json b = json::parse(read_file(stem_b.string() + ".json"));
  // Everything but the output stem survives the round trip bit-exactly.
  REQUIRE(a["rows"] == b["rows"]);
  json ca = a["run_config"], cb = b["run_config"];
  ca.erase("out");
  cb.erase("out");
  REQUIRE(ca == cb);
}

TEST_CASE("flag-built and config-built runs emit identical bytes") {
  fs::path cfg_path = work_dir() / "equiv_config.json";
  fs::path cfg_stem = work_dir() / "equiv_from_cfg";
  json cfg = default_config();
  cfg["out"] = cfg_stem.string();
  {
    std::ofstream os(cfg_path);
    os << cfg.dump();
  }
  REQUIRE(run_cli("eval --config " + cfg_path.string()).code == 0);

  fs::path flag_stem = work_dir() / "equiv_from_flags";
  REQUIRE(run_cli("eval --h-dir 1,0,-1 --h-mags 0 --lam-dir 1,0,-1 "
                  "--lam-mags 0,1 --nbeta 8 --nag 8 --out " +
                  flag_stem.string()).code == 0);
  REQUIRE(read_file(cfg_stem.string() + ".csv") ==
          read_file(flag_stem.string() + ".csv"));
}

TEST_CASE("analysis subcommands produce their row shapes") {
  fs::path crit = work_dir() / "crit_run";
  CmdResult c = run_cli(
      "critical --h-dir 0.8,0.1,-0.9 --h-mags 1 --lam-dir 0.6,-0.1,-0.5 "
      "--lam-mags 1 --out " + crit.string());
  REQUIRE(c.code == 0);
  REQUIRE(lines_of(read_file(crit.string() + ".csv")).size() == 25);

  fs::path hess = work_dir() / "hess_run";
  CmdResult h = run_cli(
      "hessian --h-dir 0.8,0.1,-0.9 --h-mags 1 --lam-dir 0.6,-0.1,-0.5 "
      "--lam-mags 1 --out " + hess.string());
  REQUIRE(h.code == 0);
  REQUIRE(lines_of(read_file(hess.string() + ".csv")).size() == 25);

  fs::path vdc = work_dir() / "vdc_run";
  CmdResult v = run_cli("vdc --dims 1 --lam-mags 0,5 --out " + vdc.string());
  REQUIRE(v.code == 0);
  REQUIRE(lines_of(read_file(vdc.string() + ".csv")).size() == 3);

  fs::path dui = work_dir() / "dui_run";
  CmdResult d = run_cli("duistermaat --samples 5 --seed 7 --out " + dui.string());
  REQUIRE(d.code == 0);
  REQUIRE(lines_of(read_file(dui.string() + ".csv")).size() == 6);

  fs::path lem = work_dir() / "lem_run";
  CmdResult l = run_cli("lemmas --h-dir 1,1,-2 --h-mags 0.8 --out " + lem.string());
  REQUIRE(l.code == 0);
  REQUIRE(lines_of(read_file(lem.string() + ".csv")).size() == 2);
}
