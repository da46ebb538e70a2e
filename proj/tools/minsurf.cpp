// minsurf: catalog | check | mesh | report

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "minsurf/minsurf.hpp"

namespace fs = std::filesystem;
using namespace minsurf;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Selection {
  std::string manifest;
  std::vector<std::string> suites;
  std::vector<std::string> scenarios;
};

RunManifest build_manifest(const Selection& sel) {
  RunManifest m;
  if (!sel.manifest.empty()) m = parse_manifest(slurp(sel.manifest), fs::path(sel.manifest).parent_path());
  auto expand = [](const std::vector<std::string>& xs) {
    std::vector<std::string> out;
    for (const auto& x : xs) {
      for (auto& y : detail::split_list(x)) out.push_back(y);
    }
    return out;
  };
  if (!sel.suites.empty()) m.suites = expand(sel.suites);
  if (m.suites.size() == 1 && m.suites[0] == "all") m.suites.clear();
  if (!sel.scenarios.empty()) m.scenarios = expand(sel.scenarios);
  m.validate();
  return m;
}

void print_records(const RunResult& res, bool timing) {
  for (const auto& r : res.records) {
    std::printf("%-12s %-7s %-12s %-16s %s", to_string(r.status), r.suite.c_str(), r.scenario.c_str(), r.check.c_str(),
                r.status == Status::Inapplicable ? "" : ("margin " + format_number(r.margin)).c_str());
    if (timing) std::printf("  [%.3fs]", r.runtime);
    if (!r.note.empty()) std::printf("  (%s)", r.note.c_str());
    std::printf("\n");
  }
  for (const auto& e : res.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  std::size_t pass = 0, fail = 0, na = 0;
  for (const auto& r : res.records) {
    (r.status == Status::Pass ? pass : r.status == Status::Fail ? fail : na)++;
  }
  std::printf("%zu pass, %zu fail, %zu inapplicable, %zu errors\n", pass, fail, na, res.errors.size());
}

int cmd_catalog(bool json) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& sc : builtin_catalog()) {
    if (json) {
      nlohmann::ordered_json j;
      j["id"] = sc.id();
      j["stable_claim"] = sc.stable_claim;
      j["r_max"] = sc.surface.r_max;
      j["config"] = serialize_scenario(sc);
      arr.push_back(j);
      continue;
    }
    std::printf("%-16s f = %-18s r_max = %-8s %s%s\n", sc.id().c_str(), sc.surface.warp_text->c_str(),
                format_number(sc.surface.r_max).c_str(), sc.stable_claim ? "stable" : "unstable",
                sc.surface.neck_centered ? ", neck-centered" : "");
  }
  if (json) std::cout << arr.dump(2) << "\n";
  return 0;
}

int cmd_check(const Selection& sel, bool timing) {
  const auto m = build_manifest(sel);
  const auto res = run(m);
  print_records(res, timing);
  return res.exit_code;
}

int cmd_mesh(const std::string& obj, int seed, double C_h, const std::string& csv_out) {
  const auto mesh = detail::load_obj(obj);
  if (seed < 0 || seed >= static_cast<int>(mesh.num_vertices())) throw ConfigError("seed vertex out of range");
  const auto dist = geodesic_distance(mesh, seed);
  double dmax = 0.0;
  for (double d : dist.d) {
    if (std::isfinite(d)) dmax = std::max(dmax, d);
  }
  const auto dp = discrete_profile(mesh, dist, linspace(dmax / 64.0, dmax, 64));
  const auto fr = fiala_discrete_check(dp, 1, C_h);
  nlohmann::ordered_json j;
  j["mesh"] = obj;
  j["vertices"] = mesh.num_vertices();
  j["edges"] = mesh.num_edges();
  j["faces"] = mesh.num_faces();
  j["euler_characteristic"] = mesh.euler_characteristic();
  j["components"] = mesh.components();
  j["boundary_loops"] = mesh.boundary_loops();
  j["genus"] = mesh.genus();
  j["orientable"] = mesh.orientable();
  j["total_area"] = mesh.total_area();
  j["total_interior_defect"] = mesh.total_interior_defect();
  j["h"] = dist.h;
  j["fiala"] = to_json(fr);
  std::cout << j.dump(2) << "\n";
  if (!csv_out.empty()) {
    std::ofstream out(csv_out, std::ios::binary);
    out << to_csv(dp);
  }
  return fr.status == Status::Fail ? 1 : 0;
}

int cmd_report(const Selection& sel, const std::string& out_dir, const std::string& format) {
  auto m = build_manifest(sel);
  if (!out_dir.empty()) m.out_dir = out_dir;
  const auto res = run(m);
  const fs::path dir(m.out_dir);
  // partial results are written even when some suites errored
  emit_plot_data(res.records, res.plots, dir);
  std::ofstream(dir / "manifest.cfg", std::ios::binary) << serialize_manifest(m);
  if (format == "json") std::ofstream(dir / "report.json", std::ios::binary) << report_json(m, res);
  for (const auto& e : res.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  std::printf("%zu records written to %s (exit %d)\n", res.records.size(), dir.string().c_str(), res.exit_code);
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for stable minimal surface estimates"};
  app.require_subcommand(1);

  auto* catalog = app.add_subcommand("catalog", "List builtin scenarios");
  bool catalog_json = false;
  catalog->add_flag("--json", catalog_json, "Print scenario configs as JSON");

  Selection sel;
  bool timing = false;
  auto* check = app.add_subcommand("check", "Run verification suites and print records");
  check->add_option("--manifest", sel.manifest, "Manifest file")->check(CLI::ExistingFile);
  check->add_option("--suite", sel.suites, "Suites (comma separated or repeated; 'all')");
  check->add_option("--scenario", sel.scenarios, "Builtin ids or scenario files");
  check->add_flag("--timing", timing, "Show per-suite runtimes");

  std::string obj;
  int seed_vertex = 0;
  double C_h = 4.0;
  std::string csv_out;
  auto* mesh = app.add_subcommand("mesh", "Validate an OBJ mesh and run the discrete Fiala check");
  mesh->add_option("--obj", obj, "Wavefront OBJ file")->required()->check(CLI::ExistingFile);
  mesh->add_option("--seed-vertex", seed_vertex, "Source vertex (0-based)");
  mesh->add_option("--C_h", C_h, "Discretization slack constant")->check(CLI::PositiveNumber);
  mesh->add_option("--csv", csv_out, "Write the discrete ball profile here");

  std::string out_dir;
  std::string format = "csv";
  Selection rsel;
  auto* report = app.add_subcommand("report", "Run suites and write records and plot data");
  report->add_option("--out", out_dir, "Output directory (default from manifest)");
  report->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--manifest", rsel.manifest, "Manifest file")->check(CLI::ExistingFile);
  report->add_option("--suite", rsel.suites, "Suites");
  report->add_option("--scenario", rsel.scenarios, "Scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*catalog) return cmd_catalog(catalog_json);
    if (*check) return cmd_check(sel, timing);
    if (*mesh) return cmd_mesh(obj, seed_vertex, C_h, csv_out);
    if (*report) return cmd_report(rsel, out_dir, format);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
