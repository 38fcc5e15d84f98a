// pkgeo: scene runner, verification suites and grid export.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 malformed input
// (command line, scene or expression), 3 domain or geometry error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pkgeo/basegeo.hpp"
#include "pkgeo/errors.hpp"
#include "pkgeo/scene.hpp"
#include "pkgeo/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kFail = 1, kParse = 2, kDomain = 3 };

struct Common {
  std::string out;
  std::string csv_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<int> grid;
  std::optional<double> tol_null;
  std::optional<int> quad_order;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Write the JSON report here (grids go next to it as CSV)");
  app->add_option("--csv-dir", c.csv_dir, "Directory for CSV grids when the report goes to stdout");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--samples", c.samples, "Random samples per pointwise suite")->check(CLI::PositiveNumber);
  app->add_option("--grid", c.grid, "Grid resolution N (N x N cells) for every request")->check(CLI::Range(1, 4096));
  app->add_option("--tol-null", c.tol_null, "Null-locus tolerance on |EG - F^2|")->check(CLI::NonNegativeNumber);
  app->add_option("--quad-order", c.quad_order, "Gauss-Legendre order per cell")->check(CLI::Range(1, 512));
}

pkgeo::RunOptions run_options(const Common& c) {
  pkgeo::RunOptions o;
  o.seed = c.seed;
  o.samples = c.samples;
  o.grid = c.grid;
  o.tol_null = c.tol_null;
  o.quad_order = c.quad_order;
  return o;
}

pkgeo::SuiteOptions suite_options(const Common& c) {
  pkgeo::SuiteOptions o;
  if (c.seed) o.seed = *c.seed;
  if (c.samples) o.samples = *c.samples;
  if (c.grid) o.grid = *c.grid;
  if (c.tol_null) o.tol_null = *c.tol_null;
  if (c.quad_order) o.quadrature.order = *c.quad_order;
  return o;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw pkgeo::Error("cannot write '" + path.string() + "'");
  f << text;
}

// Writes the report and its grids; returns the exit code for its status.
int emit(const pkgeo::Report& report, const Common& c) {
  if (c.out.empty()) {
    std::cout << report.json;
  } else {
    const fs::path parent = fs::path(c.out).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_file(c.out, report.json);
  }
  fs::path dir;
  std::string stem;
  if (!c.out.empty()) {
    const fs::path out(c.out);
    dir = out.parent_path();
    stem = out.stem().string() + ".";
  }
  if (!c.csv_dir.empty()) {
    dir = c.csv_dir;
    fs::create_directories(dir);
  }
  if (!c.out.empty() || !c.csv_dir.empty()) {
    for (const auto& g : report.grids) write_file(dir / (stem + g.name + ".csv"), g.csv());
  }
  for (const auto& line : json::parse(report.json).at("failures")) {
    std::cerr << "FAIL " << line.get<std::string>() << "\n";
  }
  return report.passed ? kPass : kFail;
}

std::vector<pkgeo::ConformalChart> charts(const std::string& name) {
  if (name == "all") return {pkgeo::ConformalChart::flat(), pkgeo::ConformalChart::sphere(),
                             pkgeo::ConformalChart::hyperbolic()};
  if (name != "flat" && name != "sphere" && name != "hyperbolic") {
    throw pkgeo::ParseError("unknown chart '" + name + "'", 0);
  }
  return {pkgeo::ConformalChart::from_catalog(name)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian surfaces in tangent bundles: scenes, verification suites, grids"};
  app.set_version_flag("--version", std::string(pkgeo::version()));
  app.require_subcommand(1);

  Common common;

  std::string scene_path;
  auto* run = app.add_subcommand("run", "Run every request of a scene file");
  run->add_option("scene", scene_path, "Scene file (JSON)")->required();
  add_common(run, common);

  std::string chart = "all";
  auto* structure = app.add_subcommand("verify-structure", "Pseudo-Kaehler structure suite on catalog charts");
  structure->add_option("--chart", chart, "flat, sphere, hyperbolic or all");
  add_common(structure, common);

  std::string suite = "all";
  bool no_probe = false;
  int objects = 0;
  int potentials = 0;
  auto* theorems = app.add_subcommand("verify-theorems", "Rank-one, rank-two, flat, congruence and parser suites");
  theorems->add_option("--chart", chart, "flat, sphere, hyperbolic or all");
  theorems->add_option("--suite", suite, "rank_one, rank_two, flat, congruence, parser or all")
      ->check(CLI::IsMember({"rank_one", "rank_two", "flat", "congruence", "parser", "all"}));
  theorems->add_flag("--no-probe", no_probe, "Skip the minimal gradient graph probe");
  theorems->add_option("--objects", objects, "Random curves per chart and random families")->check(CLI::PositiveNumber);
  theorems->add_option("--potentials", potentials, "Random potentials per chart")->check(CLI::PositiveNumber);
  add_common(theorems, common);

  auto* congruence = app.add_subcommand("congruence", "Normal congruences of the surfaces of a scene");
  congruence->add_option("--scene", scene_path, "Scene file (JSON)")->required();
  add_common(congruence, common);

  std::string u_text;
  std::vector<double> domain;
  std::optional<double> beta0;
  auto* flatlab = app.add_subcommand("flatlab", "Lagrangian angle grids of potentials in the flat chart");
  flatlab->add_option("--scene", scene_path, "Scene file with flatlab requests");
  flatlab->add_option("--u", u_text, "Potential u(s, t)");
  flatlab->add_option("--domain", domain, "s0 s1 t0 t1")->expected(4);
  flatlab->add_option("--beta0", beta0, "Check the constant-angle equation for this angle");
  add_common(flatlab, common);

  std::string object;
  auto* grid = app.add_subcommand("grid-export", "Per-cell grids (defect, rank, E/F/G, |H|, residuals)");
  grid->add_option("--scene", scene_path, "Scene file (JSON)")->required();
  grid->add_option("--object", object, "Object to export (all objects with geometry when omitted)");
  add_common(grid, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kParse;
  }

  if (!scene_path.empty() && !fs::is_regular_file(scene_path)) {
    std::cerr << "error: cannot read scene file '" << scene_path << "'\n";
    return kParse;
  }

  try {
    if (*run) {
      return emit(pkgeo::Scene::load(scene_path).run(run_options(common)), common);
    }
    if (*structure) {
      const pkgeo::SuiteOptions o = suite_options(common);
      std::vector<pkgeo::SuiteResult> suites;
      for (const auto& c : charts(chart)) suites.push_back(pkgeo::structure_suite(c, o));
      return emit(pkgeo::suite_report("verify-structure", suites, o), common);
    }
    if (*theorems) {
      pkgeo::SuiteOptions o = suite_options(common);
      if (objects > 0) o.objects = objects;
      if (potentials > 0) o.potentials = potentials;
      const auto want = [&](const char* s) { return suite == "all" || suite == s; };
      std::vector<pkgeo::SuiteResult> suites;
      for (const auto& c : charts(chart)) {
        if (want("rank_one")) suites.push_back(pkgeo::rank_one_suite(c, o));
        if (want("rank_two")) suites.push_back(pkgeo::rank_two_suite(c, o, !no_probe && c.name() != "flat"));
      }
      if (want("flat")) suites.push_back(pkgeo::flat_suite(o));
      if (want("congruence")) suites.push_back(pkgeo::congruence_suite(o));
      if (want("parser")) suites.push_back(pkgeo::parser_suite(o));
      return emit(pkgeo::suite_report("verify-theorems", suites, o), common);
    }
    if (*congruence) {
      const pkgeo::Scene scene = pkgeo::Scene::load(scene_path);
      pkgeo::RunOptions o = run_options(common);
      o.kinds = {"congruence"};
      pkgeo::Report report = scene.run(o);
      // A scene without congruence requests gets one per surface object.
      if (json::parse(report.json).at("results").empty()) {
        json requests = json::array();
        for (const auto& name : scene.object_names()) {
          requests.push_back({{"kind", "congruence"}, {"object", name}});
        }
        try {
          report = scene.with_requests(requests.dump()).run(o);
        } catch (const pkgeo::ParseError&) {
          // Some objects are not surfaces; keep only those that are.
          json kept = json::array();
          for (const auto& r : requests) {
            try {
              (void)scene.with_requests(json::array({r}).dump());
              kept.push_back(r);
            } catch (const pkgeo::ParseError&) {
            }
          }
          report = scene.with_requests(kept.dump()).run(o);
        }
      }
      return emit(report, common);
    }
    if (*flatlab) {
      if (u_text.empty() == scene_path.empty()) {
        std::cerr << "flatlab: give either --scene or --u\n";
        return kParse;
      }
      pkgeo::RunOptions o = run_options(common);
      o.kinds = {"flatlab"};
      if (!scene_path.empty()) return emit(pkgeo::Scene::load(scene_path).run(o), common);
      if (domain.empty()) domain = {-1.0, 1.0, -1.0, 1.0};
      json request = {{"kind", "flatlab"}, {"object", "u"}, {"grid", 24}};
      if (beta0) request["beta0"] = *beta0;
      const json scene = {{"name", "flatlab"},
                          {"chart", "flat"},
                          {"objects", {{"u", {{"type", "potential"}, {"u", u_text}, {"domain", domain}}}}},
                          {"requests", json::array({request})}};
      return emit(pkgeo::Scene::parse(scene.dump()).run(o), common);
    }
    if (*grid) {
      const pkgeo::Scene scene = pkgeo::Scene::load(scene_path);
      json requests = json::array();
      const std::vector<std::string> names =
          object.empty() ? scene.object_names() : std::vector<std::string>{object};
      for (const auto& name : names) {
        const json r = {{"kind", "grid"}, {"object", name}};
        if (!object.empty()) {
          requests.push_back(r);
          continue;
        }
        // Curves have no cell grid; skip them when exporting everything.
        try {
          (void)scene.with_requests(json::array({r}).dump());
          requests.push_back(r);
        } catch (const pkgeo::ParseError&) {
        }
      }
      return emit(scene.with_requests(requests.dump()).run(run_options(common)), common);
    }
  } catch (const pkgeo::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const pkgeo::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const pkgeo::GeometryError& e) {
    std::cerr << "geometry error (" << pkgeo::to_string(e.fault()) << "): " << e.what() << "\n";
    return kDomain;
  } catch (const pkgeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kParse;
}
