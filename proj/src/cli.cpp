#include "vvcm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "vvcm/engine.hpp"
#include "vvcm/figure.hpp"
#include "vvcm/oracle.hpp"
#include "vvcm/results.hpp"
#include "vvcm/scene_file.hpp"

namespace vvcm::cli {

namespace {

struct Flags {
  std::string scene;
  std::string format = "json";
  std::string out;
  bool stats = false;
  bool lowest_energy = false;
  bool oracle = false;
  int grid_points = 25;
  std::optional<double> grid_spacing;
  std::optional<double> cluster;
  std::string figure;
  std::optional<int> pivot_index;
  std::string tolerances;
  unsigned threads = 0;
  bool timing = false;
  bool no_stability = false;
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !f.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw IoError("cannot write '" + path + "'");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Forward kinematics of an object carried on a sheet held by N robots"};
  app.name("vvcm_fk");
  app.add_option("--scene", f.scene, "Scene file (JSON)")->required();
  app.add_option("--format", f.format, "Result format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", f.out, "Write results here instead of stdout");
  app.add_flag("--stats", f.stats, "Print per-step survivor counts to stderr");
  app.add_flag("--lowest-energy", f.lowest_energy, "Report only the lowest-energy solution");
  app.add_flag("--oracle", f.oracle, "Also run the brute-force equilibrium search");
  app.add_option("--grid-res", f.grid_points, "Oracle grid points per axis")->check(CLI::Range(2, 400));
  app.add_option("--grid-spacing", f.grid_spacing, "Oracle grid spacing in meters (overrides --grid-res)")
      ->check(CLI::PositiveNumber);
  app.add_option("--cluster", f.cluster, "Group solutions whose p_o and v_o agree within TOL meters")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--figure", f.figure, "Write a PDF (or .svg) figure, one page per solution");
  app.add_option("--pivot-index", f.pivot_index, "Use the I-th member (1-based, cyclic) of each taut set as pivot")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerances", f.tolerances, "Overrides, e.g. slack=1e-9,hull=1e-9");
  app.add_option("--threads", f.threads, "Worker threads (0: all cores)");
  app.add_flag("--timing", f.timing, "Include wall time in the output");
  app.add_flag("--no-stability", f.no_stability, "Skip the stability probe of each solution");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kParseError;
  }

  FkOptions options;
  try {
    options.tol.apply_overrides(f.tolerances);
  } catch (const std::invalid_argument& e) {
    err << "error: --tolerances: " << e.what() << "\n";
    return kParseError;
  }
  options.threads = f.threads;
  options.classify_stability = !f.no_stability;
  if (f.pivot_index) options.pivot_position = *f.pivot_index - 1;

  try {
    const Scene scene = parse_scene_file(f.scene, options.tol);
    FkResult result = solve_fk(scene, options);

    std::vector<Solution> solutions = std::move(result.solutions);
    if (f.lowest_energy && !solutions.empty()) {
      Solution best = lowest_energy(solutions);
      solutions.assign(1, std::move(best));
    }

    ReportOptions report;
    report.timing = f.timing;
    if (f.cluster) report.clusters = cluster_solutions(solutions, *f.cluster);
    if (f.oracle) {
      OracleOptions oo;
      oo.grid_points = f.grid_points;
      oo.threads = f.threads;
      report.oracle = f.grid_spacing ? find_equilibria(scene, *f.grid_spacing, oo) : find_equilibria(scene, oo);
    }

    const std::string text =
        f.format == "csv" ? results_csv(solutions, report) : results_json(solutions, result.stats, report);
    write_output(f.out, text, out);
    if (f.stats) err << stats_text(result.stats, f.timing);
    if (f.oracle && f.format == "csv") {
      err << "oracle equilibria: " << report.oracle->size() << "\n";
      for (const auto& e : *report.oracle) {
        err << "  z_min " << format_number(e.z_min) << " r_o (" << format_number(e.r_o.x()) << ", "
            << format_number(e.r_o.y()) << ") v_o (" << format_number(e.v_o.x()) << ", "
            << format_number(e.v_o.y()) << ")\n";
      }
    }
    if (!result.schur_singular.empty()) {
      err << "warning: " << result.schur_singular.size() << " taut set(s) with a singular Schur complement:";
      for (const auto& t : result.schur_singular) err << " " << t.to_string();
      err << "\n";
    }
    if (!f.figure.empty()) emit_figure(scene, solutions, f.figure);
    return solutions.empty() ? kNoSolutions : kSolutions;
  } catch (const ValidationError& e) {
    err << "error: invalid scene: " << e.what() << "\n";
    return kValidationError;
  } catch (const ParseError& e) {
    err << "error: " << f.scene << ": " << e.what() << "\n";
    return kParseError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace vvcm::cli
