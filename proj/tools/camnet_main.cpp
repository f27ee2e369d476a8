#include "camnet/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace camnet;

struct Flags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
  std::optional<int> port;
  std::optional<std::string> method;
};

void add_common(CLI::App* cmd, Flags& f, bool needs_config = true) {
  auto* c = cmd->add_option("--config", f.config, "Scenario config (JSON)");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Override the top-level seed");
  cmd->add_option("--method", f.method, "Visibility method")->check(CLI::IsMember({"zbuffer", "raycast"}));
}

ScenarioConfig load(const Flags& f) {
  ScenarioOverrides o;
  o.seed = f.seed;
  o.resolution = f.resolution;
  o.port = f.port;
  o.method = f.method;
  return load_scenario(f.config, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera-network design engine"};
  app.require_subcommand(1);
  Flags f;

  auto* optimize = app.add_subcommand("optimize", "Greedy camera selection over the candidate set");
  add_common(optimize, f);

  int n_functions = 0;
  std::string solution;
  auto* crosseval = app.add_subcommand("crosseval", "Cross-evaluate solutions of sampled quality functions");
  add_common(crosseval, f);
  crosseval->add_option("--functions", n_functions, "Number of sampled functions (default: config)");
  crosseval->add_option("--solution", solution, "Solution or session export to score against the table")
      ->check(CLI::ExistingFile);

  auto* audit = app.add_subcommand("audit", "Dense-grid coverage audit of a solution");
  add_common(audit, f);
  audit->add_option("--solution", solution, "Solution or session export file")->required()->check(CLI::ExistingFile);
  audit->add_option("--resolution", f.resolution, "Grid spacing in meters");

  auto* bench = app.add_subcommand("bench", "Session latency sweep");
  add_common(bench, f);

  auto* serve = app.add_subcommand("serve", "Interactive session over WebSocket");
  add_common(serve, f);
  serve->add_option("--port", f.port, "TCP port");

  int levels = 5;
  auto* sample = app.add_subcommand("sample-functions", "Write sampled redundancy quality functions");
  add_common(sample, f, false);
  sample->add_option("--functions", n_functions, "Number of functions")->default_val(60);
  sample->add_option("--levels", levels, "Weights per function")->capture_default_str();

  std::string scene_name;
  std::string scene_file;
  auto* gen = app.add_subcommand("gen-scene", "Write a procedural scene mesh");
  gen->add_option("name", scene_name, "harbour, office, carpark, room or clutter")->required();
  gen->add_option("file", scene_file, "Output mesh (.obj, .stl, .ply)")->required();
  gen->add_option("--seed", f.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*optimize) {
      const auto r = cmd_optimize(load(f), f.out);
      std::cout << "selected";
      for (const int id : r.report.solution.ids) std::cout << ' ' << id;
      std::cout << "\nobjective " << r.report.objective << "  coverage " << r.coverage << "  evaluations "
                << r.report.evaluations << '\n';
    } else if (*crosseval) {
      const auto config = load(f);
      const int n = n_functions > 0 ? n_functions : config.crosseval_functions;
      const auto r = cmd_crosseval(config, n, config.crosseval_seed, f.out,
                                   solution.empty() ? std::nullopt : std::optional<std::filesystem::path>(solution));
      std::cout << n << "x" << n << " table written to " << f.out << '\n';
      if (r.external) std::cout << "external mean ratio " << r.external->mean_ratio << "  coverage " << r.external->coverage << '\n';
    } else if (*audit) {
      const auto config = load(f);
      const auto r = cmd_audit(config, solution, config.audit_resolution, f.out);
      std::cout << r.covered_points << " / " << r.total_points << " points covered (" << 100.0 * r.fraction << "%)\n";
    } else if (*bench) {
      const auto config = load(f);
      cmd_bench(config, config.bench_points, config.bench_cameras, f.out, &std::cout);
    } else if (*serve) {
      cmd_serve(load(f), f.out, std::cout);
    } else if (*sample) {
      const std::uint64_t seed = f.seed ? *f.seed : (f.config.empty() ? 0 : load(f).crosseval_seed);
      cmd_sample_functions(n_functions, levels, seed, f.out);
    } else if (*gen) {
      cmd_gen_scene(scene_name, f.seed.value_or(1), scene_file);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
