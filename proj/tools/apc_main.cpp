#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apcloud/bench.hpp"
#include "apcloud/csv.hpp"

namespace fs = std::filesystem;
using namespace apc;

namespace {

struct RunConfig {
  int dim = 2;
  std::size_t N = 1000000;
  std::uint64_t seed = 42;
  std::string method = "apcloud";
  double c = 0.04;
  int k = 2;
  int grid = 40;
  int max_level = 0;  // 0: pick by dimension
  std::string out_dir = ".";
  double tol = 1e-10;
  std::string weight_form = "normalized";

  int effective_max_level() const { return max_level > 0 ? max_level : (dim == 2 ? 14 : 12); }

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.refine.c = c;
    cfg.refine.k = k;
    cfg.tol = tol;
    cfg.weight_form = weight_form == "literal" ? WeightForm::Literal : WeightForm::Normalized;
    cfg.refine.validate();
    return cfg;
  }
};

// Applies `key = value` lines (# comments) to every field whose CLI flag was
// not passed explicitly, so flags take precedence over the file.
void apply_config_file(const std::string& path, CLI::App* cmd, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const CLI::Option* flag = cmd->get_option_no_throw("--" + key);
    if (flag == nullptr || key == "config")
      throw ConfigError("unknown config key: " + key);
    if (flag->count() > 0) continue;  // explicit flag wins
    try {
      if (key == "dim") cfg.dim = std::stoi(value);
      else if (key == "N") cfg.N = std::stoull(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "method") cfg.method = value;
      else if (key == "c") cfg.c = std::stod(value);
      else if (key == "k") cfg.k = std::stoi(value);
      else if (key == "grid") cfg.grid = std::stoi(value);
      else if (key == "max-level") cfg.max_level = std::stoi(value);
      else if (key == "out") cfg.out_dir = value;
      else if (key == "tol") cfg.tol = std::stod(value);
      else if (key == "weight-form") cfg.weight_form = value;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": cannot parse value `" + value + "`");
    }
  }
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("dim must be 2 or 3");
  if (cfg.k != 2) throw ConfigError("k must be 2");
  if (cfg.c <= 0 || cfg.tol <= 0) throw ConfigError("c and tol must be positive");
  if (cfg.method != "apcloud" && cfg.method != "pic")
    throw ConfigError("method must be apcloud or pic");
  if (cfg.weight_form != "normalized" && cfg.weight_form != "literal")
    throw ConfigError("weight-form must be normalized or literal");
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dim", cfg.dim, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--N", cfg.N, "Number of sampled particles");
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--method", cfg.method, "Solver: apcloud or pic")
      ->check(CLI::IsMember({"apcloud", "pic"}));
  cmd->add_option("--c", cfg.c, "Node-selection tuning parameter")->check(CLI::PositiveNumber);
  cmd->add_option("--k", cfg.k, "Derivative order of the stencil fit")->check(CLI::Range(2, 2));
  cmd->add_option("--grid", cfg.grid, "Uniform grid cells per dimension")->check(CLI::Range(2, 4096));
  cmd->add_option("--max-level", cfg.max_level, "Tree depth cap (0 = automatic)");
  cmd->add_option("--out", cfg.out_dir, "Output directory");
  cmd->add_option("--tol", cfg.tol, "Linear solver relative tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--weight-form", cfg.weight_form, "Least-squares weight: normalized or literal")
      ->check(CLI::IsMember({"normalized", "literal"}));
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

void append_reports(const RunConfig& cfg, const std::vector<ErrorReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) rows.push_back(r.csv_row());
  write_csv(out_path(cfg, "results.csv"), ErrorReport::csv_header(), rows);
  for (const auto& r : reports)
    std::printf("%-8s dim=%d N=%zu n=%zu c=%g err_phi=%.4g err_gradx=%.4g t=%.2fs\n",
                r.method.c_str(), r.dim, r.N, r.n_nodes, r.c, r.err_phi, r.err_gradx, r.wall_time);
}

RadialReference make_reference(int dim) { return radial_reference_solve(benchmark_beam(dim), dim); }

int cmd_solve_pic(const RunConfig& cfg) {
  const RadialReference ref = make_reference(cfg.dim);
  const Domain domain = Domain::unit_box(cfg.dim);
  const auto particles = sample_gaussian_beam(ref.params, cfg.N, cfg.seed, domain);
  const auto t0 = std::chrono::steady_clock::now();
  PicSolution sol = pic_solve(particles, domain, cfg.grid,
                              [&](const Vec& x) { return ref.phi_at(norm(x)); }, cfg.tol);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  dump_grid_csv(sol, out_path(cfg, "grid.csv"));
  ErrorReport rep = error_norms(sol.phi_p, sol.E_p[0], particles, ref);
  rep.wall_time = elapsed.count();
  rep.method = "pic";
  rep.seed = cfg.seed;
  rep.n_nodes = sol.grid.num_points();
  append_reports(cfg, {rep});
  return 0;
}

int cmd_solve_apcloud(const RunConfig& cfg) {
  const RadialReference ref = make_reference(cfg.dim);
  const Domain domain = Domain::unit_box(cfg.dim);
  const auto particles = sample_gaussian_beam(ref.params, cfg.N, cfg.seed, domain);
  const auto t0 = std::chrono::steady_clock::now();
  Octree tree = build_octree(particles, domain, cfg.effective_max_level());
  FieldSolution sol = solve_fields(
      tree, cfg.solver(), [&](const Vec& x) { return ref.phi_at(norm(x)); },
      [&](const Vec& x) { return density_exact(x, ref.params); });
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  dump_nodes_csv(sol, out_path(cfg, "nodes.csv"));
  dump_particles_csv(sol, tree, out_path(cfg, "particles.csv"));
  ErrorReport rep = error_norms(sol.phi_p, sol.E_p[0], tree.particles, ref);
  rep.wall_time = elapsed.count();
  rep.method = "apcloud";
  rep.seed = cfg.seed;
  rep.c = cfg.c;
  rep.n_nodes = sol.nodes.size();
  append_reports(cfg, {rep});
  return 0;
}

int cmd_benchmark(RunConfig cfg, int dim) {
  cfg.dim = dim;
  const RadialReference ref = make_reference(dim);
  const Domain domain = Domain::unit_box(dim);
  const auto particles = sample_gaussian_beam(ref.params, cfg.N, cfg.seed, domain);

  std::vector<ErrorReport> reports;
  const std::vector<int> grids = dim == 2 ? std::vector<int>{10, 20, 40, 80, 160}
                                          : std::vector<int>{10, 20, 40, 64};
  const std::vector<double> cs = dim == 2 ? std::vector<double>{0.08, 0.04, 0.02}
                                          : std::vector<double>{0.3, 0.2, 0.15};
  for (int m : grids) {
    ErrorReport r = run_pic(particles, ref, m, cfg.tol);
    r.seed = cfg.seed;
    reports.push_back(r);
  }
  for (double c : cs) {
    RunConfig rc = cfg;
    rc.c = c;
    ErrorReport r = run_apcloud(particles, ref, rc.solver(), rc.effective_max_level());
    r.seed = cfg.seed;
    reports.push_back(r);
  }
  append_reports(cfg, reports);
  return 0;
}

int cmd_convergence(const RunConfig& cfg) {
  const RadialReference ref = make_reference(cfg.dim);
  const Domain domain = Domain::unit_box(cfg.dim);
  const auto particles = sample_gaussian_beam(ref.params, cfg.N, cfg.seed, domain);
  // c is quartered per step so the resolution limit halves cleanly; halving c
  // only shifts it by sqrt(2), which aliases against the integer tree levels.
  const std::vector<double> ladder = cfg.dim == 2
                                         ? std::vector<double>{0.24, 0.06, 0.015, 0.00375}
                                         : std::vector<double>{0.96, 0.24, 0.06};
  const auto rows = convergence_study_noise_free(ref.params, ladder, particles,
                                                 cfg.effective_max_level(), ref);
  std::vector<std::vector<std::string>> csv;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.push_back({std::to_string(r.n), fmt17(r.err_phi), fmt17(r.err_gradx),
                   i == 0 ? "" : fmt17(r.order_phi), i == 0 ? "" : fmt17(r.order_gradx)});
    std::printf("n=%zu err_phi=%.4g err_gradx=%.4g order_phi=%s order_gradx=%s\n", r.n, r.err_phi,
                r.err_gradx, i == 0 ? "-" : fmt17(r.order_phi).c_str(),
                i == 0 ? "-" : fmt17(r.order_gradx).c_str());
  }
  write_csv(out_path(cfg, "convergence.csv"), "n,err_phi,err_gradx,order_phi,order_gradx", csv);
  return 0;
}

int cmd_self_force(const RunConfig& cfg) {
  SelfForceSetup setup;
  setup.dim = cfg.dim;
  setup.config = cfg.solver();
  std::vector<Vec> path;
  // sweep across the refinement-level transition at x = 0; the path is offset
  // from the cell lattice so no position coincides exactly with a cell corner
  for (int i = 0; i <= 16; ++i) path.push_back(vec2(-0.0969 + 0.0125 * i, 0.0063));
  const SelfForceResult res = self_force_scan(setup, path);

  std::vector<std::vector<std::string>> csv;
  for (std::size_t i = 0; i < res.positions.size(); ++i) {
    csv.push_back({fmt17(res.positions[i][0]), fmt17(res.positions[i][1]),
                   fmt17(res.residual[i]), std::to_string(res.n_nodes[i])});
    std::printf("x=%+.5f residual=%.4g relative=%.4g n=%zu\n", res.positions[i][0],
                res.residual[i], res.residual[i] / res.field_scale, res.n_nodes[i]);
  }
  write_csv(out_path(cfg, "self_force.csv"), "x,y,residual,n_nodes", csv);
  std::printf("field scale (max |grad phi|) = %.6g\n", res.field_scale);
  return 0;
}

int cmd_timing(const RunConfig& cfg) {
  const RadialReference ref = make_reference(cfg.dim);
  const Domain domain = Domain::unit_box(cfg.dim);
  const auto particles = sample_gaussian_beam(ref.params, cfg.N, cfg.seed, domain);
  StageTimes times;
  std::size_t n_interior = 0;
  ErrorReport rep = run_apcloud(particles, ref, cfg.solver(), cfg.effective_max_level(), &times,
                                &n_interior);
  std::vector<std::vector<std::string>> csv;
  for (std::size_t i = 0; i < kStageLabels.size(); ++i) {
    std::printf("%-32s %.3e\n", kStageLabels[i], times.seconds[i]);
    csv.push_back({kStageLabels[i], fmt17(times.seconds[i])});
  }
  std::printf("%-32s %.3e\n", "Total running time", times.total());
  csv.push_back({"Total running time", fmt17(times.total())});
  write_csv(out_path(cfg, "timing.csv"), "stage,seconds", csv);
  std::printf("n=%zu err_phi=%.4g err_gradx=%.4g\n", rep.n_nodes, rep.err_phi, rep.err_gradx);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive particle-in-cloud electrostatic field solver"};
  app.require_subcommand(1);

  RunConfig cfg;
  CLI::App* c_pic = app.add_subcommand("solve-pic", "Single uniform-grid solve with dumps");
  CLI::App* c_apc = app.add_subcommand("solve-apcloud", "Single adaptive solve with dumps");
  CLI::App* c_b2 = app.add_subcommand("benchmark-2d", "2D beam accuracy comparison");
  CLI::App* c_b3 = app.add_subcommand("benchmark-3d", "3D beam accuracy comparison");
  CLI::App* c_conv = app.add_subcommand("convergence", "Noise-free refinement ladder");
  CLI::App* c_sf = app.add_subcommand("self-force", "Residual force of an isolated blob");
  CLI::App* c_tim = app.add_subcommand("timing", "Stage-by-stage timing breakdown");
  std::string config_file;
  for (CLI::App* c : {c_pic, c_apc, c_b2, c_b3, c_conv, c_sf, c_tim}) {
    add_common(c, cfg);
    c->add_option("--config", config_file, "Configuration file (key = value lines)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_file.empty()) apply_config_file(config_file, app.get_subcommands().front(), cfg);
    if (c_pic->parsed()) return cmd_solve_pic(cfg);
    if (c_apc->parsed()) return cmd_solve_apcloud(cfg);
    if (c_b2->parsed()) return cmd_benchmark(cfg, 2);
    if (c_b3->parsed()) {
      RunConfig c3 = cfg;
      if (!c_b3->get_option("--N")->count()) c3.N = 100000;
      c3.dim = 3;
      return cmd_benchmark(c3, 3);
    }
    if (c_conv->parsed()) return cmd_convergence(cfg);
    if (c_sf->parsed()) return cmd_self_force(cfg);
    if (c_tim->parsed()) return cmd_timing(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
