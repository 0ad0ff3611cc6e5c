// splinecolloc: OSC demos, interpolation comparison, ABD benchmark, data
// generation and surrogate training from the command line.

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "splinecolloc/abd.hpp"
#include "splinecolloc/baselines.hpp"
#include "splinecolloc/basis.hpp"
#include "splinecolloc/datagen.hpp"
#include "splinecolloc/errors.hpp"
#include "splinecolloc/osc1d.hpp"
#include "splinecolloc/surrogate/checkpoint.hpp"
#include "splinecolloc/surrogate/train.hpp"
#include "splinecolloc/trajectory.hpp"

namespace fs = std::filesystem;
using namespace splinecolloc;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.precision(17);
  return out;
}

// --- osc-demo ----------------------------------------------------------------

struct DemoArgs {
  std::string problem = "a3";
  std::size_t n = 3;
  std::size_t r = 3;
  std::size_t samples = 1001;
  std::string out;
};

int run_osc_demo(const DemoArgs& a) {
  constexpr double pi = std::numbers::pi;
  osc::OdeSpec spec;
  std::function<double(double)> exact;
  if (a.problem == "a3") {
    // u + u' = sin(2 pi x) + 2 pi cos(2 pi x), u(0) = u(1) = 0.
    spec = {1.0, 1.0, 0.0, [&](double x) { return std::sin(2 * pi * x) + 2 * pi * std::cos(2 * pi * x); },
            0.0, 0.0};
    exact = [&](double x) { return std::sin(2 * pi * x); };
  } else if (a.problem == "poly-exact") {
    // u'' + u = p'' + p with p(x) = sum_j (-1)^j (j + 1) x^j / 2^j up to degree r.
    const std::size_t r = a.r;
    auto p = [r](double x, int d) {
      double s = 0.0;
      for (std::size_t j = 0; j <= r; ++j)
        s += (j % 2 ? -1.0 : 1.0) * static_cast<double>(j + 1) / std::pow(2.0, double(j)) *
             basis::monomial_term(j, x, d);
      return s;
    };
    spec = {1.0, 0.0, 1.0, [p](double x) { return p(x, 2) + p(x, 0); }, p(0.0, 0), p(1.0, 0)};
    exact = [p](double x) { return p(x, 0); };
  } else {
    throw InvalidArgument("unknown problem '" + a.problem + "' (expected a3 or poly-exact)");
  }
  const auto sol =
      osc::solve_osc1d(osc::Osc1dProblem::ode(basis::PartitionGrid::uniform(0, 1, a.n, a.r), spec));

  double max_err = 0.0;
  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < a.samples; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(a.samples - 1);
    const double u = sol.evaluate(x), e = exact(x);
    max_err = std::max(max_err, std::abs(u - e));
    rows.push_back({x, u, e});
  }
  std::cout << "problem " << a.problem << ", N = " << a.n << ", r = " << a.r << '\n';
  for (std::size_t c = 0; c < sol.cells(); ++c) {
    std::cout << "  cell " << c << " [" << sol.breakpoints()[c] << ", " << sol.breakpoints()[c + 1]
              << "]:";
    for (double v : sol.global_monomial_coeffs(c)) std::cout << ' ' << v;
    std::cout << '\n';
  }
  std::cout << "max_error " << max_err << '\n';
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    out << "x,u,exact\n";
    for (const auto& r : rows) out << r[0] << ',' << r[1] << ',' << r[2] << '\n';
  }
  return 0;
}

// --- compare -----------------------------------------------------------------

struct CompareArgs {
  std::string problem;
  bool all = false;
  std::size_t cells = 0;
  std::size_t min_points = 8;
  std::size_t max_points = 64;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  std::vector<std::string> problems;
  if (a.all)
    problems = datagen::analytic_field_names();
  else if (!a.problem.empty())
    problems = {a.problem};
  else
    throw InvalidArgument("compare: give --problem NAME or --all");

  std::vector<baselines::Comparison> cols;
  for (const auto& p : problems) {
    if (a.cells > 0) {
      cols.push_back(baselines::compare_methods(p, a.cells));
    } else {
      const auto sweep = baselines::sweep_resolutions(p, a.min_points, a.max_points);
      cols.push_back(sweep.best_run());
    }
    std::cerr << p << ": " << cols.back().points_per_axis << " points per axis ("
              << cols.back().cells << " cells, OSC order " << cols.back().order << ")\n";
  }
  if (a.out.empty()) {
    baselines::write_comparison_csv(cols, std::cout);
  } else {
    auto out = open_out(a.out);
    baselines::write_comparison_csv(cols, out);
  }
  return 0;
}

// --- bench-abd ---------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> sizes{256, 512, 1024, 2048, 4096};
  std::string width = "sqrt";
  std::size_t fixed_width = 8;
  double min_time = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  abd::ScalingOptions opts;
  opts.width = a.width == "fixed" ? abd::WidthRule::Fixed : abd::WidthRule::SqrtN;
  opts.fixed_width = a.fixed_width;
  opts.min_time_s = a.min_time;
  opts.seed = a.seed;
  const auto table = abd::benchmark_scaling(a.sizes, opts);
  if (a.out.empty()) {
    table.write_csv(std::cout);
  } else {
    auto out = open_out(a.out);
    table.write_csv(out);
  }
  if (table.fitted_exponent)
    std::cerr << "fitted exponent " << *table.fitted_exponent << '\n';
  return 0;
}

// --- datagen -----------------------------------------------------------------

struct DatagenArgs {
  std::string dataset = "heat";
  std::size_t trajectories = 8;
  std::size_t grid = 64;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::string out = "data";
  bool csv = false;
};

datagen::DatasetConfig dataset_config(const std::string& kind, std::size_t trajectories,
                                      std::size_t grid, std::size_t steps, std::uint64_t seed) {
  datagen::DatasetConfig cfg;
  if (kind == "heat")
    cfg.kind = datagen::DatasetKind::Heat;
  else if (kind == "wave")
    cfg.kind = datagen::DatasetKind::Wave;
  else
    throw InvalidArgument("unknown dataset kind '" + kind + "' (expected heat or wave)");
  cfg.trajectories = trajectories;
  cfg.grid = grid;
  cfg.seed = seed;
  if (steps > 0) {
    cfg.heat.steps = steps;
    cfg.wave.steps = steps;
  }
  return cfg;
}

int run_datagen(const DatagenArgs& a) {
  const auto data = datagen::generate_dataset(
      dataset_config(a.dataset, a.trajectories, a.grid, a.steps, a.seed),
      surrogate::thread_budget());
  fs::create_directories(a.out);
  for (std::size_t i = 0; i < data.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "traj_%03zu", i);
    datagen::save_trajectory(data[i], (fs::path(a.out) / (std::string(name) + ".sctraj")).string());
    if (a.csv) {
      auto out = open_out((fs::path(a.out) / (std::string(name) + ".csv")).string());
      datagen::write_trajectory_csv(data[i], out);
    }
  }
  std::cerr << "wrote " << data.size() << " trajectories to " << a.out << '\n';
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string variant = "e2e";
  std::size_t epochs = 200;
  std::size_t batch = 8;
  std::size_t samples_per_epoch = 8;
  std::size_t cells = 5;
  std::size_t windows = 2;
  std::size_t adapt_every = 1;
  std::size_t hidden = 64;
  std::size_t trajectories = 8;
  std::uint64_t seed = 0;
  std::string out = "run";
};

std::vector<datagen::Trajectory> load_dataset(const TrainArgs& a) {
  if (a.dataset == "heat" || a.dataset == "wave")
    return datagen::generate_dataset(dataset_config(a.dataset, a.trajectories, 64, 0, a.seed),
                                     surrogate::thread_budget());
  const fs::path p(a.dataset);
  if (!fs::exists(p)) throw IoError("dataset '" + a.dataset + "' does not exist");
  std::vector<fs::path> files;
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p))
      if (e.path().extension() == ".sctraj") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(p);
  }
  if (files.empty()) throw IoError("no .sctraj files in '" + a.dataset + "'");
  std::vector<datagen::Trajectory> data;
  for (const auto& f : files) data.push_back(datagen::load_trajectory(f.string()));
  return data;
}

int run_train(const TrainArgs& a) {
  surrogate::TrainConfig cfg;
  cfg.variant = surrogate::parse_variant(a.variant);
  cfg.epochs = a.epochs;
  cfg.batch = a.batch;
  cfg.samples_per_epoch = a.samples_per_epoch;
  cfg.pipeline.cells = a.cells;
  cfg.pipeline.windows = a.windows;
  cfg.pipeline.adapt_every = a.adapt_every;
  cfg.model.hidden = a.hidden;
  cfg.seed = a.seed;
  const auto data = load_dataset(a);
  const auto result = surrogate::train(data, cfg);

  fs::create_directories(a.out);
  {
    auto out = open_out((fs::path(a.out) / "metrics.csv").string());
    surrogate::write_metrics_csv(result.history, out);
  }
  surrogate::save_checkpoint({result.params, surrogate::pipeline_for(cfg), cfg.variant,
                              result.channel_scale},
                             (fs::path(a.out) / "checkpoint.json").string());
  const nlohmann::json summary = {{"variant", a.variant},
                                  {"epochs", a.epochs},
                                  {"seed", a.seed},
                                  {"eval", {{"L", result.eval.L},
                                            {"L_s", result.eval.L_s},
                                            {"L_i", result.eval.L_i}}}};
  auto out = open_out((fs::path(a.out) / "summary.json").string());
  out << summary.dump(2) << '\n';
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal spline collocation toolkit"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  DemoArgs demo;
  auto* c_demo = app.add_subcommand("osc-demo", "Solve a 1D ODE by OSC and report the error");
  c_demo->add_option("--problem", demo.problem, "a3 or poly-exact")->capture_default_str();
  c_demo->add_option("--n", demo.n, "Number of cells")->check(CLI::Range(1, 100000))->capture_default_str();
  c_demo->add_option("--r", demo.r, "Polynomial order")->check(CLI::Range(2, 7))->capture_default_str();
  c_demo->add_option("--samples", demo.samples, "Evaluation points")->check(CLI::Range(2, 10000000))->capture_default_str();
  c_demo->add_option("--out", demo.out, "CSV of x,u,exact");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Interpolation error table: baselines vs OSC");
  c_cmp->add_option("--problem", cmp.problem, "1d-linear, 1d-nonlinear, 2d-linear or 2d-nonlinear");
  c_cmp->add_flag("--all", cmp.all, "All four problems");
  c_cmp->add_option("--cells", cmp.cells, "Fixed cell count (default: sweep resolutions)");
  c_cmp->add_option("--min-points", cmp.min_points)->capture_default_str();
  c_cmp->add_option("--max-points", cmp.max_points)->capture_default_str();
  c_cmp->add_option("--out", cmp.out, "CSV path (default stdout)");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench-abd", "ABD factorize+solve scaling benchmark");
  c_bench->add_option("--sizes", bench.sizes, "Matrix sizes")->delimiter(',')->capture_default_str();
  c_bench->add_option("--width", bench.width, "sqrt or fixed")->check(CLI::IsMember({"sqrt", "fixed"}))->capture_default_str();
  c_bench->add_option("--fixed-width", bench.fixed_width)->capture_default_str();
  c_bench->add_option("--min-time", bench.min_time, "Seconds per size")->capture_default_str();
  c_bench->add_option("--seed", bench.seed)->capture_default_str();
  c_bench->add_option("--out", bench.out, "CSV path (default stdout)");

  DatagenArgs gen;
  auto* c_gen = app.add_subcommand("datagen", "Generate heat or damped-wave trajectories");
  c_gen->add_option("--dataset", gen.dataset, "heat or wave")->capture_default_str();
  c_gen->add_option("--trajectories", gen.trajectories)->check(CLI::PositiveNumber)->capture_default_str();
  c_gen->add_option("--grid", gen.grid)->check(CLI::Range(4, 4096))->capture_default_str();
  c_gen->add_option("--steps", gen.steps, "Frames after the initial one (0: dataset default)");
  c_gen->add_option("--seed", gen.seed)->capture_default_str();
  c_gen->add_option("--out", gen.out, "Output directory")->capture_default_str();
  c_gen->add_flag("--csv", gen.csv, "Also write long-format CSV");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the message-passing surrogate");
  c_train->add_option("--dataset", tr.dataset, "heat, wave, a .sctraj file or a directory of them")->required();
  c_train->add_option("--variant", tr.variant)->check(CLI::IsMember({"post", "e2e", "e2e-adaptive"}))->capture_default_str();
  c_train->add_option("--epochs", tr.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--batch", tr.batch)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--samples-per-epoch", tr.samples_per_epoch, "Rollouts per epoch (0: all)")->capture_default_str();
  c_train->add_option("--cells", tr.cells, "Collocation cells per axis")->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--windows", tr.windows)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--adapt-every", tr.adapt_every, "Windows between adaptations")->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--hidden", tr.hidden)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--trajectories", tr.trajectories, "Generated trajectories for heat/wave")->capture_default_str();
  c_train->add_option("--seed", tr.seed)->capture_default_str();
  c_train->add_option("--out", tr.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_demo) return run_osc_demo(demo);
    if (*c_cmp) return run_compare(cmp);
    if (*c_bench) return run_bench(bench);
    if (*c_gen) return run_datagen(gen);
    if (*c_train) return run_train(tr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
