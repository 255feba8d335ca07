#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fastlim/config.hpp"
#include "fastlim/rate_fit.hpp"
#include "fastlim/snapshot.hpp"
#include "fastlim/svg.hpp"
#include "fastlim/sweep.hpp"

namespace {

using namespace fastlim;

int jobs_override(int cli_jobs) {
  // FASTLIM_THREADS is the only environment knob; it wins over flag and plan.
  if (const char* env = std::getenv("FASTLIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
    std::cerr << "warning: ignoring invalid FASTLIM_THREADS='" << env << "'\n";
  }
  return cli_jobs;
}

void print_warnings(const RunConfig& cfg) {
  for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_sweep(const std::string& plan_path, std::string out_dir, int jobs) {
  const ExperimentPlan plan = parse_plan(read_text_file(plan_path));
  print_warnings(plan.run);
  if (out_dir.empty()) out_dir = plan.out_dir;
  if (jobs <= 0) jobs = plan.jobs;
  jobs = jobs_override(jobs);

  const SweepResult result = run_sweep(plan, out_dir, jobs);

  std::cout << "sweep: " << result.rows.size() << " eps runs -> " << out_dir << "\n";
  for (const EpsRunRow& r : result.rows) {
    std::cout << "  eps=" << r.eps;
    if (r.ok) {
      std::cout << "  residual=" << r.residual_norm;
      if (r.vs_limit) std::cout << "  |N-N_lim|_L2=" << r.vs_limit->n_l2;
    } else {
      std::cout << "  FAILED: " << r.message;
    }
    std::cout << "\n";
  }
  if (result.rate) {
    std::cout << "fitted slope " << result.rate->slope << " (r^2 " << result.rate->r_squared
              << (result.rate->plateau_detected ? ", plateau removed" : "") << ")\n";
  } else {
    std::cout << "rate fit unavailable: " << result.rate_error << "\n";
  }
  if (result.duality) {
    std::cout << "duality condition: " << (result.duality->satisfied ? "satisfied" : "violated")
              << " (margin " << result.duality->margin << ", q0 " << result.duality->q0 << ")\n";
  }
  std::cout << (result.thresholds_pass ? "acceptance thresholds: PASS" : "acceptance thresholds: FAIL")
            << "\n";
  return result.thresholds_pass ? 0 : 1;
}

int cmd_run_fast(const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = parse_run_config(read_text_file(config_path));
  print_warnings(cfg);
  const FastTrajectory traj = run_fast_command(cfg, out_dir);
  std::cout << "run-fast: " << traj.states.size() << " emitted states -> " << out_dir << "\n";
  return 0;
}

int cmd_run_limit(const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = parse_run_config(read_text_file(config_path));
  print_warnings(cfg);
  const LimitTrajectory traj = run_limit_command(cfg, out_dir);
  std::cout << "run-limit: " << traj.states.size() << " emitted states -> " << out_dir << "\n";
  return 0;
}

int cmd_rates(const std::string& in_csv, std::string out_dir, bool drop_plateau) {
  std::istringstream in(read_text_file(in_csv));
  std::string line;
  std::vector<RateSample> samples;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find("eps") != std::string::npos) {
      first = false;
      continue; // header
    }
    first = false;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) continue;
    samples.push_back({std::strtod(a.c_str(), nullptr), std::strtod(b.c_str(), nullptr)});
  }
  const RateReport rep = fit_rate(samples, drop_plateau);
  std::cout << "slope " << rep.slope << "  intercept " << rep.intercept << "  r^2 "
            << rep.r_squared << (rep.plateau_detected ? "  [plateau removed]" : "") << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream fit_csv;
    fit_csv << "slope,intercept,r_squared,plateau_detected,points_used\n";
    fit_csv << fmt17(rep.slope) << "," << fmt17(rep.intercept) << "," << fmt17(rep.r_squared)
            << "," << (rep.plateau_detected ? "true" : "false") << "," << rep.fit_count << "\n";
    atomic_write_file(out_dir + "/rate_fit.csv", fit_csv.str());
    atomic_write_file(out_dir + "/rates.svg", emit_rate_plot_svg(rep));
    std::cout << "wrote " << out_dir << "/rate_fit.csv and rates.svg\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastlim: fast-reaction predator-prey system and its cross-diffusion limits"};
  app.require_subcommand(1);

  std::string plan_path, config_path, out_dir, in_csv;
  int jobs = 0;
  bool no_drop_plateau = false;

  CLI::App* sweep = app.add_subcommand("sweep", "run an eps sweep from a plan file");
  sweep->add_option("--plan", plan_path, "plan file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "output directory (default: plan's out_dir)");
  sweep->add_option("--jobs", jobs, "parallel eps runs (default: plan's jobs)");

  CLI::App* runf = app.add_subcommand("run-fast", "integrate the three-field system once");
  runf->add_option("--config", config_path, "run config file")->required()->check(CLI::ExistingFile);
  runf->add_option("--out", out_dir, "output directory (default: out/run-fast)");

  CLI::App* runl = app.add_subcommand("run-limit", "integrate the limiting (N,P) system once");
  runl->add_option("--config", config_path, "run config file")->required()->check(CLI::ExistingFile);
  runl->add_option("--out", out_dir, "output directory (default: out/run-limit)");

  CLI::App* rates = app.add_subcommand("rates", "fit a log-log rate from a (eps,residual) CSV");
  rates->add_option("--in", in_csv, "input CSV")->required()->check(CLI::ExistingFile);
  rates->add_option("--out", out_dir, "output directory for rate_fit.csv / rates.svg");
  rates->add_flag("--no-drop-plateau", no_drop_plateau, "fit all samples, keep the plateau");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(plan_path, out_dir, jobs);
    if (runf->parsed()) return cmd_run_fast(config_path, out_dir.empty() ? "out/run-fast" : out_dir);
    if (runl->parsed()) return cmd_run_limit(config_path, out_dir.empty() ? "out/run-limit" : out_dir);
    if (rates->parsed()) return cmd_rates(in_csv, out_dir, !no_drop_plateau);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
