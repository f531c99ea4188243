// fhnrom: offline/online reduced-order experiments for the FitzHugh-Nagumo
// system on a dG discretization.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fhnrom/checks.hpp"
#include "fhnrom/error.hpp"
#include "fhnrom/experiment.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> refinements;
  std::optional<double> t_final;
  std::optional<int> modes;
  std::optional<int> deim_modes;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  bool no_snapshots = false;
  bool quiet = false;
};

fhnrom::ExperimentConfig resolve(const Overrides& o, std::optional<int> default_refinements = {}) {
  fhnrom::ExperimentConfig c = o.config_path.empty() ? fhnrom::ExperimentConfig{} : fhnrom::load_config(o.config_path);
  if (default_refinements && o.config_path.empty()) c.refinements = *default_refinements;
  if (o.refinements) c.refinements = *o.refinements;
  if (o.t_final) c.t_final = *o.t_final;
  if (o.modes) c.modes = *o.modes;
  if (o.deim_modes) c.deim_modes = *o.deim_modes;
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.jobs) c.jobs = *o.jobs;
  c.validate();
  return c;
}

void print_summary(const fhnrom::BenchmarkReport& report) {
  std::cout << "k = " << report.modes << ", n = " << report.deim_modes << ", ||(P^T W)^-1||_2 = " << report.deim_bound
            << "\n";
  std::cout << "mu        FOM[s]     POD[s]     DEIM[s]    S_POD    S_DEIM   err_POD    err_DEIM\n";
  for (const auto& c : report.cases) {
    if (!c.ok) {
      std::cout << fhnrom::mu_label(c.mu) << "  FAILED: " << c.error << "\n";
      continue;
    }
    std::printf("%s  %-9.3f  %-9.3f  %-9.3f  %-7.2f  %-7.2f  %-9.2e  %-9.2e\n", fhnrom::mu_label(c.mu).c_str(),
                c.fom_seconds, c.pod_seconds, c.deim_seconds, c.speedup_pod, c.speedup_deim, c.pod_error,
                c.deim_error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order FitzHugh-Nagumo experiments"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--refinements", o.refinements, "uniform refinements of the base mesh");
    sub->add_option("--tfinal", o.t_final, "final time");
    sub->add_option("--modes", o.modes, "POD modes k (default: energy criterion)");
    sub->add_option("--deim-modes", o.deim_modes, "DEIM points n (default: energy criterion)");
    sub->add_option("--seed", o.seed, "initial-condition seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--jobs", o.jobs, "parallel FOM runs");
    sub->add_flag("--quiet", o.quiet, "no progress output");
  };
  CLI::App* offline = app.add_subcommand("offline", "FOM sweep, POD and DEIM; writes artifacts");
  CLI::App* online = app.add_subcommand("online", "FOM and ROM runs at the test parameters");
  CLI::App* full = app.add_subcommand("full", "offline then online");
  CLI::App* check = app.add_subcommand("check", "invariant suite on a small mesh (refinements 2 by default)");
  for (CLI::App* sub : {offline, online, full, check}) add_common(sub);
  for (CLI::App* sub : {offline, full}) sub->add_flag("--no-snapshots", o.no_snapshots, "skip snapshot files");

  CLI11_PARSE(app, argc, argv);

  try {
    fhnrom::RunOptions options;
    options.log = o.quiet ? nullptr : &std::cerr;
    options.write_snapshots = !o.no_snapshots;

    if (check->parsed()) {
      const fhnrom::ExperimentConfig config = resolve(o, 2);
      return fhnrom::print_checks(std::cout, fhnrom::run_checks(config)) ? 0 : 1;
    }
    const fhnrom::ExperimentConfig config = resolve(o);
    if (offline->parsed()) {
      const auto art = fhnrom::run_offline(config, options);
      std::cout << "offline complete: k = " << art.basis.u.size() << ", n = " << art.deim->num_points()
                << ", artifacts in " << config.output_dir << "\n";
      return 0;
    }
    const auto art = online->parsed() ? fhnrom::load_offline(config, config.output_dir)
                                      : fhnrom::run_offline(config, options);
    const auto report = fhnrom::run_online(config, art, options);
    fhnrom::emit_figures(report, *art.space, config.output_dir);
    print_summary(report);
    for (const auto& c : report.cases)
      if (!c.ok) return 2;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fhnrom: " << e.what() << "\n";
    return 1;
  }
}
