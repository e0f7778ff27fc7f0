// Command-line front end: run presets or config files, convergence ladders and the
// efficiency comparison. All output is CSV; diagnostics go to stderr.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mtfe/config.hpp"
#include "mtfe/error.hpp"
#include "mtfe/harness.hpp"

namespace {

using namespace mtfe;

constexpr int kOk = 0, kBlowup = 2, kSolverFailure = 3, kConfigError = 4;

ModelSpec resolve_model(const std::string& name, const std::string& config) {
  if (!config.empty()) return load_config(config);
  if (name.empty()) throw SolverError(ErrorCode::ConfigError, "give --model or --config");
  return find_preset(name).spec;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw SolverError(ErrorCode::ConfigError, "cannot write " + p.string());
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass transport / finite element solver for taxis-diffusion-reaction models"};
  app.require_subcommand(1);
  bool seedless = false;
  app.add_flag("--seedless", seedless, "Deterministic mode (the solver uses no random numbers)");

  std::string model_name, config_path, out_dir = ".";
  int M = 0, N = -1;
  double t_end = -1.0;
  std::vector<double> snapshots;
  bool dump_config = false;
  auto* run = app.add_subcommand("run", "Integrate a preset or config file and write CSV snapshots");
  run->add_option("--model", model_name, "Preset name");
  run->add_option("--config", config_path, "Model config file (key = value)");
  run->add_option("--M", M, "Mass grid cells");
  run->add_option("--N", N, "FE grid cells");
  run->add_option("--t-end", t_end, "Final time");
  run->add_option("--snapshots", snapshots, "Snapshot times")->delimiter(',');
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--dump-config", dump_config, "Print the resolved model as a config file and exit");

  std::string mode = "spatial";
  std::vector<int> ladder;
  double dt = 1e-4;
  auto* eoc_cmd = app.add_subcommand("eoc", "Convergence ladder with fixed time increments");
  eoc_cmd->add_option("--model", model_name, "Preset name")->required();
  eoc_cmd->add_option("--mode", mode, "spatial or temporal")->check(CLI::IsMember({"spatial", "temporal"}));
  eoc_cmd->add_option("--ladder", ladder, "Doubling list of M (spatial) or halving divisors of --dt (temporal)")
      ->delimiter(',')
      ->required();
  eoc_cmd->add_option("--t-end", t_end, "Final time")->required();
  eoc_cmd->add_option("--dt", dt, "Fixed increment (spatial) or coarsest increment (temporal)");
  eoc_cmd->add_option("--M", M, "Resolution of the temporal ladder");

  std::vector<int> set;
  auto* compare = app.add_subcommand("compare", "Error versus wall time against the uniform baseline");
  compare->add_option("--model", model_name, "Preset name")->required();
  compare->add_option("--set", set, "Resolutions M")->delimiter(',')->required();
  compare->add_option("--t-end", t_end, "Final time (default: preset t_end)");

  auto* list = app.add_subcommand("list-models", "Print the preset catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*list) {
      for (const auto& p : catalog()) {
        std::string tags;
        for (const auto& t : p.tags) tags += (tags.empty() ? "" : ",") + t;
        std::printf("%s\t%s\n", p.name.c_str(), tags.c_str());
      }
      return kOk;
    }

    if (*run) {
      ModelSpec m = resolve_model(model_name, config_path);
      if (M > 0) m.M = M;
      if (N >= 0) m.N = N;
      if (t_end >= 0.0) {
        m.t_end = t_end;
        std::erase_if(m.snapshots, [&](double t) { return t > t_end; });
      }
      if (!snapshots.empty()) m.snapshots = snapshots;
      if (dump_config) {
        std::cout << to_config(m);
        return kOk;
      }
      const Simulation sim(m);
      const auto result = sim.run();
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / "state.csv", state_csv(result.snapshots));
      if (!m.fields.empty())
        write_file(std::filesystem::path(out_dir) / "fields.csv", fields_csv(result.snapshots, m));
      const auto& last = result.blowup ? result.blowup->last : result.snapshots.back();
      std::fprintf(stderr, "steps=%ld newton_iters=%ld retries=%ld clamped=%ld t=%.17g mass=%.17g\n",
                   last.step_count, last.newton_iters, last.retries, last.clamped_negatives, last.t, last.mass());
      if (result.blowup) {
        std::fprintf(stderr, "blowup at t=%.17g: %s\n", result.blowup->t, result.blowup->message.c_str());
        return kBlowup;
      }
      return kOk;
    }

    if (*eoc_cmd) {
      const ModelSpec m = find_preset(model_name).spec;
      EocLadder L;
      if (mode == "spatial") {
        L = spatial_ladder(m, ladder, dt, t_end);
      } else {
        std::vector<double> dts;
        for (int k : ladder) dts.push_back(dt / k);
        L = temporal_ladder(m, M > 0 ? M : m.M, dts, t_end);
      }
      std::cout << ladder_csv(L);
      return kOk;
    }

    if (*compare) {
      const ModelSpec m = find_preset(model_name).spec;
      EfficiencyOptions opt;
      opt.t_end = t_end >= 0.0 ? t_end : m.t_end;
      std::cout << "# baseline: uniform finite volume stand-in, not the adaptive reference scheme\n";
      std::cout << records_csv(compare_efficiency(m, set, opt));
      return kOk;
    }
  } catch (const SolverError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    switch (e.code()) {
      case ErrorCode::ConfigError: return kConfigError;
      case ErrorCode::BlowupDetected: return kBlowup;
      default: return kSolverFailure;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolverFailure;
  }
  return kOk;
}
