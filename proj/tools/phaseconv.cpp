// phaseconv: instance generation, single solves, phase portraits and noise sweeps.
//
//   phaseconv gen --m 128 --k 4 --n 4 --seed 7 --out inst.json
//   phaseconv solve --instance inst.json --out run/
//   phaseconv phase --preset desk --threads 8 --out phase/
//   phaseconv noise-sweep --config sweep.json --deterministic --out noise/

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "phaseconv/bench.hpp"
#include "phaseconv/instance_io.hpp"

using namespace phaseconv;

namespace {

constexpr int kConfigError = 2;

struct GridFlags {
  std::string config;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool deterministic = false;
};

void add_grid_flags(CLI::App* cmd, GridFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "Base grid")->check(CLI::IsMember({"desk", "full"}));
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--deterministic", f.deterministic, "Zero timing columns for byte-identical reruns");
}

bench::ExperimentConfig build_config(const GridFlags& f, bool noise_sweep) {
  bench::ExperimentConfig cfg = f.preset == "full" ? bench::ExperimentConfig::full() : bench::ExperimentConfig::desk();
  if (noise_sweep) {
    cfg.m_values = {128};
    cfg.kn_pairs = {{4, 4}};
    cfg.trials = f.preset == "full" ? 100 : 10;
  }
  if (!f.config.empty()) cfg = bench::config_from_json(io::read_json_file(f.config), cfg);
  if (f.seed) cfg.base_seed = *f.seed;
  cfg.out_dir = f.out;
  cfg.threads = f.threads;
  cfg.deterministic = cfg.deterministic || f.deterministic;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind deconvolutional phase retrieval: solver and experiment harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a problem instance");
  int gm = 128, gk = 4, gn = 4;
  std::string gmode = "GaussianRows", gout = "instance.json";
  std::uint64_t gseed = 1;
  bool compact = false;
  gen->add_option("--m", gm, "Number of measurements")->check(CLI::PositiveNumber);
  gen->add_option("--k", gk, "Dimension of h")->check(CLI::PositiveNumber);
  gen->add_option("--n", gn, "Dimension of m")->check(CLI::PositiveNumber);
  gen->add_option("--mode", gmode, "GaussianRows | FourierIdentityB | FourierGaussian");
  gen->add_option("--seed", gseed, "Generator seed");
  gen->add_option("--out", gout, "Output file");
  gen->add_flag("--compact", compact, "Store seed and dimensions only; rows are regenerated on load");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance and write report.json");
  bench::SingleRunOptions sopt;
  std::string sinst, sconfig, smode = "GaussianRows", sout = ".";
  solve->add_option("--instance", sinst, "Instance file from `gen`")->check(CLI::ExistingFile);
  solve->add_option("--m", sopt.m)->check(CLI::PositiveNumber);
  solve->add_option("--k", sopt.k)->check(CLI::PositiveNumber);
  solve->add_option("--n", sopt.n)->check(CLI::PositiveNumber);
  solve->add_option("--mode", smode);
  solve->add_option("--seed", sopt.seed, "Generator seed when no instance file is given");
  solve->add_option("--noise", sopt.noise_eps, "Noise level ε (uniform random sign)")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--config", sconfig, "JSON solver config")->check(CLI::ExistingFile);
  solve->add_option("--out", sout, "Output directory");
  solve->add_flag("--factors", sopt.include_factors, "Include V₁, V₂ in the report");

  GridFlags pflags, nflags;
  auto* phase = app.add_subcommand("phase", "Phase portrait over (m, k+n)");
  add_grid_flags(phase, pflags);
  auto* noise = app.add_subcommand("noise-sweep", "Lifted error against the noise bound");
  add_grid_flags(noise, nflags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (gen->parsed()) {
      const ProblemInstance inst = gen_instance(gm, gk, gn, subspace_mode_from_string(gmode), gseed);
      io::save_instance(gout, inst, !compact);
      std::cout << "wrote " << gout << '\n';
    } else if (solve->parsed()) {
      if (!sinst.empty()) sopt.instance_file = sinst;
      sopt.mode = subspace_mode_from_string(smode);
      if (!sconfig.empty()) {
        const auto doc = io::read_json_file(sconfig);
        sopt.solver = io::config_from_json(doc.contains("solver") ? doc["solver"] : doc);
      }
      sopt.out_dir = sout;
      const auto rep = bench::run_single(sopt);
      std::cout << "iterations " << rep.iterations << ", converged " << (rep.converged ? "yes" : "no");
      if (rep.errors) std::cout << ", signal error " << rep.errors->signal_error();
      std::cout << '\n';
    } else if (phase->parsed()) {
      const auto cfg = build_config(pflags, false);
      const auto cells = bench::run_phase(cfg);
      for (int m : cfg.m_values) {
        const auto rates = bench::rates_by_total_dim(cells, m);
        const auto cross = bench::half_success_crossing(rates);
        std::cout << "m=" << m << "  50% crossing at k+n ";
        if (cross) std::cout << *cross; else std::cout << "> grid";
        std::cout << '\n';
      }
      std::cout << "wrote " << (cfg.out_dir / "phase.csv").string() << '\n';
    } else if (noise->parsed()) {
      const auto cfg = build_config(nflags, true);
      const auto levels = bench::run_noise_sweep(cfg);
      int violations = 0;
      for (const auto& l : levels) {
        violations += l.bound_violations;
        std::cout << "eps=" << l.eps << "  mean lifted error " << l.mean_lifted_error << '\n';
      }
      std::cout << "bound violations: " << violations << '\n';
      std::cout << "wrote " << (cfg.out_dir / "noise.csv").string() << '\n';
    }
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
