// zalms command line: run paper-style experiments, print closed-form
// predictions, sweep a parameter against theory.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric divergence in more
// than 10% of the trials of some algorithm.

#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "zalms/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

void print_prediction(const zalms::TheoryPrediction& p) {
  std::printf("mu_max=%.10g\n", p.mu_max);
  std::printf("p_attract=%.10g\n", p.p_attract);
  std::printf("mse=%.10g\n", p.mse);
  std::printf("mse_lms=%.10g\n", p.mse_lms);
  std::printf("excess_msd=%.10g\n", p.excess_msd);
  std::printf("regime_ok=%s\n", p.regime_ok ? "true" : "false");
}

int report_outcome(const zalms::ExperimentConfig& cfg,
                   const zalms::ExperimentReport& rep) {
  bool too_many_diverged = false;
  for (const auto& c : rep.curves) {
    std::string line = c.name;
    if (!c.curve.msd.empty()) {
      const auto [mm, ms] = zalms::steady_state_estimate(c.curve, cfg.tail_fraction);
      (void)ms;
      std::printf("%-24s msd_tail=%.4g", line.c_str(), mm);
    } else {
      std::printf("%-24s msd_tail=nan", line.c_str());
    }
    for (const auto& [name, iter] : rep.convergence_iters) {
      if (name == c.name) {
        if (iter) {
          std::printf("  conv@%gdB=%" PRIu64, cfg.convergence_db, *iter);
        } else {
          std::printf("  conv@%gdB=-", cfg.convergence_db);
        }
        break;
      }
    }
    if (c.diverged > 0) std::printf("  diverged=%zu", c.diverged);
    std::printf("\n");
    if (c.diverged * 10 > cfg.trials) too_many_diverged = true;
  }
  for (const auto& f : rep.files) std::printf("wrote %s\n", f.c_str());
  if (too_many_diverged) {
    std::fprintf(stderr, "error: more than 10%% of trials diverged\n");
    return kExitDivergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-point attraction LMS experiments"};
  app.require_subcommand(1);

  // --- run -----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run an experiment preset or config file");
  std::string preset_name, config_path, out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t trials = 0, iterations = 0, record_every = 0;
  unsigned threads = 0;
  bool has_seed = false;
  run_cmd->add_option("--preset", preset_name, "preset name (exp1_white, exp1_ar, exp2, exp3, exp4, exp5, exp6_mu, exp6_rho, exp7_a, exp7_b)");
  run_cmd->add_option("--config", config_path, "flat key=value config file");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed, "base seed")->each([&](const std::string&) { has_seed = true; });
  run_cmd->add_option("--trials", trials, "override trial count");
  run_cmd->add_option("--iterations", iterations, "override iteration count");
  run_cmd->add_option("--record-every", record_every, "override recording stride");
  run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

  // --- predict ---------------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("predict", "closed-form steady-state prediction");
  zalms::TheoryInputs ti;
  ti.mu = 1e-2;
  ti.rho = 2e-4;
  ti.a = 1e-2;
  ti.b = 0.8;
  ti.L = 100;
  ti.sigma_x2 = 1.0;
  ti.sigma_v2 = 1e-4;
  ti.ggd = zalms::GgdParams{0.0, 1.0, 0.1};
  pred_cmd->add_option("--mu", ti.mu, "step size");
  pred_cmd->add_option("--rho", ti.rho, "attraction strength");
  pred_cmd->add_option("--a", ti.a, "window lower threshold");
  pred_cmd->add_option("--b", ti.b, "window upper threshold");
  pred_cmd->add_option("--beta", ti.ggd.beta, "GGD shape");
  pred_cmd->add_option("--sigma-g", ti.ggd.sigma_g, "GGD standard deviation");
  pred_cmd->add_option("--L", ti.L, "filter length");
  pred_cmd->add_option("--sigma-x2", ti.sigma_x2, "input power");
  pred_cmd->add_option("--sigma-v2", ti.sigma_v2, "observation noise power");

  // --- sweep -----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "simulate a parameter sweep and compare with theory");
  std::string sweep_param = "rho";
  double sweep_from = 0.0, sweep_to = 1e-3;
  std::size_t sweep_points = 5;
  std::size_t sweep_trials = 50, sweep_iters = 20000, sweep_record = 10;
  std::uint64_t sweep_seed = 1;
  std::string sweep_out = "sweep_out";
  unsigned sweep_threads = 0;
  zalms::TheoryInputs si = ti;  // same operating-point defaults
  sweep_cmd->add_option("--param", sweep_param, "swept parameter: mu|rho|a|b")
      ->check(CLI::IsMember({"mu", "rho", "a", "b"}));
  sweep_cmd->add_option("--from", sweep_from, "first grid value")->required();
  sweep_cmd->add_option("--to", sweep_to, "last grid value")->required();
  sweep_cmd->add_option("--points", sweep_points, "grid size")->required();
  sweep_cmd->add_option("--mu", si.mu, "step size (when not swept)");
  sweep_cmd->add_option("--rho", si.rho, "attraction strength (when not swept)");
  sweep_cmd->add_option("--a", si.a, "window lower threshold (when not swept)");
  sweep_cmd->add_option("--b", si.b, "window upper threshold (when not swept)");
  sweep_cmd->add_option("--beta", si.ggd.beta, "GGD shape");
  sweep_cmd->add_option("--sigma-g", si.ggd.sigma_g, "GGD standard deviation");
  sweep_cmd->add_option("--L", si.L, "filter length");
  sweep_cmd->add_option("--sigma-x2", si.sigma_x2, "input power");
  sweep_cmd->add_option("--sigma-v2", si.sigma_v2, "observation noise power");
  sweep_cmd->add_option("--trials", sweep_trials, "trials per grid point");
  sweep_cmd->add_option("--iterations", sweep_iters, "iterations per trial");
  sweep_cmd->add_option("--record-every", sweep_record, "recording stride");
  sweep_cmd->add_option("--seed", sweep_seed, "base seed");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_option("--threads", sweep_threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      if (preset_name.empty() == config_path.empty()) {
        std::fprintf(stderr, "error: pass exactly one of --preset or --config\n");
        return kExitConfig;
      }
      zalms::ExperimentConfig cfg = preset_name.empty()
                                        ? zalms::parse_config_file(config_path)
                                        : zalms::preset(preset_name);
      if (has_seed) cfg.base_seed = seed;
      if (trials) cfg.trials = trials;
      if (iterations) cfg.iterations = iterations;
      if (record_every) cfg.record_every = record_every;
      cfg.output_dir = out_dir;
      const auto rep = zalms::run_experiment(cfg, threads);
      return report_outcome(cfg, rep);
    }

    if (pred_cmd->parsed()) {
      const auto p = zalms::steady_state_mse(ti);
      print_prediction(p);
      std::printf("mu,rho,a,b,beta,sigma_g,L,sigma_x2,sigma_v2,"
                  "mu_max,p_attract,mse,mse_lms,excess_msd,regime_ok\n");
      std::printf("%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%zu,%.10g,%.10g,"
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%s\n",
                  ti.mu, ti.rho, ti.a, ti.b, ti.ggd.beta, ti.ggd.sigma_g, ti.L,
                  ti.sigma_x2, ti.sigma_v2, p.mu_max, p.p_attract, p.mse,
                  p.mse_lms, p.excess_msd, p.regime_ok ? "true" : "false");
      return kExitOk;
    }

    // sweep
    if (sweep_points < 1) {
      std::fprintf(stderr, "error: --points must be >= 1\n");
      return kExitConfig;
    }
    zalms::ExperimentConfig cfg;
    zalms::SystemVariant sv;
    sv.spec.family = zalms::SystemFamily::GgdNearSparse;
    sv.spec.L = si.L;
    sv.spec.ggd = si.ggd;
    cfg.systems = {sv};
    cfg.input.power = si.sigma_x2;
    cfg.noise.variance = si.sigma_v2;
    cfg.trials = sweep_trials;
    cfg.iterations = sweep_iters;
    cfg.record_every = sweep_record;
    cfg.tail_fraction = 0.25;
    cfg.base_seed = sweep_seed;
    cfg.output_dir = sweep_out;
    for (std::size_t i = 0; i < sweep_points; ++i) {
      const double v = sweep_points == 1
                           ? sweep_from
                           : sweep_from + (sweep_to - sweep_from) *
                                              static_cast<double>(i) /
                                              static_cast<double>(sweep_points - 1);
      zalms::DwzaLms p{si.mu, si.rho, si.a, si.b};
      if (sweep_param == "mu") p.mu = v;
      else if (sweep_param == "rho") p.rho = v;
      else if (sweep_param == "a") p.a = v;
      else p.b = v;
      char name[64];
      std::snprintf(name, sizeof(name), "dwza_%s_%zu", sweep_param.c_str(), i);
      cfg.algorithms.push_back({name, p});
    }
    const auto rep = zalms::run_experiment(cfg, sweep_threads);
    const auto rows = zalms::compare_theory(cfg, rep);
    std::printf("%-16s %14s %14s %10s %s\n", "name", "sim_mse", "pred_mse",
                "ratio", "flag");
    for (const auto& r : rows) {
      if (r.out_of_range) {
        std::printf("%-16s %14.6g %14s %10s out-of-range\n", r.name.c_str(),
                    r.sim_mse, "-", "-");
      } else {
        std::printf("%-16s %14.6g %14.6g %10.4f %s\n", r.name.c_str(), r.sim_mse,
                    r.pred_mse, r.ratio, r.outside_band ? "outside-band" : "ok");
      }
    }
    return report_outcome(cfg, rep);
  } catch (const zalms::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const zalms::theory_out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
