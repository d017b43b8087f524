#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvqd/denoiser.hpp"
#include "cvqd/diffusion.hpp"
#include "cvqd/fock.hpp"
#include "cvqd/io.hpp"
#include "cvqd/trainer.hpp"
#include "cvqd/types.hpp"
#include "cvqd/verify.hpp"

namespace fs = std::filesystem;
using namespace cvqd;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::string profile = "desk";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_profile = true) {
  cmd->add_option("--config", c.config, "configuration file (key = value lines)");
  cmd->add_option("--out", c.out, "output directory");
  if (with_profile)
    cmd->add_option("--profile", c.profile, "hyperparameter profile")
        ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", c.seed, "override the RNG seed")
      ->each([&c](const std::string&) { c.seed_given = true; });
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Err::IoError, "cannot create output directory '" + out + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

trainer::TrainConfig resolve_config(const Common& c, bool restoration,
                                    io::ConfigMap* cfg_out) {
  trainer::TrainConfig base;
  if (c.profile == "paper")
    base = restoration ? io::paper_restore_profile() : io::paper_gen_profile();
  else
    base = restoration ? io::desk_restore_profile() : io::desk_gen_profile();
  io::ConfigMap cfg =
      c.config.empty() ? io::ConfigMap::from_text("") : io::ConfigMap::from_file(c.config);
  trainer::TrainConfig resolved = io::apply_config(cfg, base);
  if (c.seed_given) resolved.seed = c.seed;
  if (cfg_out) *cfg_out = cfg;
  return resolved;
}

io::RunManifest start_manifest(const std::string& command, const Common& c,
                               std::uint64_t seed) {
  io::RunManifest mf;
  mf.command = command;
  mf.config_path = c.config;
  mf.seed = seed;
  mf.started_at = io::utc_timestamp();
  return mf;
}

void finish_manifest(io::RunManifest& mf, const std::string& out_dir) {
  mf.finished_at = io::utc_timestamp();
  std::string path = join(out_dir, "manifest.json");
  mf.outputs.push_back(path);
  io::save_manifest(path, mf);
}

std::vector<std::pair<int, double>> chain_curve(double head_fidelity, int t_start,
                                                const std::vector<double>& fids) {
  std::vector<std::pair<int, double>> rows;
  rows.push_back({t_start, head_fidelity});
  for (size_t i = 0; i < fids.size(); ++i)
    rows.push_back({t_start - 1 - int(i), fids[i]});
  return rows;
}

int cmd_train(const Common& c, bool restoration) {
  io::ConfigMap cfg_map;
  trainer::TrainConfig cfg = resolve_config(c, restoration, &cfg_map);
  ensure_out_dir(c.out);
  io::RunManifest mf = start_manifest(restoration ? "train-restore" : "train-gen", c,
                                      cfg.seed);

  io::Checkpoint ck;
  ck.cfg = cfg;
  trainer::TrainResult result;
  if (restoration) {
    ck.role = "restoration";
    result = trainer::train_restoration({cfg.s_max}, cfg);
  } else {
    ck.role = "generative";
    ck.target = io::target_from_config(cfg_map);
    result = trainer::train_generative(io::build_target(ck.target, cfg.cutoff), cfg);
  }
  ck.theta = result.theta.values;
  ck.summary = {result.final_loss, result.best_loss, result.iterations, result.converged};

  std::string ck_path = join(c.out, "checkpoint.json");
  std::string metrics_path = join(c.out, "metrics.csv");
  io::save_checkpoint(ck_path, ck);
  io::atomic_write_file(metrics_path, io::metrics_csv(result.metrics));
  mf.outputs = {ck_path, metrics_path};
  finish_manifest(mf, c.out);
  std::cout << "trained " << ck.role << " model: best_loss "
            << io::format_g17(result.best_loss) << ", " << result.iterations
            << " iterations" << (result.converged ? " (converged)" : "") << "\n";
  return 0;
}

int cmd_generate(const Common& c, const std::string& ck_path, double nbar_override,
                 bool has_nbar, bool record) {
  io::Checkpoint ck = io::load_checkpoint(ck_path);
  if (ck.role != "generative")
    throw Error(Err::ConfigError, "generate needs a generative checkpoint");
  double nbar = has_nbar ? nbar_override : ck.cfg.nbar;
  ensure_out_dir(c.out);
  io::RunManifest mf = start_manifest("generate", c, ck.cfg.seed);

  DensityMatrix target = fock::renormalize(io::build_target(ck.target, ck.cfg.cutoff));
  DensityMatrix start = fock::renormalize(fock::make_thermal(nbar, ck.cfg.cutoff));
  denoiser::ThetaVector theta{ck.cfg.layers, ck.theta};
  denoiser::ChainResult chain = denoiser::backward_chain(
      start, ck.cfg.timesteps, theta, ck.cfg.embed(), &target);

  std::string state_path = join(c.out, "generated_state.json");
  io::save_state(state_path, chain.state);
  mf.outputs = {state_path};
  if (record) {
    std::string curve_path = join(c.out, "generation_curve.csv");
    io::atomic_write_file(
        curve_path,
        io::curve_csv(chain_curve(fock::fidelity(start, target), ck.cfg.timesteps,
                                  chain.fidelity),
                      "fidelity_vs_target"));
    mf.outputs.push_back(curve_path);
  }
  finish_manifest(mf, c.out);
  std::cout << "generated state fidelity vs target: "
            << io::format_g17(fock::fidelity(chain.state, target)) << "\n";
  return 0;
}

int cmd_diffuse(const Common& c, int t, bool has_t, bool curve) {
  io::ConfigMap cfg_map;
  trainer::TrainConfig cfg = resolve_config(c, false, &cfg_map);
  DensityMatrix rho0 =
      fock::renormalize(io::build_target(io::target_from_config(cfg_map), cfg.cutoff));
  diffusion::NoiseSchedule sched =
      diffusion::linear_schedule(cfg.eta0, cfg.etaT, cfg.timesteps);
  diffusion::Environment env{cfg.nbar};
  ensure_out_dir(c.out);
  io::RunManifest mf = start_manifest("diffuse", c, cfg.seed);

  std::string sched_path = join(c.out, "schedule.csv");
  io::atomic_write_file(sched_path, io::schedule_csv(sched));
  mf.outputs = {sched_path};
  if (curve) {
    std::vector<std::pair<int, double>> rows;
    rows.push_back({0, 1.0});
    for (int step = 1; step <= cfg.timesteps; ++step)
      rows.push_back({step, fock::fidelity(rho0, fock::renormalize(diffusion::diffuse_to(
                                                     rho0, step, sched, env)))});
    std::string curve_path = join(c.out, "diffusion_curve.csv");
    io::atomic_write_file(curve_path, io::curve_csv(rows, "fidelity_vs_initial"));
    mf.outputs.push_back(curve_path);
  } else {
    if (!has_t) throw Error(Err::ConfigError, "diffuse needs --t or --curve");
    if (t < 0 || t > cfg.timesteps)
      throw Error(Err::ConfigError, "--t must lie in 0..total_timesteps");
    std::string state_path = join(c.out, "diffused_state.json");
    io::save_state(state_path,
                   fock::renormalize(diffusion::diffuse_to(rho0, t, sched, env)));
    mf.outputs.push_back(state_path);
  }
  finish_manifest(mf, c.out);
  return 0;
}

int cmd_restore(const Common& c, const std::string& ck_path, const std::string& input,
                double s, double phase, double eta_ch, bool has_synth,
                double nbar_override, bool has_nbar) {
  io::Checkpoint ck = io::load_checkpoint(ck_path);
  if (ck.role != "restoration")
    throw Error(Err::ConfigError, "restore needs a restoration checkpoint");
  if (input.empty() == !has_synth)
    throw Error(Err::ConfigError,
                "restore needs exactly one of --input or the synth descriptor "
                "(--s/--phase/--eta-ch)");
  double nbar = has_nbar ? nbar_override : ck.cfg.nbar;
  ensure_out_dir(c.out);
  io::RunManifest mf = start_manifest("restore", c, ck.cfg.seed);

  DensityMatrix corrupted;
  DensityMatrix reference;
  std::string ref_column;
  if (has_synth) {
    if (eta_ch < 0.0 || eta_ch > 1.0)
      throw Error(Err::ConfigError, "--eta-ch must lie in [0,1]");
    reference = fock::renormalize(fock::make_coherent(s * std::exp(cxd(0, phase)),
                                                      ck.cfg.cutoff));
    corrupted = fock::renormalize(diffusion::corrupt(reference, eta_ch, {nbar}));
    ref_column = "fidelity_vs_clean";
  } else {
    try {
      corrupted = io::load_state(input);
    } catch (const Error& e) {
      if (e.kind() == Err::IoError) throw Error(Err::ConfigError, e.what());
      throw;
    }
    if (corrupted.modes != 1 || corrupted.cutoff != ck.cfg.cutoff)
      throw Error(Err::ConfigError,
                  "input state must be single-mode at the checkpoint cutoff");
    corrupted = fock::renormalize(corrupted);
    reference = corrupted;
    ref_column = "fidelity_vs_input";
  }

  denoiser::ThetaVector theta{ck.cfg.layers, ck.theta};
  denoiser::ChainResult chain = denoiser::backward_chain(
      corrupted, ck.cfg.timesteps, theta, ck.cfg.embed(), &reference);

  std::string state_path = join(c.out, "restored_state.json");
  std::string curve_path = join(c.out, "restoration_curve.csv");
  io::save_state(state_path, chain.state);
  io::atomic_write_file(
      curve_path, io::curve_csv(chain_curve(fock::fidelity(corrupted, reference),
                                            ck.cfg.timesteps, chain.fidelity),
                                ref_column));
  mf.outputs = {state_path, curve_path};
  finish_manifest(mf, c.out);
  std::cout << "restored state fidelity vs reference: "
            << io::format_g17(fock::fidelity(chain.state, reference)) << "\n";
  return 0;
}

int cmd_verify(const Common& c, std::vector<std::string> suites,
               const std::string& fault_name, bool out_given) {
  verify::Fault fault = verify::fault_from_string(fault_name);
  if (suites.empty()) suites = verify::suite_names();
  std::vector<verify::CheckResult> results;
  for (const std::string& s : suites) {
    std::vector<verify::CheckResult> r = verify::run_suite(s, fault);
    results.insert(results.end(), r.begin(), r.end());
  }
  std::cout << verify::report_text(results);
  if (out_given) {
    ensure_out_dir(c.out);
    io::atomic_write_file(join(c.out, "verify_report.json"),
                          verify::report_json(results));
  }
  return verify::all_passed(results) ? 0 : 1;
}

int cmd_sweep(const Common& c, const std::string& param,
              const std::vector<double>& values) {
  if (values.empty()) throw Error(Err::ConfigError, "sweep needs --values");
  io::ConfigMap cfg_map;
  trainer::TrainConfig cfg = resolve_config(c, false, &cfg_map);
  ensure_out_dir(c.out);
  io::RunManifest mf = start_manifest("sweep", c, cfg.seed);

  std::vector<io::SweepRow> rows;
  for (double v : values) {
    io::TargetDescriptor td;
    if (param == "alpha") {
      td.kind = "coherent";
      td.alpha_re = v;
    } else {
      td.kind = "squeezed";
      td.squeeze_r = v;
    }
    DensityMatrix target = io::build_target(td, cfg.cutoff);
    trainer::TrainResult result = trainer::train_generative(target, cfg);
    denoiser::ThetaVector theta = result.theta;
    denoiser::ChainResult chain =
        denoiser::backward_chain(fock::make_thermal(cfg.nbar, cfg.cutoff),
                                 cfg.timesteps, theta, cfg.embed(), nullptr);
    rows.push_back({v, cfg.nbar, fock::fidelity(chain.state, target),
                    result.iterations});
    std::cout << param << "=" << io::format_g17(v)
              << " fidelity=" << io::format_g17(rows.back().fidelity) << "\n";
  }
  std::string csv_path = join(c.out, "sweep.csv");
  io::atomic_write_file(csv_path, io::sweep_csv(rows));
  mf.outputs = {csv_path};
  finish_manifest(mf, c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-variable quantum diffusion toolkit"};
  app.require_subcommand(1);

  Common c_train_gen, c_gen, c_diff, c_train_res, c_res, c_ver, c_sweep;

  CLI::App* train_gen = app.add_subcommand("train-gen", "train a generative model");
  add_common(train_gen, c_train_gen);

  CLI::App* generate = app.add_subcommand("generate", "run the backward chain from noise");
  add_common(generate, c_gen);
  std::string gen_ck;
  double gen_nbar = 0.0;
  bool gen_no_record = false;
  generate->add_option("--checkpoint", gen_ck, "trained generative checkpoint")
      ->required();
  CLI::Option* gen_nbar_opt =
      generate->add_option("--nbar", gen_nbar, "override the starting thermal occupation");
  generate->add_flag("--no-record", gen_no_record, "skip the fidelity curve");

  CLI::App* diffuse = app.add_subcommand("diffuse", "run the forward diffusion");
  add_common(diffuse, c_diff);
  int diff_t = 0;
  bool diff_curve = false;
  CLI::Option* diff_t_opt = diffuse->add_option("--t", diff_t, "timestep to diffuse to");
  diffuse->add_flag("--curve", diff_curve, "emit the full fidelity curve");

  CLI::App* train_res = app.add_subcommand("train-restore", "train a restoration model");
  add_common(train_res, c_train_res);

  CLI::App* restore = app.add_subcommand("restore", "denoise a corrupted state");
  add_common(restore, c_res);
  std::string res_ck, res_input;
  double res_s = 0.5, res_phase = 0.0, res_eta = 0.5, res_nbar = 0.0;
  restore->add_option("--checkpoint", res_ck, "trained restoration checkpoint")
      ->required();
  restore->add_option("--input", res_input, "corrupted state JSON to restore");
  CLI::Option* res_s_opt = restore->add_option("--s", res_s, "clean amplitude modulus");
  CLI::Option* res_ph_opt = restore->add_option("--phase", res_phase, "clean phase");
  CLI::Option* res_eta_opt =
      restore->add_option("--eta-ch", res_eta, "corruption transmissivity");
  CLI::Option* res_nbar_opt =
      restore->add_option("--nbar", res_nbar, "override the corruption occupation");

  CLI::App* ver = app.add_subcommand("verify", "run the verification suites");
  add_common(ver, c_ver, false);
  std::vector<std::string> ver_suites;
  std::string ver_fault = "none";
  ver->add_option("--suite", ver_suites, "suites to run (default: all)");
  ver->add_option("--inject-fault", ver_fault, "inject a known fault (eta_bar)");

  CLI::App* sweep = app.add_subcommand("sweep", "train across a parameter grid");
  add_common(sweep, c_sweep);
  std::string sweep_param = "alpha";
  std::vector<double> sweep_values;
  sweep->add_option("--param", sweep_param, "swept parameter")
      ->check(CLI::IsMember({"alpha", "r"}));
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (train_gen->parsed()) return cmd_train(c_train_gen, false);
    if (train_res->parsed()) return cmd_train(c_train_res, true);
    if (generate->parsed())
      return cmd_generate(c_gen, gen_ck, gen_nbar, gen_nbar_opt->count() > 0,
                          !gen_no_record);
    if (diffuse->parsed())
      return cmd_diffuse(c_diff, diff_t, diff_t_opt->count() > 0, diff_curve);
    if (restore->parsed()) {
      bool has_synth = res_s_opt->count() || res_ph_opt->count() || res_eta_opt->count();
      return cmd_restore(c_res, res_ck, res_input, res_s, res_phase, res_eta, has_synth,
                         res_nbar, res_nbar_opt->count() > 0);
    }
    if (ver->parsed())
      return cmd_verify(c_ver, ver_suites, ver_fault,
                        ver->get_option("--out")->count() > 0);
    if (sweep->parsed()) return cmd_sweep(c_sweep, sweep_param, sweep_values);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case Err::ConfigError: return 2;
      case Err::IoError: return 4;
      default: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
