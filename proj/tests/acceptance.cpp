// Acceptance gate: one pass/fail line per criterion, tolerances pinned here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cvqd/denoiser.hpp"
#include "cvqd/diffusion.hpp"
#include "cvqd/fock.hpp"
#include "cvqd/io.hpp"
#include "cvqd/rng.hpp"
#include "cvqd/trainer.hpp"
#include "cvqd/types.hpp"

namespace fs = std::filesystem;
using namespace cvqd;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_work_dir = "acceptance_work";

double minutes_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count() / 60.0;
}

bool report(int n, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1. Sequential thermal-loss steps must equal the direct jump at the
//    cumulative transmissivity: 50 random schedules, c=12, bound 1e-8.
bool criterion1() {
  const int c = 12;
  const double bound = 1e-8;
  Rng rng(20260818);
  double worst = 0;
  for (int rep = 0; rep < 50; ++rep) {
    int steps = rng.uniform_int(1, 6);
    double nbar = (rep % 2) ? 0.5 : 0.0;
    double s = rng.uniform(0.0, 1.0);
    double phase = rng.uniform(0.0, 2 * M_PI);
    DensityMatrix rho = fock::make_coherent(s * std::exp(cxd(0, phase)), c);
    DensityMatrix seq = rho;
    double ebar = 1.0;
    for (int i = 0; i < steps; ++i) {
      double eta = rng.uniform(0.7, 1.0);
      ebar *= eta;
      seq = diffusion::thermal_loss_step(seq, eta, {nbar});
    }
    DensityMatrix direct = diffusion::thermal_loss_step(rho, ebar, {nbar});
    worst = std::max(worst, fock::trace_distance(seq, direct));
  }
  return report(1, worst <= bound,
                "max sequential-vs-direct trace distance " + fmt(worst) + " (bound " +
                    fmt(bound) + ", 50 cases, cutoff 12)");
}

// 2. Output x-quadrature variance must follow 1/2 + (1-eta)*nbar.
bool criterion2() {
  const int c = 25;
  const double bound = 1e-3;
  double worst = 0;
  for (int k = 1; k <= 9; ++k) {
    double eta = 0.1 * k;
    DensityMatrix out =
        diffusion::thermal_loss_step(fock::make_coherent(cxd(0.7, 0), c), eta, {0.5});
    double var = fock::quadrature_stats(out).var_x;
    worst = std::max(worst, std::abs(var - (0.5 + (1 - eta) * 0.5)));
  }
  return report(2, worst <= bound,
                "max variance deviation " + fmt(worst) + " (bound " + fmt(bound) +
                    ", eta grid 0.1..0.9)");
}

// 3. The published 112-step schedule must carry |alpha=1> to the thermal state.
bool criterion3() {
  const int c = 20;
  const double need = 0.99;
  diffusion::NoiseSchedule sched = diffusion::linear_schedule(0.99974, 0.99331, 112);
  DensityMatrix rho0 = fock::make_coherent(cxd(1.0, 0), c);
  double worst = 1.0;
  std::string detail;
  for (double nbar : {0.0, 0.5}) {
    DensityMatrix rho_t = diffusion::diffuse_to(rho0, 112, sched, {nbar});
    double f = fock::fidelity(rho_t, fock::make_thermal(nbar, c));
    worst = std::min(worst, f);
    detail += (detail.empty() ? "" : ", ") + std::string("nbar=") + fmt(nbar) + " F=" + fmt(f);
  }
  return report(3, worst >= need,
                "endpoint fidelity vs thermal: " + detail + " (need >= " + fmt(need) +
                    ", cumulative transmissivity " +
                    fmt(sched.eta_bar[112]) + ")");
}

trainer::TrainConfig desk_gen_with(trainer::GradMode mode) {
  trainer::TrainConfig cfg = io::desk_gen_profile();
  cfg.grad_mode = mode;
  cfg.seed = 1;
  return cfg;
}

double chain_fidelity(const io::TargetDescriptor& td, const trainer::TrainConfig& cfg,
                      const denoiser::ThetaVector& theta) {
  DensityMatrix target = io::build_target(td, cfg.cutoff);
  denoiser::ChainResult chain =
      denoiser::backward_chain(fock::make_thermal(cfg.nbar, cfg.cutoff), cfg.timesteps,
                               theta, cfg.embed(), nullptr);
  return fock::fidelity(chain.state, target);
}

// 4. Desk-scale generative training must reach chain fidelity >= 0.95 for
//    |alpha=1>, within the single-machine wall-clock budget.
bool criterion4() {
  Clock::time_point t0 = Clock::now();
  trainer::TrainConfig cfg = desk_gen_with(trainer::GradMode::Analytic);
  io::TargetDescriptor td;
  td.kind = "coherent";
  td.alpha_re = 1.0;
  trainer::TrainResult res =
      trainer::train_generative(io::build_target(td, cfg.cutoff), cfg);
  double f = chain_fidelity(td, cfg, res.theta);
  double mins = minutes_since(t0);
  bool pass = f >= 0.95 && mins <= 240.0;
  return report(4, pass,
                "coherent chain fidelity " + fmt(f) + " (need >= 0.95) in " + fmt(mins) +
                    " min (budget 240), " + std::to_string(res.iterations) + " iters");
}

// 5. Desk-scale generation of |1> and the even cat at alpha=1, plus the
//    forward endpoint for |1> decaying below 0.1.
bool criterion5() {
  trainer::TrainConfig cfg = desk_gen_with(trainer::GradMode::Analytic);
  io::TargetDescriptor fock1;
  fock1.kind = "fock";
  fock1.fock_n = 1;
  trainer::TrainResult r1 =
      trainer::train_generative(io::build_target(fock1, cfg.cutoff), cfg);
  double f_fock = chain_fidelity(fock1, cfg, r1.theta);

  io::TargetDescriptor cat;
  cat.kind = "cat";
  cat.alpha_re = 1.0;
  cat.parity = "even";
  trainer::TrainResult r2 =
      trainer::train_generative(io::build_target(cat, cfg.cutoff), cfg);
  double f_cat = chain_fidelity(cat, cfg, r2.theta);

  diffusion::NoiseSchedule sched =
      diffusion::linear_schedule(cfg.eta0, cfg.etaT, cfg.timesteps);
  DensityMatrix one = io::build_target(fock1, cfg.cutoff);
  double f_end = fock::fidelity(diffusion::diffuse_to(one, cfg.timesteps, sched, {0.0}), one);

  bool pass = f_fock >= 0.90 && f_cat >= 0.90 && f_end <= 0.1;
  return report(5, pass,
                "fock chain fidelity " + fmt(f_fock) + ", cat chain fidelity " + fmt(f_cat) +
                    " (need >= 0.9 each); forward endpoint fidelity " + fmt(f_end) +
                    " (need <= 0.1)");
}

std::string restore_checkpoint_path() {
  return (fs::path(g_work_dir) / "restore_checkpoint.json").string();
}

io::Checkpoint trained_restoration() {
  std::string path = restore_checkpoint_path();
  if (fs::exists(path)) return io::load_checkpoint(path);
  trainer::TrainConfig cfg = io::desk_restore_profile();
  trainer::TrainResult res = trainer::train_restoration({cfg.s_max}, cfg);
  io::Checkpoint ck;
  ck.role = "restoration";
  ck.cfg = cfg;
  ck.theta = res.theta.values;
  ck.summary = {res.final_loss, res.best_loss, res.iterations, res.converged};
  fs::create_directories(g_work_dir);
  io::save_checkpoint(path, ck);
  return ck;
}

double restore_fidelity(const io::Checkpoint& ck, cxd beta, double eta_ch) {
  DensityMatrix clean = fock::make_coherent(beta, ck.cfg.cutoff);
  DensityMatrix corrupted = diffusion::corrupt(clean, eta_ch, {ck.cfg.nbar});
  denoiser::ThetaVector theta{ck.cfg.layers, ck.theta};
  denoiser::ChainResult chain =
      denoiser::backward_chain(corrupted, ck.cfg.timesteps, theta, ck.cfg.embed(), nullptr);
  return fock::fidelity(chain.state, clean);
}

// 6. Restoration of a fixed clean state must be nearly invariant to the
//    corruption transmissivity: fidelities >= 0.85, spread <= 0.05.
bool criterion6() {
  io::Checkpoint ck = trained_restoration();
  cxd beta = 0.5 * std::exp(cxd(0, M_PI / 4));
  std::string detail;
  double lo = 1.0, hi = 0.0;
  for (double eta_ch : {0.25, 0.5, 0.75}) {
    double f = restore_fidelity(ck, beta, eta_ch);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    detail += (detail.empty() ? "" : ", ") + std::string("eta_ch=") + fmt(eta_ch) +
              " F=" + fmt(f);
  }
  bool pass = lo >= 0.85 && (hi - lo) <= 0.05;
  return report(6, pass,
                detail + " (need all >= 0.85, spread <= 0.05; spread " + fmt(hi - lo) + ")");
}

// 7. Restoration fidelity averaged over 8 phases must be monotone
//    non-increasing in the clean amplitude and stay >= 0.80.
bool criterion7() {
  io::Checkpoint ck = trained_restoration();
  std::string detail;
  std::vector<double> means;
  for (double s : {0.3, 0.5, 0.7}) {
    double acc = 0;
    for (int k = 0; k < 8; ++k) {
      double phase = 2 * M_PI * k / 8;
      acc += restore_fidelity(ck, s * std::exp(cxd(0, phase)), 0.5);
    }
    means.push_back(acc / 8);
    detail += (detail.empty() ? "" : ", ") + std::string("s=") + fmt(s) + " meanF=" +
              fmt(means.back());
  }
  bool monotone = means[0] >= means[1] && means[1] >= means[2];
  bool pass = monotone && *std::min_element(means.begin(), means.end()) >= 0.80;
  return report(7, pass,
                detail + " (need monotone non-increasing, all >= 0.80" +
                    std::string(monotone ? "" : "; NOT monotone") + ")");
}

// 8. Analytic gradients must match central finite differences to 1e-5
//    relative over 20 random parameter draws; SPSA must agree within 3
//    standard errors per coordinate.
bool criterion8() {
  trainer::TrainConfig cfg;
  cfg.cutoff = 8;
  cfg.layers = 2;
  cfg.timesteps = 6;
  cfg.gamma = 100.0;
  diffusion::NoiseSchedule sched = diffusion::linear_schedule(0.99, 0.9, cfg.timesteps);
  diffusion::Environment env{0.5};
  DensityMatrix rho0 = fock::make_coherent(cxd(0.8, 0), cfg.cutoff);
  std::vector<trainer::SupervisedPair> pairs;
  pairs.push_back({1, 1.0, diffusion::diffuse_to(rho0, 0, sched, env),
                   diffusion::diffuse_to(rho0, 1, sched, env)});
  for (int t : {3, 5})
    pairs.push_back({t, 0.08, diffusion::diffuse_to(rho0, t - 1, sched, env),
                     diffusion::diffuse_to(rho0, t, sched, env)});

  Rng rng(41);
  double worst_rel = 0;
  denoiser::ThetaVector last_theta;
  Eigen::VectorXd last_fd;
  for (int rep = 0; rep < 20; ++rep) {
    denoiser::ThetaVector theta;
    theta.layers = cfg.layers;
    theta.values = Eigen::VectorXd::Zero(16 * cfg.layers);
    for (int i = 0; i < theta.size(); ++i) theta.values(i) = rng.uniform(-0.1, 0.1);
    Eigen::VectorXd ga = trainer::grad_analytic(theta, pairs, cfg);
    Eigen::VectorXd gf = trainer::grad_central_fd(theta, pairs, cfg, 1e-5);
    double rel =
        (ga - gf).cwiseAbs().maxCoeff() / std::max(gf.cwiseAbs().maxCoeff(), 1e-12);
    worst_rel = std::max(worst_rel, rel);
    last_theta = theta;
    last_fd = gf;
  }

  const int n_avg = 200;
  const double perturb = 1e-2;
  const int dim = last_theta.size();
  Eigen::MatrixXd samples(dim, n_avg);
  Rng srng(7);
  for (int k = 0; k < n_avg; ++k)
    samples.col(k) = trainer::grad_spsa(last_theta, pairs, cfg, perturb, 1, srng);
  Eigen::VectorXd mean = samples.rowwise().mean();
  double worst_ratio = 0;
  for (int i = 0; i < dim; ++i) {
    double var = (samples.row(i).array() - mean(i)).square().sum() / (n_avg - 1);
    double se = std::sqrt(var / n_avg);
    worst_ratio = std::max(worst_ratio, std::abs(mean(i) - last_fd(i)) / (3 * se + 1e-12));
  }

  bool pass = worst_rel <= 1e-5 && worst_ratio <= 1.0;
  return report(8, pass,
                "analytic-vs-fd max relative error " + fmt(worst_rel) +
                    " (bound 1e-05, 20 draws); SPSA max |mean-fd|/3SE " + fmt(worst_ratio) +
                    " (bound 1, " + std::to_string(n_avg) + " directions)");
}

// 9. The packaged verification suites must pass through the CLI and an
//    injected cumulative-transmissivity fault must be detected.
bool criterion9() {
  const char* bin = std::getenv("CVQD_BIN");
  if (!bin) return report(9, false, "CVQD_BIN not set; cannot drive the CLI");
  auto run = [&](const std::string& args) {
    std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return (st != -1 && WIFEXITED(st)) ? WEXITSTATUS(st) : -2;
  };
  int clean = run("verify");
  int faulted = run("verify --suite theorem1 --inject-fault eta_bar");
  bool pass = clean == 0 && faulted != 0;
  return report(9, pass,
                "verify exit " + std::to_string(clean) + " (need 0); fault-injected exit " +
                    std::to_string(faulted) + " (need nonzero)");
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc)
      criterion = std::atoi(argv[++i]);
    else if (arg == "--work-dir" && i + 1 < argc)
      g_work_dir = argv[++i];
    else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--work-dir DIR]\n", argv[0]);
      return 2;
    }
  }
  std::error_code ec;
  fs::create_directories(g_work_dir, ec);

  bool (*checks[9])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9};
  bool all = true;
  for (int n = 1; n <= 9; ++n) {
    if (criterion != 0 && criterion != n) continue;
    if (criterion == 0 || criterion == n) all = checks[n - 1]() && all;
  }
  return all ? 0 : 1;
}
