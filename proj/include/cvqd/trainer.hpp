#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvqd/denoiser.hpp"
#include "cvqd/diffusion.hpp"
#include "cvqd/rng.hpp"
#include "cvqd/types.hpp"

namespace cvqd::trainer {

enum class GradMode { CentralFd, Spsa, Analytic };

GradMode grad_mode_from_string(const std::string& s);
std::string grad_mode_to_string(GradMode m);

struct TrainConfig {
  int cutoff = 8;
  int layers = 8;
  int timesteps = 30;  // T
  double nbar = 0.0;
  double eta0 = 0.999;
  double etaT = 0.82;
  int batch_size = 8;       // B distinct timesteps (or fresh targets) per iteration
  int max_iters = 3000;
  double lr0 = 0.01;
  int decay_steps = 10;
  double decay_rate = 0.995;
  double lambda = 8.55e-5;  // weight of the batch term relative to the t=1 term
  double gamma = 100.0;     // trace penalty weight
  GradMode grad_mode = GradMode::CentralFd;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
  double alpha_embed = 1.0;
  double s_max = 1.0;       // restoration target amplitude bound
  double init_scale = 0.01;
  int spsa_avg = 200;

  denoiser::TimeEmbedConfig embed() const { return {alpha_embed, timesteps}; }
};

// Convergence contract shared by both training loops: stop when the relative
// loss change stays below kConvTol for kConvWindow consecutive iterations.
inline constexpr double kConvTol = 1e-5;
inline constexpr int kConvWindow = 10;

struct AdamState {
  Eigen::VectorXd m, v;
  long step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

// Bias-corrected Adam step; theta is updated in place.
void adam_update(AdamState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                 double lr);

double lr_at(long iter, double lr0, int decay_steps, double decay_rate);

double trace_penalty(const DensityMatrix& rho);
// 1 - F(rho_prev, rho_pred) + gamma * trace_penalty(rho_pred)
double step_loss(const DensityMatrix& rho_prev, const DensityMatrix& rho_pred,
                 double gamma);

// B distinct timesteps drawn uniformly from {2, ..., T}.
std::vector<int> sample_timesteps(int B, int T, Rng& rng);

// One supervised term: feed `input` to the denoiser at timestep t, score the
// output against `prev`, scale the term by `weight`.
struct SupervisedPair {
  int t = 1;
  double weight = 1.0;
  DensityMatrix prev;
  DensityMatrix input;
};

struct Diagnostics {
  double loss_t0 = 0;             // the t=1 term (weight excluded)
  double mean_step_fidelity = 0;  // mean fidelity over all terms
  double mean_trace_penalty = 0;
};

// The t=1 pair (weight 1) plus batch_size sampled-timestep pairs (weight
// lambda / batch_size each), all diffused from rho0.
std::vector<SupervisedPair> generative_pairs(const DensityMatrix& rho0,
                                             const diffusion::NoiseSchedule& sched,
                                             const diffusion::Environment& env,
                                             const TrainConfig& cfg, Rng& rng);

struct RestorationSampler {
  double s_max = 1.0;
};

// beta = s e^{i phi}, s uniform in [0, s_max], phi uniform in [0, 2 pi).
cxd sample_beta(const RestorationSampler& sampler, Rng& rng);

// Same structure as generative_pairs but every term draws a fresh coherent
// target |beta>.
std::vector<SupervisedPair> restoration_pairs(const RestorationSampler& sampler,
                                              const diffusion::NoiseSchedule& sched,
                                              const diffusion::Environment& env,
                                              const TrainConfig& cfg, Rng& rng);

double batch_loss(const denoiser::ThetaVector& theta,
                  const std::vector<SupervisedPair>& pairs, const TrainConfig& cfg,
                  Diagnostics* diag = nullptr);

// Convenience wrapper: sample a generative batch with rng, evaluate its loss.
double total_loss(const denoiser::ThetaVector& theta, const DensityMatrix& rho0,
                  const diffusion::NoiseSchedule& sched,
                  const diffusion::Environment& env, const TrainConfig& cfg, Rng& rng,
                  Diagnostics* diag = nullptr);

Eigen::VectorXd grad_central_fd(const denoiser::ThetaVector& theta,
                                const std::vector<SupervisedPair>& pairs,
                                const TrainConfig& cfg, double fd_step);

Eigen::VectorXd grad_spsa(const denoiser::ThetaVector& theta,
                          const std::vector<SupervisedPair>& pairs,
                          const TrainConfig& cfg, double perturb, int n_avg, Rng& rng);

// Exact gradient through the factored circuit via generator insertion; the
// fidelity term differentiates through the Uhlmann form (pure references take
// the projector shortcut). Matches central FD to the acceptance tolerance.
Eigen::VectorXd grad_analytic(const denoiser::ThetaVector& theta,
                              const std::vector<SupervisedPair>& pairs,
                              const TrainConfig& cfg, double* loss_out = nullptr,
                              Diagnostics* diag = nullptr);

struct MetricsRow {
  int iter = 0;
  double lr = 0, loss_total = 0, loss_t0 = 0;
  double mean_step_fidelity = 0, mean_trace_penalty = 0;
  double wall_ms = 0;
};

struct TrainResult {
  denoiser::ThetaVector theta;  // best-loss parameters seen
  std::vector<MetricsRow> metrics;
  double best_loss = 0;
  double final_loss = 0;
  int iterations = 0;
  bool converged = false;
};

// Target trace deficit above 1e-4 means the state does not fit the cutoff.
TrainResult train_generative(const DensityMatrix& target, const TrainConfig& cfg);
TrainResult train_restoration(const RestorationSampler& sampler, const TrainConfig& cfg);

}  // namespace cvqd::trainer
