#include "cvqd/trainer.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "cvqd/fock.hpp"

namespace cvqd::trainer {

namespace {

using denoiser::ThetaVector;

constexpr double kPi = 3.14159265358979323846;

// F = (tr sqrt(sqrt(prev) pred sqrt(prev)))^2 and the Hermitian W with
// dF = tr(W dpred). References that are numerically pure take the projector
// shortcut W = |psi><psi|.
void fidelity_and_weight(const Mat& prev, const Mat& pred, double* f_out, Mat* w_out) {
  const int d = int(prev.rows());
  double pur = (prev * prev).trace().real();
  if (pur >= 1.0 - 1e-10) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (prev + prev.adjoint()));
    Vec psi = es.eigenvectors().col(d - 1);
    *f_out = (psi.adjoint() * pred * psi)(0).real();
    if (w_out) *w_out = psi * psi.adjoint();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat> ep(0.5 * (prev + prev.adjoint()));
  Eigen::VectorXd ev = ep.eigenvalues().cwiseMax(0.0);
  Mat sr = ep.eigenvectors() * ev.cwiseSqrt().asDiagonal() * ep.eigenvectors().adjoint();
  Mat m = sr * pred * sr;
  Eigen::SelfAdjointEigenSolver<Mat> em(0.5 * (m + m.adjoint()));
  double mx = std::max(em.eigenvalues().maxCoeff(), 1e-300);
  double s = 0.0;
  Mat minv_half = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double lam = em.eigenvalues()[i];
    if (lam > 1e-12 * mx) {
      s += std::sqrt(lam);
      minv_half += (1.0 / std::sqrt(lam)) * em.eigenvectors().col(i) *
                   em.eigenvectors().col(i).adjoint();
    }
  }
  *f_out = s * s;
  if (w_out) {
    Mat w = s * (sr * minv_half * sr);
    *w_out = 0.5 * (w + w.adjoint());
  }
}

struct TermEval {
  double loss = 0, fidelity = 0, penalty = 0;
};

TermEval eval_term(const Mat& u, const SupervisedPair& pair,
                   const denoiser::TimeEmbedConfig& embed, double gamma,
                   Mat* big_out, Mat* w_loss_out) {
  const int c = pair.input.cutoff;
  DensityMatrix joint = fock::tensor_product(
      denoiser::time_embed(pair.t, embed, c), pair.input);
  Mat big = u * joint.data * u.adjoint();
  DensityMatrix pred;
  pred.modes = 1;
  pred.cutoff = c;
  pred.data = Mat::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      for (int k = 0; k < c; ++k) pred.data(i, j) += big(i * c + k, j * c + k);

  TermEval ev;
  double f;
  Mat wf;
  fidelity_and_weight(pair.prev.data, pred.data, &f, w_loss_out ? &wf : nullptr);
  double tr = pred.data.trace().real();
  ev.fidelity = f;
  ev.penalty = (tr - 1.0) * (tr - 1.0);
  ev.loss = 1.0 - f + gamma * ev.penalty;
  if (w_loss_out) {
    *w_loss_out = -wf + (2.0 * gamma * (tr - 1.0)) * Mat::Identity(c, c);
    *big_out = std::move(big);
  }
  return ev;
}

double accumulate_terms(const Mat& u, const std::vector<SupervisedPair>& pairs,
                        const TrainConfig& cfg, Diagnostics* diag) {
  double total = 0;
  double fid_sum = 0, pen_sum = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    TermEval ev = eval_term(u, pairs[i], cfg.embed(), cfg.gamma, nullptr, nullptr);
    total += pairs[i].weight * ev.loss;
    fid_sum += ev.fidelity;
    pen_sum += ev.penalty;
    if (diag && i == 0) diag->loss_t0 = ev.loss;
  }
  if (diag && !pairs.empty()) {
    diag->mean_step_fidelity = fid_sum / double(pairs.size());
    diag->mean_trace_penalty = pen_sum / double(pairs.size());
  }
  return total;
}

void check_cfg(const TrainConfig& cfg) {
  if (cfg.cutoff < 2) throw Error(Err::CutoffTooSmall, "cutoff must be at least 2");
  if (cfg.layers < 1) throw Error(Err::ConfigError, "layers must be at least 1");
  if (cfg.timesteps < 2)
    throw Error(Err::ConfigError, "training needs at least 2 timesteps");
  if (cfg.batch_size < 1 || cfg.batch_size > cfg.timesteps - 1)
    throw Error(Err::ConfigError,
                "batch size must lie in 1..T-1 for no-replacement sampling");
  if (cfg.lr0 <= 0 || cfg.decay_rate <= 0 || cfg.decay_steps < 1)
    throw Error(Err::ConfigError, "learning-rate settings must be positive");
  if (cfg.lambda < 0 || cfg.gamma < 0)
    throw Error(Err::ConfigError, "loss weights must be nonnegative");
  if (cfg.max_iters < 1) throw Error(Err::ConfigError, "max_iters must be positive");
  if (cfg.fd_step <= 0) throw Error(Err::ConfigError, "fd_step must be positive");
  if (cfg.alpha_embed <= 0)
    throw Error(Err::ConfigError, "alpha_embed must be positive");
}

}  // namespace

GradMode grad_mode_from_string(const std::string& s) {
  if (s == "central_fd") return GradMode::CentralFd;
  if (s == "spsa") return GradMode::Spsa;
  if (s == "analytic") return GradMode::Analytic;
  throw Error(Err::ConfigError, "unknown grad_mode '" + s + "'");
}

std::string grad_mode_to_string(GradMode m) {
  switch (m) {
    case GradMode::CentralFd: return "central_fd";
    case GradMode::Spsa: return "spsa";
    case GradMode::Analytic: return "analytic";
  }
  return "analytic";
}

void adam_update(AdamState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                 double lr) {
  if (state.m.size() != theta.size()) {
    state.m = Eigen::VectorXd::Zero(theta.size());
    state.v = Eigen::VectorXd::Zero(theta.size());
    state.step = 0;
  }
  if (grad.size() != theta.size())
    throw Error(Err::ConfigError, "gradient length does not match parameters");
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
  Eigen::VectorXd mhat = state.m / bc1;
  Eigen::VectorXd vhat = state.v / bc2;
  theta -= lr * (mhat.array() / (vhat.array().sqrt() + state.eps)).matrix();
}

double lr_at(long iter, double lr0, int decay_steps, double decay_rate) {
  return lr0 * std::pow(decay_rate, double(iter) / double(decay_steps));
}

double trace_penalty(const DensityMatrix& rho) {
  double tr = rho.data.trace().real();
  return (tr - 1.0) * (tr - 1.0);
}

double step_loss(const DensityMatrix& rho_prev, const DensityMatrix& rho_pred,
                 double gamma) {
  double f;
  fidelity_and_weight(rho_prev.data, rho_pred.data, &f, nullptr);
  return 1.0 - f + gamma * trace_penalty(rho_pred);
}

std::vector<int> sample_timesteps(int B, int T, Rng& rng) {
  if (B < 1 || B > T - 1)
    throw Error(Err::ConfigError, "batch size must lie in 1..T-1");
  std::vector<int> pool(T - 1);
  std::iota(pool.begin(), pool.end(), 2);
  for (int i = 0; i < B; ++i) {
    int j = i + rng.uniform_int(0, int(pool.size()) - 1 - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(B);
  return pool;
}

std::vector<SupervisedPair> generative_pairs(const DensityMatrix& rho0,
                                             const diffusion::NoiseSchedule& sched,
                                             const diffusion::Environment& env,
                                             const TrainConfig& cfg, Rng& rng) {
  std::vector<SupervisedPair> pairs;
  pairs.reserve(cfg.batch_size + 1);
  pairs.push_back({1, 1.0, rho0, diffusion::diffuse_to(rho0, 1, sched, env)});
  std::vector<int> ts = sample_timesteps(cfg.batch_size, cfg.timesteps, rng);
  double w = cfg.lambda / double(cfg.batch_size);
  for (int t : ts)
    pairs.push_back({t, w, diffusion::diffuse_to(rho0, t - 1, sched, env),
                     diffusion::diffuse_to(rho0, t, sched, env)});
  return pairs;
}

cxd sample_beta(const RestorationSampler& sampler, Rng& rng) {
  double s = rng.uniform(0.0, sampler.s_max);
  double phi = rng.uniform(0.0, 2.0 * kPi);
  return s * std::exp(cxd(0, phi));
}

std::vector<SupervisedPair> restoration_pairs(const RestorationSampler& sampler,
                                              const diffusion::NoiseSchedule& sched,
                                              const diffusion::Environment& env,
                                              const TrainConfig& cfg, Rng& rng) {
  // restoration has no fixed-target anchor term: every term draws a fresh
  // (beta, t) with t uniform over the whole chain and equal weight
  std::vector<SupervisedPair> pairs;
  pairs.reserve(cfg.batch_size);
  double w = 1.0 / double(cfg.batch_size);
  for (int i = 0; i < cfg.batch_size; ++i) {
    int t = rng.uniform_int(1, cfg.timesteps);
    DensityMatrix rho0 = fock::make_coherent(sample_beta(sampler, rng), cfg.cutoff);
    pairs.push_back({t, w, diffusion::diffuse_to(rho0, t - 1, sched, env),
                     diffusion::diffuse_to(rho0, t, sched, env)});
  }
  return pairs;
}

double batch_loss(const ThetaVector& theta, const std::vector<SupervisedPair>& pairs,
                  const TrainConfig& cfg, Diagnostics* diag) {
  Mat u = denoiser::denoiser_unitary(theta, cfg.cutoff);
  return accumulate_terms(u, pairs, cfg, diag);
}

double total_loss(const ThetaVector& theta, const DensityMatrix& rho0,
                  const diffusion::NoiseSchedule& sched,
                  const diffusion::Environment& env, const TrainConfig& cfg, Rng& rng,
                  Diagnostics* diag) {
  return batch_loss(theta, generative_pairs(rho0, sched, env, cfg, rng), cfg, diag);
}

Eigen::VectorXd grad_central_fd(const ThetaVector& theta,
                                const std::vector<SupervisedPair>& pairs,
                                const TrainConfig& cfg, double fd_step) {
  if (fd_step <= 0) throw Error(Err::ConfigError, "fd_step must be positive");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.values.size());
  ThetaVector probe = theta;
  for (int k = 0; k < theta.values.size(); ++k) {
    probe.values[k] = theta.values[k] + fd_step;
    double up = batch_loss(probe, pairs, cfg, nullptr);
    probe.values[k] = theta.values[k] - fd_step;
    double down = batch_loss(probe, pairs, cfg, nullptr);
    probe.values[k] = theta.values[k];
    grad[k] = (up - down) / (2.0 * fd_step);
  }
  return grad;
}

Eigen::VectorXd grad_spsa(const ThetaVector& theta,
                          const std::vector<SupervisedPair>& pairs,
                          const TrainConfig& cfg, double perturb, int n_avg, Rng& rng) {
  if (perturb <= 0 || n_avg < 1)
    throw Error(Err::ConfigError, "spsa needs positive perturbation and samples");
  const int n = int(theta.values.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  ThetaVector probe = theta;
  Eigen::VectorXd delta(n);
  for (int rep = 0; rep < n_avg; ++rep) {
    for (int k = 0; k < n; ++k) delta[k] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    probe.values = theta.values + perturb * delta;
    double up = batch_loss(probe, pairs, cfg, nullptr);
    probe.values = theta.values - perturb * delta;
    double down = batch_loss(probe, pairs, cfg, nullptr);
    double scale = (up - down) / (2.0 * perturb);
    grad += scale * delta;  // delta entries are +-1, so 1/delta_k = delta_k
  }
  return grad / double(n_avg);
}

Eigen::VectorXd grad_analytic(const ThetaVector& theta,
                              const std::vector<SupervisedPair>& pairs,
                              const TrainConfig& cfg, double* loss_out,
                              Diagnostics* diag) {
  using gates::GateParam;
  const int c = cfg.cutoff;
  std::vector<denoiser::Factor> factors = denoiser::circuit_factors(theta, c);
  Mat u = Mat::Identity(c * c, c * c);
  for (const denoiser::Factor& f : factors) u = f.u * u;

  // the six parameter-independent embedded generators
  Mat gen_r[2], gen_s[2], gen_k[2];
  for (int slot = 0; slot < 2; ++slot) {
    gen_r[slot] = gates::embed_single(gates::gate_generator(GateParam::R, {}, c), slot, c);
    gen_s[slot] = gates::embed_single(gates::gate_generator(GateParam::S, {}, c), slot, c);
    gen_k[slot] = gates::embed_single(gates::gate_generator(GateParam::K, {}, c), slot, c);
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.values.size());
  double total = 0, fid_sum = 0, pen_sum = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const SupervisedPair& pair = pairs[i];
    Mat big, w_loss;
    TermEval ev = eval_term(u, pair, cfg.embed(), cfg.gamma, &big, &w_loss);
    total += pair.weight * ev.loss;
    fid_sum += ev.fidelity;
    pen_sum += ev.penalty;
    if (diag && i == 0) diag->loss_t0 = ev.loss;

    Mat x = big * Eigen::kroneckerProduct(w_loss, Mat::Identity(c, c));
    for (int k = int(factors.size()) - 1; k >= 0; --k) {
      const denoiser::Factor& f = factors[k];
      for (const denoiser::ParamRef& pr : f.params) {
        if (denoiser::is_squeeze_index(pr.theta_index) &&
            std::abs(theta.values[pr.theta_index]) >= denoiser::kSqueezeClamp)
          continue;
        const Mat* gen = nullptr;
        Mat local;
        if (pr.kind == GateParam::R) {
          gen = &gen_r[pr.slot];
        } else if (pr.kind == GateParam::S) {
          gen = &gen_s[pr.slot];
        } else if (pr.kind == GateParam::K) {
          gen = &gen_k[pr.slot];
        } else if (pr.slot == 2) {
          local = gates::gate_generator(pr.kind, pr.args, c);
          gen = &local;
        } else {
          local = gates::embed_single(gates::gate_generator(pr.kind, pr.args, c),
                                      pr.slot, c);
          gen = &local;
        }
        cxd tr = (gen->transpose().cwiseProduct(x)).sum();
        grad[pr.theta_index] += pair.weight * 2.0 * tr.real();
      }
      x = f.u.adjoint() * x * f.u;
    }
  }
  if (loss_out) *loss_out = total;
  if (diag && !pairs.empty()) {
    diag->mean_step_fidelity = fid_sum / double(pairs.size());
    diag->mean_trace_penalty = pen_sum / double(pairs.size());
  }
  return grad;
}

namespace {

struct LoopState {
  AdamState adam;
  denoiser::ThetaVector theta;
  denoiser::ThetaVector best_theta;
  double best_loss = std::numeric_limits<double>::infinity();
  double prev_loss = std::numeric_limits<double>::infinity();
  int calm_iters = 0;
};

TrainResult run_training(const TrainConfig& cfg,
                         const std::function<std::vector<SupervisedPair>(Rng&)>& draw) {
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  LoopState st;
  st.theta = denoiser::param_init(cfg.layers, cfg.init_scale, cfg.seed);
  st.best_theta = st.theta;

  TrainResult result;
  result.metrics.reserve(cfg.max_iters);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    auto t_start = std::chrono::steady_clock::now();
    double lr = lr_at(iter, cfg.lr0, cfg.decay_steps, cfg.decay_rate);
    std::vector<SupervisedPair> pairs = draw(rng);

    double loss = 0;
    Diagnostics diag;
    Eigen::VectorXd grad;
    switch (cfg.grad_mode) {
      case GradMode::Analytic:
        grad = grad_analytic(st.theta, pairs, cfg, &loss, &diag);
        break;
      case GradMode::CentralFd:
        loss = batch_loss(st.theta, pairs, cfg, &diag);
        grad = grad_central_fd(st.theta, pairs, cfg, cfg.fd_step);
        break;
      case GradMode::Spsa:
        loss = batch_loss(st.theta, pairs, cfg, &diag);
        grad = grad_spsa(st.theta, pairs, cfg, cfg.fd_step, cfg.spsa_avg, rng);
        break;
    }

    if (loss < st.best_loss) {
      st.best_loss = loss;
      st.best_theta = st.theta;
    }

    double rel = std::abs(loss - st.prev_loss) / std::max(std::abs(st.prev_loss), 1e-12);
    st.calm_iters = rel < kConvTol ? st.calm_iters + 1 : 0;
    st.prev_loss = loss;

    adam_update(st.adam, st.theta.values, grad, lr);

    auto t_end = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
    result.metrics.push_back({iter, lr, loss, diag.loss_t0, diag.mean_step_fidelity,
                              diag.mean_trace_penalty, ms});
    result.final_loss = loss;
    result.iterations = iter + 1;
    if (st.calm_iters >= kConvWindow) {
      result.converged = true;
      break;
    }
  }
  result.theta = st.best_theta;
  result.best_loss = st.best_loss;
  return result;
}

}  // namespace

TrainResult train_generative(const DensityMatrix& target, const TrainConfig& cfg) {
  check_cfg(cfg);
  if (target.modes != 1)
    throw Error(Err::InvalidState, "generative target must be single-mode");
  if (target.cutoff != cfg.cutoff)
    throw Error(Err::InvalidState, "target cutoff does not match config");
  double deficit = 1.0 - target.data.trace().real();
  if (deficit > 1e-4)
    throw Error(Err::CutoffTooSmall,
                "target trace deficit " + std::to_string(deficit) +
                    " exceeds 1e-4; raise the cutoff");

  diffusion::NoiseSchedule sched =
      diffusion::linear_schedule(cfg.eta0, cfg.etaT, cfg.timesteps);
  diffusion::Environment env{cfg.nbar};

  // diffused states depend only on (target, t); precompute the whole ladder
  std::vector<DensityMatrix> rho_t(cfg.timesteps + 1);
  for (int t = 0; t <= cfg.timesteps; ++t)
    rho_t[t] = diffusion::diffuse_to(target, t, sched, env);

  double w = cfg.lambda / double(cfg.batch_size);
  auto draw = [&](Rng& rng) {
    std::vector<SupervisedPair> pairs;
    pairs.reserve(cfg.batch_size + 1);
    pairs.push_back({1, 1.0, rho_t[0], rho_t[1]});
    for (int t : sample_timesteps(cfg.batch_size, cfg.timesteps, rng))
      pairs.push_back({t, w, rho_t[t - 1], rho_t[t]});
    return pairs;
  };
  return run_training(cfg, draw);
}

TrainResult train_restoration(const RestorationSampler& sampler, const TrainConfig& cfg) {
  check_cfg(cfg);
  if (sampler.s_max < 0)
    throw Error(Err::ConfigError, "sampler amplitude bound must be nonnegative");
  double deficit = 1.0 - fock::coherent_ket(cxd(sampler.s_max, 0), cfg.cutoff)
                             .squaredNorm();
  if (deficit > 1e-4)
    throw Error(Err::CutoffTooSmall,
                "largest sampled coherent state does not fit the cutoff");

  diffusion::NoiseSchedule sched =
      diffusion::linear_schedule(cfg.eta0, cfg.etaT, cfg.timesteps);
  diffusion::Environment env{cfg.nbar};
  auto draw = [&](Rng& rng) {
    return restoration_pairs(sampler, sched, env, cfg, rng);
  };
  return run_training(cfg, draw);
}

}  // namespace cvqd::trainer
