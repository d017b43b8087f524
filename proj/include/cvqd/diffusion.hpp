#pragma once

#include <utility>
#include <vector>

#include "cvqd/types.hpp"

namespace cvqd::diffusion {

struct Environment {
  double nbar = 0.0;
};

struct NoiseSchedule {
  int T = 0;
  double eta0 = 1.0, etaT = 1.0;
  std::vector<double> eta;      // eta[t-1] is the step-t transmissivity, t = 1..T
  std::vector<double> eta_bar;  // eta_bar[t], t = 0..T, with eta_bar[0] = 1

  double eta_at(int t) const;
  double eta_bar_at(int t) const;
};

// eta_t = eta0 + (etaT - eta0) * t / T for t = 1..T; cumulative products filled in.
NoiseSchedule linear_schedule(double eta0, double etaT, int T);

// Linear damping-rate ramp endpoints mapped to transmissivity endpoints,
// eta = 1 - beta. Never combined implicitly with explicit eta endpoints.
std::pair<double, double> beta_to_eta(double beta_start, double beta_end);

// Mix the state with a thermal environment on a transmissivity-eta beamsplitter,
// then trace the environment out.
DensityMatrix thermal_loss_step(const DensityMatrix& rho, double eta,
                                const Environment& env);

// Jump straight to timestep t through one channel application at eta_bar_t.
// t = 0 is the identity.
DensityMatrix diffuse_to(const DensityMatrix& rho0, int t, const NoiseSchedule& sched,
                         const Environment& env);

// Channel semantics for restoration inputs; same map as thermal_loss_step.
DensityMatrix corrupt(const DensityMatrix& rho_in, double eta_ch,
                      const Environment& env);

}  // namespace cvqd::diffusion
