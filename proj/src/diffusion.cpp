#include "cvqd/diffusion.hpp"

#include "cvqd/fock.hpp"
#include "cvqd/gates.hpp"

namespace cvqd::diffusion {

double NoiseSchedule::eta_at(int t) const {
  if (t < 1 || t > T)
    throw Error(Err::ConfigError, "timestep " + std::to_string(t) + " outside 1.." +
                                      std::to_string(T));
  return eta[t - 1];
}

double NoiseSchedule::eta_bar_at(int t) const {
  if (t < 0 || t > T)
    throw Error(Err::ConfigError, "timestep " + std::to_string(t) + " outside 0.." +
                                      std::to_string(T));
  return eta_bar[t];
}

NoiseSchedule linear_schedule(double eta0, double etaT, int T) {
  if (T < 1) throw Error(Err::ConfigError, "schedule needs at least one timestep");
  if (eta0 < 0 || eta0 > 1 || etaT < 0 || etaT > 1)
    throw Error(Err::ConfigError, "schedule endpoints must lie in [0,1]");
  NoiseSchedule s;
  s.T = T;
  s.eta0 = eta0;
  s.etaT = etaT;
  s.eta.resize(T);
  s.eta_bar.resize(T + 1);
  s.eta_bar[0] = 1.0;
  for (int t = 1; t <= T; ++t) {
    s.eta[t - 1] = eta0 + (etaT - eta0) * double(t) / double(T);
    s.eta_bar[t] = s.eta_bar[t - 1] * s.eta[t - 1];
  }
  return s;
}

std::pair<double, double> beta_to_eta(double beta_start, double beta_end) {
  if (beta_start <= 0 || beta_start >= 1 || beta_end <= 0 || beta_end >= 1)
    throw Error(Err::ConfigError, "damping endpoints must lie in (0,1)");
  return {1.0 - beta_start, 1.0 - beta_end};
}

DensityMatrix thermal_loss_step(const DensityMatrix& rho, double eta,
                                const Environment& env) {
  if (rho.modes != 1)
    throw Error(Err::InvalidState, "thermal loss acts on single-mode states");
  if (eta < 0 || eta > 1)
    throw Error(Err::ConfigError, "transmissivity must lie in [0,1]");
  const int c = rho.cutoff;
  DensityMatrix joint = fock::tensor_product(rho, fock::make_thermal(env.nbar, c));
  Mat u = gates::beamsplitter_by_transmissivity(eta, c);
  joint.data = u * joint.data * u.adjoint();
  return fock::partial_trace(joint, fock::Mode::B);
}

DensityMatrix diffuse_to(const DensityMatrix& rho0, int t, const NoiseSchedule& sched,
                         const Environment& env) {
  if (t == 0) return rho0;
  return thermal_loss_step(rho0, sched.eta_bar_at(t), env);
}

DensityMatrix corrupt(const DensityMatrix& rho_in, double eta_ch,
                      const Environment& env) {
  return thermal_loss_step(rho_in, eta_ch, env);
}

}  // namespace cvqd::diffusion
