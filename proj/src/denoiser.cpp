#include "cvqd/denoiser.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "cvqd/fock.hpp"
#include "cvqd/rng.hpp"

namespace cvqd::denoiser {

namespace {

void check_theta(const ThetaVector& theta) {
  if (theta.layers < 1 || theta.values.size() != kParamsPerLayer * theta.layers)
    throw Error(Err::ConfigError, "parameter vector length must be 16 * layers");
  if (!theta.values.allFinite())
    throw Error(Err::ConfigError, "parameter vector has non-finite entries");
}

void check_embed(const TimeEmbedConfig& cfg) {
  if (cfg.alpha_embed <= 0)
    throw Error(Err::ConfigError, "embedding displacement must be positive");
  if (cfg.T < 1) throw Error(Err::ConfigError, "total timesteps must be at least 1");
}

}  // namespace

ThetaVector param_init(int layers, double scale, std::uint64_t seed) {
  if (layers < 1) throw Error(Err::ConfigError, "layer count must be at least 1");
  if (scale < 0) throw Error(Err::ConfigError, "init scale must be nonnegative");
  ThetaVector theta;
  theta.layers = layers;
  theta.values.resize(kParamsPerLayer * layers);
  Rng rng(seed);
  for (int i = 0; i < theta.values.size(); ++i)
    theta.values[i] = rng.uniform(-scale, scale);
  return theta;
}

double clamp_squeeze(double r) {
  if (r > kSqueezeClamp) return kSqueezeClamp;
  if (r < -kSqueezeClamp) return -kSqueezeClamp;
  return r;
}

bool is_squeeze_index(int flat_index) {
  int k = flat_index % kParamsPerLayer;
  return k == 4 || k == 5;
}

Vec time_embed_ket(int t, const TimeEmbedConfig& cfg, int cutoff) {
  check_embed(cfg);
  if (t < 0 || t > cfg.T)
    throw Error(Err::ConfigError,
                "timestep " + std::to_string(t) + " outside 0.." + std::to_string(cfg.T));
  double phi = double(t) * M_PI / double(cfg.T);
  Vec v = gates::displacement(cxd(cfg.alpha_embed, 0), cutoff) *
          fock::vacuum_ket(cutoff);
  return gates::rotation(phi, cutoff) * v;
}

DensityMatrix time_embed(int t, const TimeEmbedConfig& cfg, int cutoff) {
  return fock::pure_state(time_embed_ket(t, cfg, cutoff));
}

std::vector<Factor> circuit_factors(const ThetaVector& theta, int cutoff) {
  check_theta(theta);
  std::vector<Factor> factors;
  factors.reserve(kFactorsPerLayer * theta.layers);
  using gates::GateParam;
  for (int l = 0; l < theta.layers; ++l) {
    const double* p = theta.values.data() + kParamsPerLayer * l;
    const int base = kParamsPerLayer * l;

    gates::GeneratorArgs bs1{cxd(0, 0), p[0], p[1]};
    factors.push_back({gates::beamsplitter(p[0], p[1], cutoff),
                       {{base + 0, GateParam::BSTheta, 2, bs1},
                        {base + 1, GateParam::BSPhi, 2, bs1}}});

    factors.push_back(
        {Eigen::kroneckerProduct(gates::rotation(p[2], cutoff),
                                 gates::rotation(p[3], cutoff)),
         {{base + 2, GateParam::R, 0, {}}, {base + 3, GateParam::R, 1, {}}}});

    factors.push_back(
        {Eigen::kroneckerProduct(gates::squeeze(clamp_squeeze(p[4]), cutoff),
                                 gates::squeeze(clamp_squeeze(p[5]), cutoff)),
         {{base + 4, GateParam::S, 0, {}}, {base + 5, GateParam::S, 1, {}}}});

    gates::GeneratorArgs bs2{cxd(0, 0), p[6], p[7]};
    factors.push_back({gates::beamsplitter(p[6], p[7], cutoff),
                       {{base + 6, GateParam::BSTheta, 2, bs2},
                        {base + 7, GateParam::BSPhi, 2, bs2}}});

    factors.push_back(
        {Eigen::kroneckerProduct(gates::rotation(p[8], cutoff),
                                 gates::rotation(p[9], cutoff)),
         {{base + 8, GateParam::R, 0, {}}, {base + 9, GateParam::R, 1, {}}}});

    cxd alpha_a(p[10], p[11]), alpha_b(p[12], p[13]);
    factors.push_back(
        {Eigen::kroneckerProduct(gates::displacement(alpha_a, cutoff),
                                 gates::displacement(alpha_b, cutoff)),
         {{base + 10, GateParam::DRe, 0, {alpha_a, 0, 0}},
          {base + 11, GateParam::DIm, 0, {alpha_a, 0, 0}},
          {base + 12, GateParam::DRe, 1, {alpha_b, 0, 0}},
          {base + 13, GateParam::DIm, 1, {alpha_b, 0, 0}}}});

    factors.push_back(
        {Eigen::kroneckerProduct(gates::kerr(p[14], cutoff),
                                 gates::kerr(p[15], cutoff)),
         {{base + 14, GateParam::K, 0, {}}, {base + 15, GateParam::K, 1, {}}}});
  }
  return factors;
}

Mat layer_unitary(const double* p, int cutoff) {
  ThetaVector one;
  one.layers = 1;
  one.values = Eigen::Map<const Eigen::VectorXd>(p, kParamsPerLayer);
  return denoiser_unitary(one, cutoff);
}

Mat denoiser_unitary(const ThetaVector& theta, int cutoff) {
  std::vector<Factor> factors = circuit_factors(theta, cutoff);
  const int d = cutoff * cutoff;
  Mat u = Mat::Identity(d, d);
  for (const Factor& f : factors) u = f.u * u;
  return u;
}

DensityMatrix denoise_step_with(const DensityMatrix& rho_t, int t, const Mat& unitary,
                                const TimeEmbedConfig& cfg) {
  if (rho_t.modes != 1)
    throw Error(Err::InvalidState, "denoise step takes a single-mode input");
  if (t < 1 || t > cfg.T)
    throw Error(Err::ConfigError,
                "timestep " + std::to_string(t) + " outside 1.." + std::to_string(cfg.T));
  DensityMatrix joint =
      fock::tensor_product(time_embed(t, cfg, rho_t.cutoff), rho_t);
  if (unitary.rows() != joint.data.rows())
    throw Error(Err::InvalidState, "unitary size does not match cutoff^2");
  joint.data = unitary * joint.data * unitary.adjoint();
  return fock::partial_trace(joint, fock::Mode::B);
}

DensityMatrix denoise_step(const DensityMatrix& rho_t, int t, const ThetaVector& theta,
                           const TimeEmbedConfig& cfg) {
  return denoise_step_with(rho_t, t, denoiser_unitary(theta, rho_t.cutoff), cfg);
}

ChainResult backward_chain(const DensityMatrix& rho_start, int t_start,
                           const ThetaVector& theta, const TimeEmbedConfig& cfg,
                           const DensityMatrix* reference) {
  if (t_start < 1 || t_start > cfg.T)
    throw Error(Err::ConfigError, "chain start outside 1.." + std::to_string(cfg.T));
  Mat u = denoiser_unitary(theta, rho_start.cutoff);
  ChainResult result;
  // each step is trace preserving in the full space, so mass lost to the
  // truncated embedding tail is an artifact and gets renormalized away
  result.state = fock::renormalize(rho_start);
  for (int t = t_start; t >= 1; --t) {
    result.state = fock::renormalize(denoise_step_with(result.state, t, u, cfg));
    if (reference)
      result.fidelity.push_back(fock::fidelity(*reference, result.state));
  }
  return result;
}

}  // namespace cvqd::denoiser
