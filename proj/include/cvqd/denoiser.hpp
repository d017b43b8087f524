#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cvqd/gates.hpp"
#include "cvqd/types.hpp"

namespace cvqd::denoiser {

// Per-layer parameter layout, 16 reals:
// [BS1.theta, BS1.phi, R_A, R_B, S_A, S_B, BS2.theta, BS2.phi,
//  R2_A, R2_B, D_A.re, D_A.im, D_B.re, D_B.im, K_A, K_B]
inline constexpr int kParamsPerLayer = 16;
inline constexpr int kFactorsPerLayer = 7;
// Squeeze arguments are clamped to this magnitude before gate construction;
// the gradient of a clamped coordinate is zero.
inline constexpr double kSqueezeClamp = 1.5;

struct ThetaVector {
  int layers = 0;
  Eigen::VectorXd values;  // length 16 * layers

  int size() const { return int(values.size()); }
};

struct TimeEmbedConfig {
  double alpha_embed = 1.0;  // must be positive
  int T = 1;                 // total timesteps
};

// Uniform in [-scale, scale] per entry, deterministic under seed.
ThetaVector param_init(int layers, double scale, std::uint64_t seed);

double clamp_squeeze(double r);
bool is_squeeze_index(int flat_index);

// tau_t = R(t*pi/T) D(alpha) |0><0| D^dag R^dag. Valid for 0 <= t <= T.
Vec time_embed_ket(int t, const TimeEmbedConfig& cfg, int cutoff);
DensityMatrix time_embed(int t, const TimeEmbedConfig& cfg, int cutoff);

// One layer: BS1, R(A)xR(B), S(A)xS(B), BS2, R2(A)xR2(B), D(A)xD(B), K(A)xK(B),
// applied in that order (BS1 first).
Mat layer_unitary(const double* p, int cutoff);

// Product of the layer unitaries, layer 1 applied first.
Mat denoiser_unitary(const ThetaVector& theta, int cutoff);

// One parameter's slot inside a factor: dF/dp = embed(G) * F with G from
// gate_generator. slot 2 marks an already two-mode generator.
struct ParamRef {
  int theta_index;
  gates::GateParam kind;
  int slot;  // 0 = mode A, 1 = mode B, 2 = two-mode
  gates::GeneratorArgs args;
};

struct Factor {
  Mat u;
  std::vector<ParamRef> params;
};

// The 7L factors of denoiser_unitary in application order,
// U = factors[7L-1] * ... * factors[0].
std::vector<Factor> circuit_factors(const ThetaVector& theta, int cutoff);

// rho_pred = tr_B( U (tau_t (x) rho_t) U^dag ): the embedding mode A is kept,
// the input mode B is traced out.
DensityMatrix denoise_step(const DensityMatrix& rho_t, int t, const ThetaVector& theta,
                           const TimeEmbedConfig& cfg);
// Same step with a caller-prebuilt unitary (one build per theta across a chain).
DensityMatrix denoise_step_with(const DensityMatrix& rho_t, int t, const Mat& unitary,
                                const TimeEmbedConfig& cfg);

struct ChainResult {
  DensityMatrix state;
  // fidelity[k] is F(reference, state after the k-th denoise step); empty
  // when no reference is supplied.
  std::vector<double> fidelity;
};

// Apply denoise_step for t = t_start, t_start-1, ..., 1, each step consuming
// the previous output. reference may be null.
ChainResult backward_chain(const DensityMatrix& rho_start, int t_start,
                           const ThetaVector& theta, const TimeEmbedConfig& cfg,
                           const DensityMatrix* reference);

}  // namespace cvqd::denoiser
