#pragma once

#include "cvqd/types.hpp"

namespace cvqd::gates {

// Truncated annihilation operator, a[n-1,n] = sqrt(n).
Mat ladder(int cutoff);
Mat number_op(int cutoff);

// Scaling-and-squaring matrix exponential.
Mat expm(const Mat& m);

// Frechet derivative of expm at anti-Hermitian generator A in direction E,
// via the eigenbasis divided-difference kernel. Exact for the truncated matrix.
Mat expm_frechet_antihermitian(const Mat& a, const Mat& e);

// D(alpha) = expm(alpha a^dag - conj(alpha) a); D(alpha)|0> is coherent.
Mat displacement(cxd alpha, int cutoff);
// Exactly unitary at any cutoff: diag(e^{i phi n}).
Mat rotation(double phi, int cutoff);
// S(r) = expm((r/2)(a^2 - a^dag^2)); var_x(S(r)|0>) = e^{-2r}/2.
Mat squeeze(double r, int cutoff);
// diag(e^{i kappa n^2}).
Mat kerr(double kappa, int cutoff);

// Two-mode U = expm(theta (e^{i phi} a^dag b - e^{-i phi} a b^dag)) so that
// U^dag a U = cos(theta) a + e^{i phi} sin(theta) b and
// U^dag b U = -e^{-i phi} sin(theta) a + cos(theta) b.
Mat beamsplitter(double theta, double phi, int cutoff);
// theta = arccos(sqrt(eta)), phi = 0; eta is the transmissivity.
Mat beamsplitter_by_transmissivity(double eta, int cutoff);

// Lift a single-mode gate into the two-mode space (A = most significant slot).
Mat embed_single(const Mat& u, int slot /*0=A, 1=B*/, int cutoff);

enum class GateParam { DRe, DIm, R, S, BSTheta, BSPhi, K };

struct GeneratorArgs {
  cxd alpha;     // DRe/DIm: current displacement
  double theta;  // BSTheta/BSPhi
  double phi;    // BSTheta/BSPhi
};

// Anti-Hermitian G with dU/dp = G*U, exact for the truncated matrices.
// Single-mode kinds return a cutoff x cutoff matrix, beamsplitter kinds the
// two-mode one.
Mat gate_generator(GateParam kind, const GeneratorArgs& args, int cutoff);

}  // namespace cvqd::gates
