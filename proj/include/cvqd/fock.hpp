#pragma once

#include <vector>

#include "cvqd/types.hpp"

namespace cvqd::fock {

enum class Mode { A, B };

Vec vacuum_ket(int cutoff);
Vec fock_ket(int n, int cutoff);
Vec coherent_ket(cxd alpha, int cutoff);
// (|alpha> + |-alpha>)/N for even, minus for odd; odd cat at alpha=0 has no norm.
Vec cat_ket(cxd alpha, bool even, int cutoff);
// Closed-form amplitudes a_{2n} = (-tanh r)^n sqrt((2n)!)/(2^n n! sqrt(cosh r)).
Vec squeezed_vacuum_ket(double r, int cutoff);

DensityMatrix pure_state(const Vec& ket, int modes = 1);
DensityMatrix make_vacuum(int cutoff);
DensityMatrix make_fock(int n, int cutoff);
DensityMatrix make_coherent(cxd alpha, int cutoff);
DensityMatrix make_cat(cxd alpha, bool even, int cutoff);
DensityMatrix make_squeezed_vacuum(double r, int cutoff);
// Diagonal nbar^n/(1+nbar)^(n+1); truncation tail is discarded, not renormalized.
DensityMatrix make_thermal(double nbar, int cutoff);

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, Mode over);

DensityMatrix renormalize(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);
double mean_photon(const DensityMatrix& rho);

struct QuadratureStats {
  double mean_x = 0, mean_p = 0, var_x = 0, var_p = 0;
};
// hbar = 1, x = (a + a^dag)/sqrt(2); vacuum has var_x = 1/2.
QuadratureStats quadrature_stats(const DensityMatrix& rho);

// Hermitian PSD square root. Eigenvalues in [-1e-9, 0) are clamped to 0;
// anything below -1e-9 raises NotPSD.
Mat hermitian_sqrt(const Mat& m);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. States whose purity
// is within 1e-10 of 1 take the pure shortcut <psi|sigma|psi>.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

bool is_valid_state(const DensityMatrix& rho, double tol = 1e-9);
void require_valid_state(const DensityMatrix& rho, double tol = 1e-9);

// W(x,p) = (1/pi) tr[D(-beta) rho D(beta) P], beta = (x+ip)/sqrt(2),
// P = diag((-1)^n). Vacuum peaks at 1/pi; |1> dips to -1/pi at the origin.
double wigner_point(const DensityMatrix& rho, double x, double p);
std::vector<std::vector<double>> wigner_grid(const DensityMatrix& rho,
                                             const std::vector<double>& xs,
                                             const std::vector<double>& ps);

}  // namespace cvqd::fock
