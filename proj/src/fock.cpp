#include "cvqd/fock.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cvqd/gates.hpp"

namespace cvqd::fock {

namespace {

void check_cutoff(int cutoff) {
  if (cutoff < 2) throw Error(Err::CutoffTooSmall, "cutoff must be at least 2");
}

void check_square(const DensityMatrix& rho) {
  if (rho.modes < 1 || rho.modes > 2)
    throw Error(Err::InvalidState, "modes must be 1 or 2");
  if (rho.data.rows() != rho.dim() || rho.data.cols() != rho.dim())
    throw Error(Err::InvalidState, "matrix size does not match cutoff^modes");
}

}  // namespace

Vec vacuum_ket(int cutoff) {
  check_cutoff(cutoff);
  Vec v = Vec::Zero(cutoff);
  v[0] = 1.0;
  return v;
}

Vec fock_ket(int n, int cutoff) {
  check_cutoff(cutoff);
  if (n < 0 || n >= cutoff)
    throw Error(Err::OutOfCutoff, "fock level " + std::to_string(n) +
                                      " outside cutoff " + std::to_string(cutoff));
  Vec v = Vec::Zero(cutoff);
  v[n] = 1.0;
  return v;
}

Vec coherent_ket(cxd alpha, int cutoff) {
  check_cutoff(cutoff);
  Vec v(cutoff);
  // amp_n = e^{-|a|^2/2} a^n / sqrt(n!), built incrementally for stability
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cutoff; ++n) v[n] = v[n - 1] * alpha / std::sqrt(double(n));
  return v;
}

Vec squeezed_vacuum_ket(double r, int cutoff) {
  check_cutoff(cutoff);
  Vec v = Vec::Zero(cutoff);
  // a_{2(n+1)}/a_{2n} = -tanh(r) sqrt((2n+1)(2n+2))/(2(n+1))
  v[0] = 1.0 / std::sqrt(std::cosh(r));
  double th = std::tanh(r);
  for (int n = 0; 2 * (n + 1) < cutoff; ++n) {
    double k = 2.0 * n;
    v[2 * (n + 1)] =
        v[2 * n] * (-th) * std::sqrt((k + 1.0) * (k + 2.0)) / (2.0 * (n + 1.0));
  }
  return v;
}

Vec cat_ket(cxd alpha, bool even, int cutoff) {
  check_cutoff(cutoff);
  Vec plus = coherent_ket(alpha, cutoff);
  Vec minus = coherent_ket(-alpha, cutoff);
  Vec v = even ? Vec(plus + minus) : Vec(plus - minus);
  double nrm = v.norm();
  if (nrm < 1e-12)
    throw Error(Err::DegenerateState, "cat superposition has vanishing norm");
  return v / nrm;
}

DensityMatrix pure_state(const Vec& ket, int modes) {
  DensityMatrix rho;
  rho.modes = modes;
  rho.cutoff = modes == 1 ? int(ket.size())
                          : int(std::lround(std::sqrt(double(ket.size()))));
  rho.data = ket * ket.adjoint();
  check_square(rho);
  return rho;
}

DensityMatrix make_vacuum(int cutoff) { return pure_state(vacuum_ket(cutoff)); }
DensityMatrix make_fock(int n, int cutoff) { return pure_state(fock_ket(n, cutoff)); }
DensityMatrix make_coherent(cxd alpha, int cutoff) {
  return pure_state(coherent_ket(alpha, cutoff));
}
DensityMatrix make_cat(cxd alpha, bool even, int cutoff) {
  return pure_state(cat_ket(alpha, even, cutoff));
}

DensityMatrix make_squeezed_vacuum(double r, int cutoff) {
  return pure_state(squeezed_vacuum_ket(r, cutoff));
}

DensityMatrix make_thermal(double nbar, int cutoff) {
  check_cutoff(cutoff);
  if (nbar < 0) throw Error(Err::InvalidState, "nbar must be nonnegative");
  DensityMatrix rho;
  rho.modes = 1;
  rho.cutoff = cutoff;
  rho.data = Mat::Zero(cutoff, cutoff);
  if (nbar == 0.0) {
    rho.data(0, 0) = 1.0;
    return rho;
  }
  double p = 1.0 / (1.0 + nbar);
  double ratio = nbar / (1.0 + nbar);
  for (int n = 0; n < cutoff; ++n) {
    rho.data(n, n) = p;
    p *= ratio;
  }
  return rho;
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  check_square(a);
  check_square(b);
  if (a.modes != 1 || b.modes != 1)
    throw Error(Err::InvalidState, "tensor_product expects single-mode inputs");
  if (a.cutoff != b.cutoff)
    throw Error(Err::InvalidState, "tensor_product expects matching cutoffs");
  const int c = a.cutoff;
  DensityMatrix out;
  out.modes = 2;
  out.cutoff = c;
  out.data = Mat::Zero(c * c, c * c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      out.data.block(i * c, j * c, c, c) = a.data(i, j) * b.data;
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Mode over) {
  check_square(rho);
  if (rho.modes != 2)
    throw Error(Err::InvalidState, "partial_trace expects a two-mode state");
  const int c = rho.cutoff;
  DensityMatrix out;
  out.modes = 1;
  out.cutoff = c;
  out.data = Mat::Zero(c, c);
  if (over == Mode::B) {
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j)
        for (int k = 0; k < c; ++k) out.data(i, j) += rho.data(i * c + k, j * c + k);
  } else {
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j)
        for (int k = 0; k < c; ++k) out.data(i, j) += rho.data(k * c + i, k * c + j);
  }
  return out;
}

DensityMatrix renormalize(const DensityMatrix& rho) {
  check_square(rho);
  double tr = rho.data.trace().real();
  if (tr < 1e-12)
    throw Error(Err::DegenerateState, "trace too small to renormalize");
  DensityMatrix out = rho;
  out.data /= tr;
  return out;
}

double purity(const DensityMatrix& rho) {
  check_square(rho);
  return (rho.data * rho.data).trace().real();
}

double mean_photon(const DensityMatrix& rho) {
  check_square(rho);
  const int c = rho.cutoff;
  double acc = 0;
  if (rho.modes == 1) {
    for (int n = 0; n < c; ++n) acc += n * rho.data(n, n).real();
  } else {
    for (int i = 0; i < c; ++i)
      for (int k = 0; k < c; ++k) acc += (i + k) * rho.data(i * c + k, i * c + k).real();
  }
  return acc;
}

QuadratureStats quadrature_stats(const DensityMatrix& rho) {
  check_square(rho);
  if (rho.modes != 1)
    throw Error(Err::InvalidState, "quadrature_stats expects a single-mode state");
  const int c = rho.cutoff;
  Mat a = gates::ladder(c);
  Mat x = (a + a.adjoint()) / std::sqrt(2.0);
  Mat p = (a - a.adjoint()) * cxd(0, -1) / std::sqrt(2.0);
  double tr = rho.data.trace().real();
  if (tr < 1e-12) throw Error(Err::DegenerateState, "trace too small");
  QuadratureStats s;
  s.mean_x = (x * rho.data).trace().real() / tr;
  s.mean_p = (p * rho.data).trace().real() / tr;
  s.var_x = (x * x * rho.data).trace().real() / tr - s.mean_x * s.mean_x;
  s.var_p = (p * p * rho.data).trace().real() / tr - s.mean_p * s.mean_p;
  return s;
}

Mat hermitian_sqrt(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(Err::InvalidState, "not square");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(Err::InvalidState, "not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-9)
      throw Error(Err::NotPSD, "eigenvalue " + std::to_string(ev[i]) + " below -1e-9");
    if (ev[i] < 0) ev[i] = 0;
  }
  Eigen::VectorXd root = ev.cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// top eigenvector when purity says the state is numerically pure
Vec principal_vector(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  int last = int(m.rows()) - 1;
  return es.eigenvectors().col(last);
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_square(rho);
  check_square(sigma);
  if (rho.modes != sigma.modes || rho.cutoff != sigma.cutoff)
    throw Error(Err::InvalidState, "fidelity operands have mismatched shapes");
  require_valid_state(rho, 1e-6);
  require_valid_state(sigma, 1e-6);
  double pr = purity(rho);
  if (pr >= 1.0 - 1e-10) {
    Vec psi = principal_vector(rho.data);
    double f = (psi.adjoint() * sigma.data * psi)(0).real();
    return std::max(f, 0.0);
  }
  double ps = purity(sigma);
  if (ps >= 1.0 - 1e-10) {
    Vec psi = principal_vector(sigma.data);
    double f = (psi.adjoint() * rho.data * psi)(0).real();
    return std::max(f, 0.0);
  }
  Mat sr = hermitian_sqrt(rho.data);
  Mat m = sr * sigma.data * sr;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  double s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()[i];
    if (lam > 0) s += std::sqrt(lam);
  }
  return s * s;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_square(rho);
  check_square(sigma);
  if (rho.modes != sigma.modes || rho.cutoff != sigma.cutoff)
    throw Error(Err::InvalidState, "trace_distance operands have mismatched shapes");
  Mat d = 0.5 * ((rho.data - sigma.data) + (rho.data - sigma.data).adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

bool is_valid_state(const DensityMatrix& rho, double tol) {
  if (rho.modes < 1 || rho.modes > 2) return false;
  if (rho.data.rows() != rho.dim() || rho.data.cols() != rho.dim()) return false;
  if ((rho.data - rho.data.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.data.trace().real() - 1.0) > std::max(tol, 1e-3)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.data + rho.data.adjoint()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -tol;
}

void require_valid_state(const DensityMatrix& rho, double tol) {
  if (!is_valid_state(rho, tol))
    throw Error(Err::InvalidState, "operand is not a valid density matrix");
}

double wigner_point(const DensityMatrix& rho, double x, double p) {
  check_square(rho);
  if (rho.modes != 1)
    throw Error(Err::InvalidState, "wigner expects a single-mode state");
  const int c = rho.cutoff;
  cxd beta = cxd(x, p) / std::sqrt(2.0);
  Mat d = gates::displacement(beta, c);
  Mat shifted = d.adjoint() * rho.data * d;
  double acc = 0;
  for (int n = 0; n < c; ++n) {
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    acc += sign * shifted(n, n).real();
  }
  return acc / M_PI;
}

std::vector<std::vector<double>> wigner_grid(const DensityMatrix& rho,
                                             const std::vector<double>& xs,
                                             const std::vector<double>& ps) {
  std::vector<std::vector<double>> w(ps.size(), std::vector<double>(xs.size()));
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = 0; j < xs.size(); ++j) w[i][j] = wigner_point(rho, xs[j], ps[i]);
  return w;
}

}  // namespace cvqd::fock
