#include "cvqd/gates.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace cvqd::gates {

namespace {

void check_cutoff(int cutoff) {
  if (cutoff < 2) throw Error(Err::CutoffTooSmall, "cutoff must be at least 2");
}

}  // namespace

Mat ladder(int cutoff) {
  check_cutoff(cutoff);
  Mat a = Mat::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Mat number_op(int cutoff) {
  check_cutoff(cutoff);
  Mat n = Mat::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = double(k);
  return n;
}

Mat expm(const Mat& m) { return m.exp(); }

Mat expm_frechet_antihermitian(const Mat& a, const Mat& e) {
  // dexp at an anti-Hermitian point: diagonalize h = a/i, apply the
  // divided-difference kernel phi_jk = (exp(d_j)-exp(d_k))/(d_j-d_k)
  Mat h = a / cxd(0, 1);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Mat& v = es.eigenvectors();
  const int n = int(a.rows());
  Mat et = v.adjoint() * e * v;
  Mat phi(n, n);
  for (int j = 0; j < n; ++j) {
    cxd dj = cxd(0, lam[j]);
    cxd ej = std::exp(dj);
    for (int k = 0; k < n; ++k) {
      cxd dk = cxd(0, lam[k]);
      cxd diff = dj - dk;
      if (std::abs(diff) < 1e-12) {
        phi(j, k) = ej;
      } else {
        phi(j, k) = (ej - std::exp(dk)) / diff;
      }
    }
  }
  Mat core = phi.cwiseProduct(et);
  return v * core * v.adjoint();
}

Mat displacement(cxd alpha, int cutoff) {
  Mat a = ladder(cutoff);
  Mat g = alpha * a.adjoint() - std::conj(alpha) * a;
  return g.exp();
}

Mat rotation(double phi, int cutoff) {
  check_cutoff(cutoff);
  Mat u = Mat::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) u(n, n) = std::exp(cxd(0, phi * n));
  return u;
}

Mat squeeze(double r, int cutoff) {
  Mat a = ladder(cutoff);
  Mat g = 0.5 * r * (a * a - (a * a).adjoint());
  return g.exp();
}

Mat kerr(double kappa, int cutoff) {
  check_cutoff(cutoff);
  Mat u = Mat::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) u(n, n) = std::exp(cxd(0, kappa * double(n) * double(n)));
  return u;
}

namespace {

Mat two_mode_generator_bs(double phi, int cutoff) {
  Mat a = ladder(cutoff);
  Mat id = Mat::Identity(cutoff, cutoff);
  Mat a_full = Eigen::kroneckerProduct(a, id);
  Mat b_full = Eigen::kroneckerProduct(id, a);
  cxd eip = std::exp(cxd(0, phi));
  return eip * a_full.adjoint() * b_full - std::conj(eip) * a_full * b_full.adjoint();
}

struct BsEig {
  Eigen::VectorXd lam;  // spectrum of G/i
  Mat v;
};

// One eigendecomposition per cutoff serves every phi=0 beamsplitter; node
// references stay valid under later insertions, the mutex serializes writers.
const BsEig& bs0_eig(int cutoff) {
  static std::mutex mu;
  static std::map<int, BsEig> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(cutoff);
  if (it == cache.end()) {
    Mat h = two_mode_generator_bs(0.0, cutoff) / cxd(0, 1);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
    it = cache.emplace(cutoff, BsEig{es.eigenvalues(), es.eigenvectors()}).first;
  }
  return it->second;
}

}  // namespace

Mat beamsplitter(double theta, double phi, int cutoff) {
  if (phi == 0.0) {
    const BsEig& e = bs0_eig(cutoff);
    Vec ph(e.lam.size());
    for (int i = 0; i < ph.size(); ++i) ph[i] = std::exp(cxd(0, theta * e.lam[i]));
    return e.v * ph.asDiagonal() * e.v.adjoint();
  }
  return (theta * two_mode_generator_bs(phi, cutoff)).exp();
}

Mat beamsplitter_by_transmissivity(double eta, int cutoff) {
  if (eta < 0.0 || eta > 1.0)
    throw Error(Err::ConfigError, "transmissivity must lie in [0,1]");
  return beamsplitter(std::acos(std::sqrt(eta)), 0.0, cutoff);
}

Mat embed_single(const Mat& u, int slot, int cutoff) {
  check_cutoff(cutoff);
  Mat id = Mat::Identity(cutoff, cutoff);
  if (slot == 0) return Eigen::kroneckerProduct(u, id);
  return Eigen::kroneckerProduct(id, u);
}

Mat gate_generator(GateParam kind, const GeneratorArgs& args, int cutoff) {
  switch (kind) {
    case GateParam::R: {
      return cxd(0, 1) * number_op(cutoff);
    }
    case GateParam::K: {
      Mat n = number_op(cutoff);
      return cxd(0, 1) * n * n;
    }
    case GateParam::S: {
      Mat a = ladder(cutoff);
      return 0.5 * (a * a - (a * a).adjoint());
    }
    case GateParam::BSTheta: {
      return two_mode_generator_bs(args.phi, cutoff);
    }
    case GateParam::BSPhi: {
      // dU/dphi = i (n_A U - U n_A) since the phase enters through
      // conjugation of the theta generator by rotations on mode A
      Mat u = beamsplitter(args.theta, args.phi, cutoff);
      Mat na = embed_single(number_op(cutoff), 0, cutoff);
      return cxd(0, 1) * (na - u * na * u.adjoint());
    }
    case GateParam::DRe:
    case GateParam::DIm: {
      Mat a = ladder(cutoff);
      Mat g = args.alpha * a.adjoint() - std::conj(args.alpha) * a;
      Mat de = (kind == GateParam::DRe) ? Mat(a.adjoint() - a)
                                        : Mat(cxd(0, 1) * (a.adjoint() + a));
      Mat u = g.exp();
      Mat frechet = expm_frechet_antihermitian(g, de);
      // left-logarithmic derivative so that dU/dp = G U exactly
      return frechet * u.adjoint();
    }
  }
  throw Error(Err::ConfigError, "unknown gate parameter kind");
}

}  // namespace cvqd::gates
