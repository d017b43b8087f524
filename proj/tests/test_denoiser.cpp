#include <cmath>

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "cvqd/denoiser.hpp"
#include "cvqd/fock.hpp"
#include "cvqd/gates.hpp"
#include "cvqd/types.hpp"

using namespace cvqd;

TEST_SUITE("denoiser") {

TEST_CASE("parameter init is deterministic and bounded") {
  denoiser::ThetaVector a = denoiser::param_init(3, 0.01, 11);
  denoiser::ThetaVector b = denoiser::param_init(3, 0.01, 11);
  denoiser::ThetaVector c = denoiser::param_init(3, 0.01, 12);
  CHECK(a.size() == 48);
  CHECK(a.layers == 3);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.values.cwiseAbs().maxCoeff() <= 0.01);
}

TEST_CASE("squeeze clamp and index classification") {
  CHECK(denoiser::clamp_squeeze(2.0) == 1.5);
  CHECK(denoiser::clamp_squeeze(-2.0) == -1.5);
  CHECK(denoiser::clamp_squeeze(0.3) == 0.3);
  for (int i = 0; i < 32; ++i) {
    bool expect = (i % 16 == 4) || (i % 16 == 5);
    CHECK(denoiser::is_squeeze_index(i) == expect);
  }
}

TEST_CASE("time embedding is a rotated displaced vacuum") {
  denoiser::TimeEmbedConfig cfg{1.0, 112};
  Vec k = denoiser::time_embed_ket(25, cfg, 20);
  CHECK(std::abs(k(1) - cxd(0.4634120936021888, 0.39131658880589065)) < 1e-12);
  Vec t0 = denoiser::time_embed_ket(0, cfg, 20);
  CHECK((t0 - fock::coherent_ket(cxd(1.0, 0.0), 20)).cwiseAbs().maxCoeff() < 1e-8);
  Vec tT = denoiser::time_embed_ket(112, cfg, 20);
  CHECK((tT - fock::coherent_ket(cxd(-1.0, 0.0), 20)).cwiseAbs().maxCoeff() < 1e-8);
  DensityMatrix rho = denoiser::time_embed(25, cfg, 20);
  CHECK(std::abs(rho.data.trace().real() - 1.0) < 1e-12);
  CHECK(fock::purity(rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(denoiser::time_embed_ket(113, cfg, 20), Error);
  CHECK_THROWS_AS(denoiser::time_embed_ket(-1, cfg, 20), Error);
}

TEST_CASE("zero parameters give the identity circuit") {
  denoiser::ThetaVector theta;
  theta.layers = 2;
  theta.values = Eigen::VectorXd::Zero(32);
  Mat u = denoiser::denoiser_unitary(theta, 6);
  CHECK((u - Mat::Identity(36, 36)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("circuit is unitary for random parameters") {
  denoiser::ThetaVector theta = denoiser::param_init(2, 0.4, 5);
  Mat u = denoiser::denoiser_unitary(theta, 8);
  CHECK((u.adjoint() * u - Mat::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one layer applies its factors in the documented order") {
  const int c = 6;
  denoiser::ThetaVector theta;
  theta.layers = 1;
  theta.values = Eigen::VectorXd::Zero(16);
  double p[16] = {0.3, 0.9, 0.2, -0.4, 0.25, -0.3, 0.7, 0.1,
                  -0.2, 0.5, 0.15, -0.1, 0.2, 0.3, 0.12, -0.22};
  for (int i = 0; i < 16; ++i) theta.values(i) = p[i];
  Mat id = Mat::Identity(c, c);
  auto pair = [&](const Mat& ua, const Mat& ub) {
    return Mat(kroneckerProduct(ua, ub));
  };
  Mat expected = gates::beamsplitter(p[0], p[1], c);
  expected = pair(gates::rotation(p[2], c), gates::rotation(p[3], c)) * expected;
  expected = pair(gates::squeeze(p[4], c), gates::squeeze(p[5], c)) * expected;
  expected = gates::beamsplitter(p[6], p[7], c) * expected;
  expected = pair(gates::rotation(p[8], c), gates::rotation(p[9], c)) * expected;
  expected = pair(gates::displacement(cxd(p[10], p[11]), c),
                  gates::displacement(cxd(p[12], p[13]), c)) *
             expected;
  expected = pair(gates::kerr(p[14], c), gates::kerr(p[15], c)) * expected;
  Mat u = denoiser::denoiser_unitary(theta, c);
  CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-12);
  std::vector<denoiser::Factor> fs = denoiser::circuit_factors(theta, c);
  CHECK(fs.size() == 7);
}

TEST_CASE("squeeze arguments beyond the clamp saturate") {
  const int c = 6;
  denoiser::ThetaVector theta;
  theta.layers = 1;
  theta.values = Eigen::VectorXd::Zero(16);
  theta.values(4) = 2.5;
  denoiser::ThetaVector clamped = theta;
  clamped.values(4) = 1.5;
  Mat u1 = denoiser::denoiser_unitary(theta, c);
  Mat u2 = denoiser::denoiser_unitary(clamped, c);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("identity circuit reproduces the time embedding") {
  const int c = 8;
  denoiser::TimeEmbedConfig cfg{1.0, 30};
  denoiser::ThetaVector theta;
  theta.layers = 1;
  theta.values = Eigen::VectorXd::Zero(16);
  // unit trace input, otherwise the traced-out factor scales the embedding
  DensityMatrix in = fock::renormalize(fock::make_coherent(cxd(0.3, -0.5), c));
  DensityMatrix out = denoiser::denoise_step(in, 7, theta, cfg);
  DensityMatrix tau = denoiser::time_embed(7, cfg, c);
  CHECK(out.modes == 1);
  CHECK((out.data - tau.data).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("denoise step preserves trace under a random circuit") {
  const int c = 8;
  denoiser::TimeEmbedConfig cfg{1.0, 30};
  denoiser::ThetaVector theta = denoiser::param_init(2, 0.3, 9);
  DensityMatrix in = fock::make_thermal(0.4, c);
  double tr_in = in.data.trace().real();
  DensityMatrix out = denoiser::denoise_step(in, 11, theta, cfg);
  CHECK(std::abs(out.data.trace().real() - tr_in) < 1e-12);
  CHECK(fock::is_valid_state(out, 1e-9));
  Mat u = denoiser::denoiser_unitary(theta, c);
  DensityMatrix with = denoiser::denoise_step_with(in, 11, u, cfg);
  CHECK((with.data - out.data).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("backward chain feeds each output into the next step") {
  const int c = 8;
  // small embed amplitude and a renormalized start keep truncation tails below the bounds
  denoiser::TimeEmbedConfig cfg{0.3, 10};
  denoiser::ThetaVector theta;
  theta.layers = 1;
  theta.values = Eigen::VectorXd::Zero(16);
  DensityMatrix start = fock::renormalize(fock::make_thermal(0.5, c));
  DensityMatrix ref = denoiser::time_embed(1, cfg, c);
  denoiser::ChainResult res = denoiser::backward_chain(start, 3, theta, cfg, &ref);
  CHECK(res.fidelity.size() == 3);
  CHECK((res.state.data - denoiser::time_embed(1, cfg, c).data).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(res.fidelity[2] == doctest::Approx(1.0).epsilon(1e-9));
  denoiser::ChainResult bare = denoiser::backward_chain(start, 3, theta, cfg, nullptr);
  CHECK(bare.fidelity.empty());
}

}
