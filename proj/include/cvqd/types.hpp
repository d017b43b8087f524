#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cvqd {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

enum class Err {
  OutOfCutoff,
  DegenerateState,
  InvalidState,
  NotPSD,
  CutoffTooSmall,
  ConfigError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(Err kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Err kind() const { return kind_; }

 private:
  Err kind_;
};

// Density operator on 1 or 2 qumodes, each truncated to `cutoff` Fock levels.
// Two-mode composite index is n_A*cutoff + n_B (mode A most significant).
struct DensityMatrix {
  int modes = 1;
  int cutoff = 0;
  Mat data;

  int dim() const {
    int d = 1;
    for (int m = 0; m < modes; ++m) d *= cutoff;
    return d;
  }
};

}  // namespace cvqd
