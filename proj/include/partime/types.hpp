#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace partime {

template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using Matrix = CMat<double>;
using Vector = CVec<double>;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct SingularError : Error {
  using Error::Error;
};
struct CapExceeded : Error {
  using Error::Error;
};

}  // namespace partime
