#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace spinotto {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Domain error hierarchy. Every throwing operation names its failure mode.
struct SpinOttoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateSpectrum : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct NonPositiveTemperature : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct DimensionMismatch : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct StepsTooFew : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct StepSizeTooLarge : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct MicroreversibilityViolation : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct ZeroHeat : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct ZeroDuration : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct InvalidFields : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct UnknownPreset : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct InvalidOverride : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};
struct IoError : SpinOttoError {
  using SpinOttoError::SpinOttoError;
};

// Instantaneous Hamiltonian controls: field B, coupling J (the unit of
// energy, 1 by default), anisotropy gamma in [0,1].
struct SpinParams {
  double B = 1.0;
  double J = 1.0;
  double gamma = 1.0;

  double k() const { return std::sqrt(B * B + gamma * gamma * J * J); }

  void validate() const {
    if (!(J > 0.0)) throw InvalidFields("SpinParams: J must be positive");
    if (!(B >= 0.0)) throw InvalidFields("SpinParams: B must be non-negative");
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw InvalidFields("SpinParams: gamma must lie in [0,1]");
  }
};

}  // namespace spinotto
