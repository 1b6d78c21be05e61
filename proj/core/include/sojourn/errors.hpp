#pragma once

#include <stdexcept>
#include <string>

namespace sojourn {

/// A precondition on the arguments of an operation does not hold
/// (dimension mismatch, non-positive tolerance, real z where Im z != 0 is needed, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The spectral parameter hits (within tolerance) an eigenvalue of the operator being inverted.
class SingularPoint : public NumericalFailure {
 public:
  SingularPoint(const std::string& what, double eigenvalue)
      : NumericalFailure(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// E0 + n*omega coincides with another eigenvalue of H0.
class NonResonanceViolation : public InvalidArgument {
 public:
  NonResonanceViolation(const std::string& what, double eigenvalue, int harmonic)
      : InvalidArgument(what), eigenvalue_(eigenvalue), harmonic_(harmonic) {}
  double eigenvalue() const { return eigenvalue_; }
  int harmonic() const { return harmonic_; }

 private:
  double eigenvalue_;
  int harmonic_;
};

}  // namespace sojourn
