#pragma once

#include <stdexcept>
#include <string>

namespace glogit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input, bad configuration or a violated precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative method failed, or a matrix was too ill-conditioned to use.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace glogit
