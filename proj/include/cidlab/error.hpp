#pragma once

#include <stdexcept>
#include <string>

namespace cidlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid distribution or process parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Covariance matrix is not symmetric positive semidefinite.
class MatrixError : public Error {
 public:
  using Error::Error;
};

// The (family, function, centering) combination has no closed form.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

// A limit law produced an invalid variance or distribution function.
class LawError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

}  // namespace cidlab
