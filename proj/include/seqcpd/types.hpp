#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace seqcpd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration that violates a documented constraint.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamily : public Error {
 public:
  using Error::Error;
};

/// A matrix inversion failed even after adding the ridge.
class DegenerateSegment : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

/// Observation outside the support of the model (e.g. negative Poisson count).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnknownDgp : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class RaggedRows : public ParseError {
 public:
  using ParseError::ParseError;
};

class EmptyFile : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace seqcpd
