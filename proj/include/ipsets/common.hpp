#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ipsets {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Expected payoff per type (or per cohort), conditional on that type.
using Profile = Eigen::VectorXd;

// Input normalization tolerance (probability vectors, row-stochastic rows).
inline constexpr double kInputTol = 1e-9;
// Tolerance for LP equalities and Bayes-plausibility of belief distributions.
inline constexpr double kPlausibilityTol = 1e-7;
// Signals with unconditional probability below this are undefined to condition on.
inline constexpr double kSignalProbFloor = 1e-12;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ZeroProbabilitySignal : public Error {
 public:
  using Error::Error;
};

class NotBayesPlausible : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

class ReductionFailed : public Error {
 public:
  using Error::Error;
};

class RowSumMismatch : public Error {
 public:
  using Error::Error;
};

class NonUniformPrior : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class TypeDependentSenderPayoff : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class CohortZeroMass : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ipsets
