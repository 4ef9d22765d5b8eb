#pragma once

#include <stdexcept>
#include <string>

namespace stratsel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a special function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Root finder called on an interval whose endpoints have the same sign.
class NoBracket : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Reward too small for a dropout threshold to exist.
class SubcriticalReward : public Error {
 public:
  using Error::Error;
};

// Both groups are identical; no advantaged group can be named.
class AmbiguousRegime : public Error {
 public:
  using Error::Error;
};

// Small-reward closed forms requested for a reward above the bound.
class SubcriticalityViolated : public Error {
 public:
  using Error::Error;
};

// Two groups share the same posterior standard deviation.
class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace stratsel
