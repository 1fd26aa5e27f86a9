#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Every failure raised by the library derives from Error so callers can
// separate numerical failures from configuration problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpaceError : public Error {
  using Error::Error;
};
class IndexError : public Error {
  using Error::Error;
};
class ShapeError : public Error {
  using Error::Error;
};

class SeriesDivergenceError : public Error {
  using Error::Error;
};
class PoleError : public Error {
  using Error::Error;
};
class RangeError : public Error {
  using Error::Error;
};

class BracketError : public Error {
 public:
  BracketError(const std::string& what, double phi_lo, double phi_hi)
      : Error(what), phi_lo_(phi_lo), phi_hi_(phi_hi) {}
  double phi_lo() const { return phi_lo_; }
  double phi_hi() const { return phi_hi_; }

 private:
  double phi_lo_;
  double phi_hi_;
};
class InvalidBracketError : public Error {
  using Error::Error;
};

class IntegrationError : public Error {
  using Error::Error;
};
class NonUniqueSteadyStateError : public Error {
  using Error::Error;
};
class ReducibleChainError : public Error {
  using Error::Error;
};
class DegenerateError : public Error {
  using Error::Error;
};
class UndefinedCorrelationError : public Error {
  using Error::Error;
};

class ParameterError : public Error {
  using Error::Error;
};

// Raised while reading a scenario; maps to CLI exit code 2.
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace optomech
