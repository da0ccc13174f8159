#pragma once

#include <stdexcept>
#include <string>

namespace solwave {

/// Base class for every failure the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A symbol evaluated to a non-finite value (pole, sqrt of a negative, ...).
class SymbolSingular : public Error {
 public:
  SymbolSingular(double xi, const std::string& what)
      : Error("symbol singular at xi = " + std::to_string(xi) + ": " + what),
        xi(xi) {}
  double xi;
};

/// Richardson extrapolation of an origin derivative failed to settle.
class DerivativeUnstable : public Error {
 public:
  using Error::Error;
};

/// The KdV coefficient gamma vanished (or could not be defined).
class GammaZero : public Error {
 public:
  using Error::Error;
};

class BadGrid : public Error {
 public:
  using Error::Error;
};

class UnknownModel : public Error {
 public:
  using Error::Error;
};

/// One of the four abcd admissibility conditions failed; `which` is the
/// 1-based index of the first violated condition.
class AbcdConditionViolated : public Error {
 public:
  AbcdConditionViolated(int which, const std::string& what)
      : Error("abcd condition " + std::to_string(which) + " violated: " + what),
        which(which) {}
  int which;
};

/// Adjacent scan samples jumped by more than 1% of the sampled range.
class ScanUnresolved : public Error {
 public:
  using Error::Error;
};

/// H grows faster than G decays, so the pair cannot satisfy a smoothing order.
class SmoothingMismatch : public Error {
 public:
  using Error::Error;
};

/// The dispersive denominator lost positivity at some grid frequency.
class SpectrumCollision : public Error {
 public:
  SpectrumCollision(double xi, const std::string& what)
      : Error("spectrum collision at xi = " + std::to_string(xi) + ": " + what),
        xi(xi) {}
  double xi;
};

/// Too much of the solution's energy sits in the top third of the spectrum.
class GridUnderResolved : public Error {
 public:
  GridUnderResolved(double tail, const std::string& what)
      : Error("grid under-resolved (tail fraction " + std::to_string(tail) +
              "): " + what),
        tail(tail) {}
  double tail;
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(int iterations, double last_norm)
      : Error("Newton diverged after " + std::to_string(iterations) +
              " iterations, last residual " + std::to_string(last_norm)),
        iterations(iterations),
        last_norm(last_norm) {}
  int iterations;
  double last_norm;
};

class JacobianSingular : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Lexical or syntactic failure in the symbol expression language.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& expected)
      : Error("parse error at position " + std::to_string(position) +
              ", expected " + expected),
        position(position),
        expected(expected) {}
  std::size_t position;
  std::string expected;
};

class UnknownIdentifier : public Error {
 public:
  explicit UnknownIdentifier(const std::string& name)
      : Error("unknown identifier '" + name + "'"), name(name) {}
  std::string name;
};

}  // namespace solwave
