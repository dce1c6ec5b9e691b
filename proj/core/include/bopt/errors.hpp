#ifndef BOPT_ERRORS_HPP
#define BOPT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expression grammar.
class SyntaxError : public Error {
 public:
  using Error::Error;
};
class UnknownIdentifier : public Error {
 public:
  using Error::Error;
};
class ArityError : public Error {
 public:
  using Error::Error;
};

// Configuration documents.
class UnknownKey : public Error {
 public:
  using Error::Error;
};
class TypeMismatch : public Error {
 public:
  using Error::Error;
};
class RangeError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when a Cholesky pivot is not strictly positive.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double value)
      : Error("matrix is not positive definite (pivot " + std::to_string(pivot) +
              " = " + std::to_string(value) + ")"),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class DegenerateBasis : public Error {
 public:
  using Error::Error;
};
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};
class InitDesignInfeasible : public Error {
 public:
  using Error::Error;
};
class NoFeasibleProposal : public Error {
 public:
  using Error::Error;
};
/// Ask/tell protocol violation (tell without a matching propose).
class OutOfOrder : public Error {
 public:
  using Error::Error;
};

}  // namespace bopt

#endif  // BOPT_ERRORS_HPP
