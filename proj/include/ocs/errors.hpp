#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ocs {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes do not line up.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A sex partition violates its invariants (empty group, overlap, gap).
class InvalidPartition : public Error {
  public:
    using Error::Error;
};

/// w'Aw fell below the degeneracy floor; the cone normal is undefined.
class DegenerateDirection : public Error {
  public:
    using Error::Error;
};

/// LDL^T hit a non-positive pivot. `pivot()` is the 1-based index of the
/// failing pivot in the matrix's original ordering.
class NotPositiveDefinite : public Error {
  public:
    NotPositiveDefinite(std::size_t pivot, const std::string& what)
        : Error(what), pivot_(pivot) {}

    std::size_t pivot() const { return pivot_; }

  private:
    std::size_t pivot_;
};

/// One parser diagnostic: which file, where, what.
struct ParseDiagnostics {
    std::string role;      // e.g. "sigma", "mu", "conic"
    std::size_t line = 0;  // 1-based
    std::string message;
};

/// An input document was rejected.
class ParseError : public Error {
  public:
    ParseError(std::string role, std::size_t line, std::string message)
        : Error(role + ":" + std::to_string(line) + ": " + message),
          diag_{std::move(role), line, std::move(message)} {}

    const ParseDiagnostics& diagnostics() const { return diag_; }
    const std::string& role() const { return diag_.role; }
    std::size_t line() const { return diag_.line; }

  private:
    ParseDiagnostics diag_;
};

/// A solve ended with a non-optimal status that the caller did not handle.
class SolveError : public Error {
  public:
    using Error::Error;
};

}  // namespace ocs
