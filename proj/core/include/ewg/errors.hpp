#ifndef EWG_ERRORS_HPP
#define EWG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ewg {

/// Malformed or inconsistent user input (files, flags, dimensions).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not meet its contract (no convergence,
/// loss of positive definiteness, step cap exceeded).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The qP eigenvalue is not simple at the requested direction.
class DegenerateDirectionError : public NumericalError {
 public:
  explicit DegenerateDirectionError(const std::string& what) : NumericalError(what) {}
};

}  // namespace ewg

#endif
