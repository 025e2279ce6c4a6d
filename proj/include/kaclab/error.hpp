#ifndef KACLAB_ERROR_HPP
#define KACLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace kac {

/// Bad input: malformed configuration, violated precondition, invalid density.
/// Maps to CLI exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function (off-sphere point, |v| > sqrt(N)).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A numerical procedure broke down (NaN, negative density, all-zero weights).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A quantitative check did not hold. Maps to CLI exit code 3.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace kac

#endif
