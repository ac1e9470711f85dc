// Exception types raised by the bvm library.

#ifndef BVM_ERRORS_HPP_
#define BVM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace bvm {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A series failed to reach its termination criterion within max_terms.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double partial_log_sum, int terms)
      : std::runtime_error(what + " (partial log-sum " + std::to_string(partial_log_sum) +
                           " after " + std::to_string(terms) + " terms)"),
        partial_log_sum_(partial_log_sum), terms_(terms) {}
  double partial_log_sum() const noexcept { return partial_log_sum_; }
  int terms() const noexcept { return terms_; }

private:
  double partial_log_sum_;
  int terms_;
};

// Fisher block not positive definite.
class ConditioningError : public std::runtime_error {
public:
  explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

// Data that cannot identify the requested parameters (e.g. all points equal).
class DegenerateDataError : public std::runtime_error {
public:
  explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bvm

#endif  // BVM_ERRORS_HPP_
