#pragma once

#include <stdexcept>
#include <string>

namespace gaplab {

/// A formula was evaluated outside the region where it is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two objects that must describe the same vertex set do not.
class SizeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive routine was asked to run beyond its configured size cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw SizeMismatch(std::string(what) + ": size " + std::to_string(a) +
                       " vs " + std::to_string(b));
  }
}

}  // namespace detail
}  // namespace gaplab
